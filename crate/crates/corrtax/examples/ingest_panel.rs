//! Read a panel CSV (path argument, or a small built-in panel), validate it,
//! and print its log-returns and the rolling windows they split into.
//!
//!     cargo run -p corrtax --example ingest_panel -- weekly_sales.csv

use corrtax::panel::{parse_panel_with_floor, MIN_PANEL_LENGTH};
use corrtax::prelude::*;

const BUILTIN: &str = "\
date,Alpha,Beta,Gamma
2003-05-01,1200,800,430
2003-05-08,1310,760,455
2003-05-15,1290,0,470
2003-05-22,1405,820,462
2003-05-29,1380,845,490
2003-06-05,1460,830,505
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => BUILTIN.to_string(),
    };

    // Zeros are rejected outright...
    match parse_panel(&text).and_then(|p| validate_panel(p, MIN_PANEL_LENGTH)) {
        Ok(_) => println!("panel is valid as-is"),
        Err(e) => println!("rejected: {e}"),
    }
    // ...unless a floor is supplied.
    let panel = validate_panel(parse_panel_with_floor(&text, 1.0)?, MIN_PANEL_LENGTH)?;
    println!(
        "{} assets x {} weeks ({} .. {})",
        panel.asset_count(),
        panel.len(),
        panel.dates()[0],
        panel.dates()[panel.len() - 1]
    );

    let returns = log_returns(&panel)?;
    print!("\n{}", returns.to_csv());

    let plan = WindowPlan::new(3, 1, returns.len())?;
    println!("\nwidth 3, step 1 -> {} windows", plan.window_count(returns.len()));
    for start in plan.starts(returns.len()) {
        let w = returns.slice_window(start, 3)?;
        println!("  {} .. {}", w.dates()[0], w.dates()[2]);
    }
    Ok(())
}

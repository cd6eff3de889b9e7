//! Slide a window over the returns, build an MST per window and measure how
//! quickly the origin tree's edges disappear.

use corrtax::prelude::*;

fn main() -> Result<(), corrtax::Error> {
    let panel = generate_competitive_market(&CompetitionConfig::new(10, 260, 0.3, 2010))?;
    let returns = log_returns(&panel)?;

    let width = 26;
    let plan = WindowPlan::new(width, 1, returns.len())?;
    let trees = rolling_trees(&returns, &plan)?;
    println!("{} windows of {width} weeks", trees.len());

    let curve = edge_survival(&trees, 0)?;
    for (lag, f) in curve.lags().zip(&curve.fraction).take(12) {
        println!("lag {lag:>2}  {f:.3}  {}", "#".repeat((f * 40.0).round() as usize));
    }

    match tree_half_life(&curve, 1.0).half_life {
        Some(h) => println!("half-life from origin 0: {h:.3} weeks"),
        None => println!("origin 0 never decays to one half"),
    }
    let mean = mean_half_life(&trees, 1.0)?;
    if let Some(h) = mean.half_life {
        println!("mean over {} origins: {h:.3} weeks", mean.origin_count);
    }
    Ok(())
}

//! Tree half-life as a function of window width, with a line through the
//! origin fitted to widths up to a year.
//!
//! Writes gnuplot-ready data when given a path:
//!
//!     cargo run -p corrtax --example half_life_scaling -- scaling.dat

use corrtax::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let panel = generate_competitive_market(&CompetitionConfig::new(10, 400, 0.3, 2010))?;
    let returns = log_returns(&panel)?;

    let widths = [4, 8, 13, 26, 39, 52, 78];
    let scaling = half_life_scaling(&returns, &widths, &ScalingOptions::default())?;

    println!("{:>6} {:>10} {:>8}", "width", "half-life", "origins");
    for ((w, h), n) in scaling
        .widths
        .iter()
        .zip(&scaling.half_lives)
        .zip(&scaling.origin_counts)
    {
        let h = h.map_or("-".to_string(), |h| format!("{h:.3}"));
        println!("{w:>6} {h:>10} {n:>8}");
    }
    println!("\nhalf-life ~ {:.4} x width", scaling.slope);
    for (w, r) in &scaling.residuals {
        println!("  residual at {w:>3}: {r:+.3}");
    }

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, scaling.plot_data())?;
        println!("wrote {path}");
    }
    Ok(())
}

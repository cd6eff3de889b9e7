//! The most correlated pairs of a competitive market, with their
//! correlation distances.

use corrtax::prelude::*;

fn main() -> Result<(), corrtax::Error> {
    let panel = generate_competitive_market(&CompetitionConfig::new(12, 300, 0.3, 5))?;
    let corr = correlation_matrix(&log_returns(&panel)?)?;

    for p in top_pairs(&corr, 5)? {
        println!("{:.2}  {} – {}  (d = {:.2})", p.rho, p.first, p.second, p.distance);
    }

    // d(rho) at a few reference points
    for rho in [1.0, 0.73, 0.0, -1.0] {
        println!("d({rho}) = {:.4}", correlation_distance(rho));
    }
    Ok(())
}

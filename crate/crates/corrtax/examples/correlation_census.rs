//! Correlation matrix of a two-sector synthetic market and the census of
//! strongly, weakly and negatively correlated pairs.

use corrtax::prelude::*;

fn main() -> Result<(), corrtax::Error> {
    let config = SectorConfig::uniform(2, 4, 1.0, 0.8, 260, 42);
    let returns = log_returns(&generate_sector_market(&config)?)?;
    let corr = correlation_matrix(&returns)?;

    print!("{:>8}", "");
    for a in corr.assets() {
        print!("{:>8}", a.as_str());
    }
    println!();
    for (i, a) in corr.assets().iter().enumerate() {
        print!("{:>8}", a.as_str());
        for j in 0..corr.len() {
            print!("{:>8.2}", corr.get(i, j));
        }
        println!();
    }

    let counts = census(&corr);
    println!(
        "\nstrong {}  weak {}  negative {}  ({} pairs)",
        counts.strong,
        counts.weak,
        counts.negative,
        counts.pairs()
    );
    println!("{}", counts.to_json());

    for rho in [0.73, 0.5, 0.49, -0.2] {
        println!("rho {rho:>5}: {:?}", classify_pair(rho)?);
    }
    Ok(())
}

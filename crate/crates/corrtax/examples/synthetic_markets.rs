//! The two synthetic generators side by side: a sector factor model, whose
//! MST groups each sector together, and a fixed-size competitive market,
//! whose pairs are mostly anti-correlated.

use corrtax::prelude::*;
use corrtax::synth::Sector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut sectors = SectorConfig::uniform(2, 4, 1.0, 0.1, 260, 1);
    sectors.sectors.push(Sector {
        label: "Indie".into(),
        members: 3,
        loading: 0.5,
    });
    let panel = generate_sector_market(&sectors)?;
    let corr = correlation_matrix(&log_returns(&panel)?)?;
    let tree = minimum_spanning_tree(&distance_matrix(&corr))?;
    let group = sectors.sector_of_assets();
    let within = tree.edges().iter().filter(|e| group[e.a] == group[e.b]).count();
    println!(
        "sector model: {} assets, {within}/{} MST edges inside a sector, census {:?}",
        panel.asset_count(),
        tree.edges().len(),
        census(&corr)
    );

    let market = CompetitionConfig::new(10, 260, 0.3, 2010);
    let panel = generate_competitive_market(&market)?;
    let total: f64 = panel.row(0).iter().sum();
    println!(
        "competition model: weekly total {total:.0}, census {:?}",
        census(&correlation_matrix(&log_returns(&panel)?)?)
    );

    // Configs are plain serde structs.
    println!("{}", serde_json::to_string_pretty(&market)?);
    print!("{}", panel.to_csv().lines().take(3).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}

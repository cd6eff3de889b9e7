//! Hierarchical structure: subdominant ultrametric from the MST, the
//! single-linkage dendrogram, and its Newick export.

use corrtax::prelude::*;
use corrtax::taxonomy::newick::parse_newick;

fn main() -> Result<(), corrtax::Error> {
    let config = SectorConfig::uniform(2, 3, 1.0, 0.6, 300, 8);
    let dist = distance_matrix(&correlation_matrix(&log_returns(&generate_sector_market(&config)?)?)?);

    let du = subdominant_ultrametric(&minimum_spanning_tree(&dist)?);
    print!("{}", du.to_csv());

    let dendro = single_linkage(&dist)?;
    println!();
    for (k, m) in dendro.merges().iter().enumerate() {
        println!(
            "merge {k}: {} + {} at {:.4} (size {})",
            m.left, m.right, m.height, m.size
        );
    }

    // Same hierarchy either way.
    let coph = cophenetic(&dendro);
    assert!(du
        .rows()
        .iter()
        .flatten()
        .zip(coph.rows().iter().flatten())
        .all(|(a, b)| (a - b).abs() < 1e-12));

    let newick = export_newick(&dendro);
    println!("\n{newick}");
    let parsed = parse_newick(&newick)?;
    println!("leaves: {:?}", parsed.leaf_names());
    Ok(())
}

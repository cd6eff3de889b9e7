//! Minimum spanning tree of a three-sector market, exported as Graphviz DOT
//! and JSON. Pipe the DOT through `neato -Tsvg` to draw it.

use corrtax::prelude::*;

fn main() -> Result<(), corrtax::Error> {
    let config = SectorConfig::uniform(3, 4, 1.0, 0.5, 400, 3);
    let corr = correlation_matrix(&log_returns(&generate_sector_market(&config)?)?)?;
    let tree = minimum_spanning_tree(&distance_matrix(&corr))?;

    for e in tree.edges() {
        let (a, b) = tree.named_edge(e);
        println!("{a:>6} -- {b:<6} {:.4}", e.weight);
    }
    println!("total length {:.4}\n", tree.total_weight());

    print!("{}", export_dot(&tree));
    println!("{}", export_json(&tree));

    // The maximum-correlation tree picks the same edges.
    assert_eq!(maximum_spanning_tree(&corr)?.edge_set(), tree.edge_set());
    Ok(())
}

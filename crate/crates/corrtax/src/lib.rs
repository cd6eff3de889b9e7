//! Correlation-based hierarchical taxonomy of a panel of weekly positive
//! time series (sales, prices, audiences).
//!
//! The pipeline runs
//!
//! ```text
//! SalesPanel --log_returns--> ReturnPanel --correlation_matrix--> CorrelationMatrix
//!     --distance_matrix--> DistanceMatrix --minimum_spanning_tree--> SpanningTree
//!     --subdominant_ultrametric--> UltrametricMatrix
//! ```
//!
//! with [`taxonomy::single_linkage`] giving the same hierarchy as a
//! dendrogram, and [`dynamics`] tracking how long spanning-tree edges survive
//! as a window slides over the panel.
//!
//! ## Examples
//!
//! Every capability has a runnable example under `examples/`:
//!
//! ```text
//! examples/
//! ├── ingest_panel.rs        # CSV in, validation, log-returns, windows
//! ├── correlation_census.rs  # correlation matrix and strong/weak/negative counts
//! ├── strongest_pairs.rs     # ranked pairs with their distances
//! ├── spanning_tree.rs       # MST as DOT and JSON
//! ├── hierarchy.rs           # subdominant ultrametric, dendrogram, Newick
//! ├── tree_half_life.rs      # rolling MSTs, survival curve, half-life
//! ├── half_life_scaling.rs   # half-life against window width
//! └── synthetic_markets.rs   # sector and competition generators
//! ```
//!
//! Run one with `cargo run -p corrtax --example spanning_tree`.
//!
//! ```
//! use corrtax::prelude::*;
//!
//! let panel = generate_sector_market(&SectorConfig::uniform(2, 3, 1.0, 0.1, 120, 7))?;
//! let returns = log_returns(&panel)?;
//! let dist = distance_matrix(&correlation_matrix(&returns)?);
//! let tree = minimum_spanning_tree(&dist)?;
//! assert_eq!(tree.edges().len(), 5);
//! # Ok::<(), corrtax::Error>(())
//! ```

pub mod cli;
pub mod corrnet;
pub mod dynamics;
mod matrix;
pub mod panel;
pub mod synth;
pub mod taxonomy;

use thiserror::Error;

/// Any error raised by the pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Panel(#[from] panel::PanelError),
    #[error(transparent)]
    Corr(#[from] corrnet::CorrError),
    #[error(transparent)]
    Taxonomy(#[from] taxonomy::TaxonomyError),
    #[error(transparent)]
    Dynamics(#[from] dynamics::DynamicsError),
    #[error(transparent)]
    Synth(#[from] synth::SynthError),
}

pub mod prelude {
    pub use crate::corrnet::{
        census, classify_pair, correlation_distance, correlation_matrix, distance_matrix, top_pairs, CorrelationCensus,
        CorrelationLevel, CorrelationMatrix, DistanceMatrix, RankedPair,
    };
    pub use crate::dynamics::{
        edge_survival, half_life_scaling, mean_half_life, rolling_trees, through_origin_fit, tree_half_life,
        HalfLifeEstimate, HalfLifeScaling, ScalingOptions, SurvivalCurve, WindowPlan,
    };
    pub use crate::panel::{log_returns, parse_panel, parse_returns, validate_panel, AssetId, ReturnPanel, SalesPanel};
    pub use crate::synth::{generate_competitive_market, generate_sector_market, CompetitionConfig, SectorConfig};
    pub use crate::taxonomy::{
        cophenetic, export_dot, export_json, export_newick, maximum_spanning_tree, minimum_spanning_tree,
        single_linkage, subdominant_ultrametric, Dendrogram, SpanningTree, UltrametricMatrix,
    };
}

//! Minimal spanning tree of a distance matrix, the subdominant ultrametric it
//! induces, single-linkage dendrograms, and DOT/JSON/Newick exports.
//!
//! The two routes to the hierarchy are independent: [`subdominant_ultrametric`]
//! reads maximum edge weights off MST paths, while [`cophenetic`] reads merge
//! heights off an agglomerative [`single_linkage`] run on the full matrix.
//! For any distance matrix both give the same ultrametric.

mod export;
mod linkage;
mod mst;
pub mod newick;

use thiserror::Error;

use crate::matrix::Labeled;
use crate::panel::AssetId;

pub use export::{export_dot, export_json, export_newick};
pub use linkage::{cophenetic, single_linkage, Dendrogram, Merge};
pub use mst::{maximum_spanning_tree, minimum_spanning_tree, subdominant_ultrametric, SpanningTree, TreeEdge};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TaxonomyError {
    #[error("need at least 2 assets, found {0}")]
    TooFewAssets(usize),
    #[error("invalid spanning tree: {0}")]
    InvalidTree(String),
    #[error("invalid dendrogram: {0}")]
    InvalidDendrogram(String),
    #[error("newick, byte {position}: {message}")]
    Newick { position: usize, message: String },
}

/// Symmetric zero-diagonal matrix satisfying the strong triangle inequality
/// `du[i][j] <= max(du[i][k], du[k][j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct UltrametricMatrix(Labeled);

impl UltrametricMatrix {
    pub(crate) fn from_data(assets: Vec<AssetId>, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), assets.len() * assets.len());
        UltrametricMatrix(Labeled { assets, data })
    }

    pub fn assets(&self) -> &[AssetId] {
        &self.0.assets
    }

    pub fn len(&self) -> usize {
        self.0.n()
    }

    pub fn is_empty(&self) -> bool {
        self.0.n() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.0.rows()
    }

    pub fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    /// `{"assets":[...],"du":[[...]]}`
    pub fn to_json(&self) -> String {
        self.0.to_json("du")
    }
}

/// Rank of every asset in lexicographic name order.
pub(crate) fn name_ranks(assets: &[AssetId]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..assets.len()).collect();
    order.sort_by(|&a, &b| assets[a].cmp(&assets[b]));
    let mut rank = vec![0; assets.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    rank
}

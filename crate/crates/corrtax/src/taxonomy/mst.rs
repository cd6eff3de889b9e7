use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::{name_ranks, TaxonomyError, UltrametricMatrix};
use crate::corrnet::{CorrelationMatrix, DistanceMatrix};
use crate::panel::AssetId;

/// Undirected weighted edge between asset indices, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

impl TreeEdge {
    pub fn new(a: usize, b: usize, weight: f64) -> Self {
        TreeEdge {
            a: a.min(b),
            b: a.max(b),
            weight,
        }
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.a, self.b)
    }
}

/// Spanning tree over a fixed asset list: `N - 1` edges, connected, acyclic.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    assets: Vec<AssetId>,
    edges: Vec<TreeEdge>,
}

impl SpanningTree {
    /// Checks edge count, index range and acyclicity (which together imply
    /// connectivity). Edge order is kept as given.
    pub fn new(assets: Vec<AssetId>, edges: Vec<TreeEdge>) -> Result<Self, TaxonomyError> {
        let n = assets.len();
        if n < 2 {
            return Err(TaxonomyError::TooFewAssets(n));
        }
        if edges.len() != n - 1 {
            return Err(TaxonomyError::InvalidTree(format!(
                "{} edges for {n} assets, expected {}",
                edges.len(),
                n - 1
            )));
        }
        let mut sets = UnionFind::new(n);
        for e in &edges {
            if e.a >= n || e.b >= n || e.a == e.b {
                return Err(TaxonomyError::InvalidTree(format!("bad edge ({}, {})", e.a, e.b)));
            }
            if !sets.union(e.a, e.b) {
                return Err(TaxonomyError::InvalidTree(format!(
                    "edge {}-{} closes a cycle",
                    assets[e.a], assets[e.b]
                )));
            }
        }
        let edges = edges.into_iter().map(|e| TreeEdge::new(e.a, e.b, e.weight)).collect();
        Ok(SpanningTree { assets, edges })
    }

    pub fn assets(&self) -> &[AssetId] {
        &self.assets
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    /// Sum of edge weights, accumulated in stored order.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Unordered endpoint pairs, weights ignored.
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges.iter().map(TreeEdge::endpoints).collect()
    }

    /// Endpoint names with the lexicographically smaller name first.
    pub fn named_edge(&self, e: &TreeEdge) -> (&AssetId, &AssetId) {
        let (x, y) = (&self.assets[e.a], &self.assets[e.b]);
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            // path halving
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Kruskal over the complete graph. Candidates are ordered by `by_weight`
/// and then by the lexicographic name pair, so tied weights resolve the same
/// way regardless of asset order.
fn kruskal(
    assets: &[AssetId],
    weight: impl Fn(usize, usize) -> f64,
    by_weight: impl Fn(f64, f64) -> Ordering,
) -> Result<SpanningTree, TaxonomyError> {
    let n = assets.len();
    if n < 2 {
        return Err(TaxonomyError::TooFewAssets(n));
    }
    let rank = name_ranks(assets);
    let pair_key = |e: &TreeEdge| {
        let (x, y) = (rank[e.a], rank[e.b]);
        (x.min(y), x.max(y))
    };
    let mut candidates: Vec<TreeEdge> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| TreeEdge::new(i, j, weight(i, j)))
        .collect();
    candidates.sort_by(|x, y| by_weight(x.weight, y.weight).then_with(|| pair_key(x).cmp(&pair_key(y))));

    let mut sets = UnionFind::new(n);
    let mut edges = Vec::with_capacity(n - 1);
    for e in candidates {
        if sets.union(e.a, e.b) {
            edges.push(e);
            if edges.len() == n - 1 {
                break;
            }
        }
    }
    Ok(SpanningTree {
        assets: assets.to_vec(),
        edges,
    })
}

/// Minimum spanning tree of the complete graph weighted by `dist`, edges in
/// ascending weight order (ties by lexicographic name pair).
pub fn minimum_spanning_tree(dist: &DistanceMatrix) -> Result<SpanningTree, TaxonomyError> {
    kruskal(dist.assets(), |i, j| dist.get(i, j), |x, y| x.total_cmp(&y))
}

/// Maximum spanning tree of the complete graph weighted by correlation.
/// Edge weights are the correlations, in descending order.
pub fn maximum_spanning_tree(corr: &CorrelationMatrix) -> Result<SpanningTree, TaxonomyError> {
    kruskal(corr.assets(), |i, j| corr.get(i, j), |x, y| y.total_cmp(&x))
}

/// `du[i][j]` is the largest edge weight on the tree path between `i` and `j`.
pub fn subdominant_ultrametric(tree: &SpanningTree) -> UltrametricMatrix {
    let n = tree.assets.len();
    let mut adjacent: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in &tree.edges {
        adjacent[e.a].push((e.b, e.weight));
        adjacent[e.b].push((e.a, e.weight));
    }
    let mut data = vec![0.0f64; n * n];
    let mut stack = Vec::with_capacity(n);
    for source in 0..n {
        let row = &mut data[source * n..(source + 1) * n];
        let mut seen = vec![false; n];
        seen[source] = true;
        stack.push(source);
        while let Some(v) = stack.pop() {
            for &(w, weight) in &adjacent[v] {
                if !seen[w] {
                    seen[w] = true;
                    row[w] = row[v].max(weight);
                    stack.push(w);
                }
            }
        }
    }
    UltrametricMatrix::from_data(tree.assets.clone(), data)
}

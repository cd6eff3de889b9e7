use super::{name_ranks, TaxonomyError, UltrametricMatrix};
use crate::corrnet::DistanceMatrix;
use crate::panel::AssetId;

/// One agglomeration step. Clusters `0..N` are the leaves; merge `k` creates
/// cluster `N + k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

/// Merge tree with non-decreasing heights.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    leaves: Vec<AssetId>,
    merges: Vec<Merge>,
}

impl Dendrogram {
    /// Validates a merge sequence: `N - 1` merges, each joining two clusters
    /// that exist and are still unmerged, with non-decreasing heights. Sizes
    /// are recomputed.
    pub fn from_merges(leaves: Vec<AssetId>, merges: Vec<Merge>) -> Result<Self, TaxonomyError> {
        let n = leaves.len();
        if n < 2 {
            return Err(TaxonomyError::TooFewAssets(n));
        }
        if merges.len() != n - 1 {
            return Err(TaxonomyError::InvalidDendrogram(format!(
                "{} merges for {n} leaves",
                merges.len()
            )));
        }
        let mut size = vec![1usize; n];
        let mut used = vec![false; 2 * n - 1];
        let mut out = Vec::with_capacity(n - 1);
        let mut last = f64::NEG_INFINITY;
        for (k, m) in merges.iter().enumerate() {
            let id = n + k;
            for c in [m.left, m.right] {
                if c >= id || used[c] {
                    return Err(TaxonomyError::InvalidDendrogram(format!(
                        "merge {k} reuses or forward-references cluster {c}"
                    )));
                }
                used[c] = true;
            }
            if m.left == m.right {
                return Err(TaxonomyError::InvalidDendrogram(format!(
                    "merge {k} joins a cluster with itself"
                )));
            }
            if !m.height.is_finite() || m.height < last {
                return Err(TaxonomyError::InvalidDendrogram(format!(
                    "merge {k} height {} decreases",
                    m.height
                )));
            }
            last = m.height;
            let s = size[m.left] + size[m.right];
            size.push(s);
            out.push(Merge { size: s, ..*m });
        }
        Ok(Dendrogram { leaves, merges: out })
    }

    pub fn leaves(&self) -> &[AssetId] {
        &self.leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Id of the final cluster.
    pub fn root(&self) -> usize {
        2 * self.leaves.len() - 2
    }

    /// Height of cluster `id`; leaves sit at 0.
    pub fn height(&self, id: usize) -> f64 {
        let n = self.leaves.len();
        if id < n {
            0.0
        } else {
            self.merges[id - n].height
        }
    }

    /// Children of an internal cluster.
    pub fn children(&self, id: usize) -> Option<(usize, usize)> {
        let n = self.leaves.len();
        (id >= n).then(|| {
            let m = &self.merges[id - n];
            (m.left, m.right)
        })
    }

    /// Leaf indices under every cluster id.
    pub(crate) fn members(&self) -> Vec<Vec<usize>> {
        let mut members: Vec<Vec<usize>> = (0..self.leaves.len()).map(|i| vec![i]).collect();
        for m in &self.merges {
            let mut joined = members[m.left].clone();
            joined.extend_from_slice(&members[m.right]);
            members.push(joined);
        }
        members
    }
}

/// Agglomerative single linkage on the full matrix. At each step the two
/// closest clusters merge at their minimum inter-cluster distance; among
/// equal distances the pair whose labels (smallest member name) are
/// lexicographically smallest wins. The lower-labelled cluster becomes
/// `left`.
pub fn single_linkage(dist: &DistanceMatrix) -> Result<Dendrogram, TaxonomyError> {
    let n = dist.len();
    if n < 2 {
        return Err(TaxonomyError::TooFewAssets(n));
    }
    let rank = name_ranks(dist.assets());
    // per slot: current cluster id and label rank; slot i starts as leaf i
    let mut cluster: Vec<Option<(usize, usize)>> = (0..n).map(|i| Some((i, rank[i]))).collect();
    let mut work: Vec<f64> = dist.rows().into_iter().flatten().collect();
    let mut merges = Vec::with_capacity(n - 1);
    let mut size = vec![1usize; n];

    for k in 0..n - 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for p in 0..n {
            let Some((_, lp)) = cluster[p] else { continue };
            for q in p + 1..n {
                let Some((_, lq)) = cluster[q] else { continue };
                let d = work[p * n + q];
                let label = (lp.min(lq), lp.max(lq));
                let better = match best {
                    None => true,
                    Some((bd, bl, _, _)) => d.total_cmp(&bd).then(label.cmp(&bl)).is_lt(),
                };
                if better {
                    best = Some((d, label, p, q));
                }
            }
        }
        let (height, _, p, q) = best.expect("at least two active clusters");
        let (idp, lp) = cluster[p].expect("active");
        let (idq, lq) = cluster[q].expect("active");
        let (left, right) = if lp < lq { (idp, idq) } else { (idq, idp) };
        let s = size[p] + size[q];
        merges.push(Merge {
            left,
            right,
            height,
            size: s,
        });
        // slot p carries the merged cluster
        for r in 0..n {
            if r != p && r != q && cluster[r].is_some() {
                let d = work[p * n + r].min(work[q * n + r]);
                work[p * n + r] = d;
                work[r * n + p] = d;
            }
        }
        cluster[p] = Some((n + k, lp.min(lq)));
        cluster[q] = None;
        size[p] = s;
    }
    Ok(Dendrogram {
        leaves: dist.assets().to_vec(),
        merges,
    })
}

/// `du[i][j]` is the height of the lowest merge joining `i` and `j`.
pub fn cophenetic(dendro: &Dendrogram) -> UltrametricMatrix {
    let n = dendro.leaves.len();
    let members = dendro.members();
    let mut data = vec![0.0; n * n];
    for m in &dendro.merges {
        for &i in &members[m.left] {
            for &j in &members[m.right] {
                data[i * n + j] = m.height;
                data[j * n + i] = m.height;
            }
        }
    }
    UltrametricMatrix::from_data(dendro.leaves.clone(), data)
}

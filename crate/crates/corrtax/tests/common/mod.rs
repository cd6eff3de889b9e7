//! Test-only oracles and random instance generators. Nothing here calls the
//! code paths it is used to check.

#![allow(dead_code)]

use chrono::{Duration, NaiveDate};
use corrtax::panel::asset_ids;
use corrtax::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(n: usize) -> Vec<AssetId> {
    asset_ids((0..n).map(|i| format!("X{i:02}"))).unwrap()
}

/// Random positive panel whose returns mix a few random factors (loadings of
/// either sign) with idiosyncratic noise.
pub fn random_panel(rng: &mut ChaCha8Rng, n: usize, t: usize) -> SalesPanel {
    let factors = rng.random_range(0..=3usize);
    let loadings: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..factors).map(|_| rng.random_range(-1.5..1.5)).collect())
        .collect();
    let noise_sd: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let start = NaiveDate::from_ymd_opt(2003, 5, 1).unwrap();
    let mut level: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..1000.0f64).ln()).collect();
    let mut values = Vec::with_capacity(n * t);
    values.extend(level.iter().map(|l| l.exp()));
    for _ in 1..t {
        let f: Vec<f64> = (0..factors).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        for i in 0..n {
            let common: f64 = loadings[i].iter().zip(&f).map(|(b, x)| b * x).sum();
            let e: f64 = rng.sample(StandardNormal);
            level[i] += 0.05 * (common + noise_sd[i] * e);
            values.push(level[i].exp());
        }
    }
    let dates = (0..t).map(|k| start + Duration::weeks(k as i64)).collect();
    SalesPanel::new(dates, names(n), values).unwrap()
}

pub fn random_distance_from_panel(rng: &mut ChaCha8Rng, n: usize, t: usize) -> (CorrelationMatrix, DistanceMatrix) {
    let panel = random_panel(rng, n, t);
    let corr = correlation_matrix(&log_returns(&panel).unwrap()).unwrap();
    let dist = distance_matrix(&corr);
    (corr, dist)
}

/// Arbitrary symmetric dissimilarity with values drawn from a small grid, so
/// ties are frequent.
#[allow(clippy::needless_range_loop)]
pub fn random_tied_dissimilarity(rng: &mut ChaCha8Rng, n: usize) -> DistanceMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.random_range(1..=4u32) as f64 * 0.25;
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    DistanceMatrix::from_rows(names(n), rows).unwrap()
}

/// Decodes a Prüfer sequence over `0..n` into the edges of a labelled tree.
pub fn prufer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Minimum total weight over all `n^(n-2)` labelled spanning trees. Each
/// tree's weight is summed in ascending order of its edge weights.
pub fn brute_force_min_tree_weight(weight: impl Fn(usize, usize) -> f64, n: usize) -> (f64, usize) {
    let len = n - 2;
    let total = n.pow(len as u32);
    let mut best = f64::INFINITY;
    let mut seq = vec![0usize; len];
    for code in 0..total {
        let mut c = code;
        for s in seq.iter_mut() {
            *s = c % n;
            c /= n;
        }
        let mut w: Vec<f64> = prufer_edges(&seq, n).iter().map(|&(a, b)| weight(a, b)).collect();
        w.sort_by(f64::total_cmp);
        best = best.min(w.iter().sum());
    }
    (best, total)
}

/// Largest violation of `d[i][j] <= d[i][k] + d[k][j]` over all triples.
pub fn worst_triangle_excess(n: usize, d: impl Fn(usize, usize) -> f64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                worst = worst.max(d(i, j) - (d(i, k) + d(k, j)));
            }
        }
    }
    worst
}

/// Largest violation of `u[i][j] <= max(u[i][k], u[k][j])` over all triples.
pub fn worst_ultrametric_excess(n: usize, u: impl Fn(usize, usize) -> f64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                worst = worst.max(u(i, j) - u(i, k).max(u(k, j)));
            }
        }
    }
    worst
}

/// Whether the tree edges with both endpoints in `members` span `members`.
pub fn induces_connected_subtree(tree: &SpanningTree, members: &[usize]) -> bool {
    let inside = tree
        .edges()
        .iter()
        .filter(|e| members.contains(&e.a) && members.contains(&e.b))
        .count();
    // tree edges are acyclic, so m - 1 internal edges connect all m members
    inside + 1 == members.len()
}

//! Pearson correlation matrix, correlation levels and their census, the
//! `sqrt(2 (1 - rho))` distance, and ranking of the most correlated pairs.

use serde::Serialize;
use thiserror::Error;

use crate::matrix::Labeled;
use crate::panel::{AssetId, ReturnPanel};

/// Largest `|rho| - 1` overshoot that is treated as rounding and clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrError {
    #[error("need at least 2 return rows, found {0}")]
    TooFewRows(usize),
    #[error("asset `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("asset `{asset}` has a non-finite return at row {row}")]
    NonFinite { asset: String, row: usize },
    #[error("correlation {value} for {a}/{b} lies outside [-1, 1]")]
    OutOfBounds { a: String, b: String, value: f64 },
    #[error("correlation {0} lies outside [-1, 1]")]
    InvalidRho(f64),
    #[error("requested {requested} pairs but only {available} exist")]
    TooManyPairs { requested: usize, available: usize },
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
}

/// Symmetric matrix of Pearson coefficients with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix(Labeled);

impl CorrelationMatrix {
    /// Builds a matrix from explicit rows. Cells must be exactly symmetric
    /// with a unit diagonal; off-diagonal cells outside `[-1, 1]` by more than
    /// [`CLAMP_TOLERANCE`] are rejected.
    pub fn from_rows(assets: Vec<AssetId>, rows: Vec<Vec<f64>>) -> Result<Self, CorrError> {
        let m = labeled_from_rows(assets, rows)?;
        Self::from_labeled(m)
    }

    /// Reads the CSV layout written by [`CorrelationMatrix::to_csv`].
    pub fn parse_csv(text: &str) -> Result<Self, CorrError> {
        Self::from_labeled(Labeled::parse_csv(text).map_err(CorrError::InvalidMatrix)?)
    }

    fn from_labeled(mut m: Labeled) -> Result<Self, CorrError> {
        if let Some((i, j)) = m.asymmetry() {
            return Err(CorrError::InvalidMatrix(format!(
                "not symmetric at ({}, {})",
                m.assets[i], m.assets[j]
            )));
        }
        let n = m.n();
        for i in 0..n {
            if m.get(i, i) != 1.0 {
                return Err(CorrError::InvalidMatrix(format!(
                    "diagonal entry of `{}` is not 1",
                    m.assets[i]
                )));
            }
            for j in 0..n {
                let v = clamp_rho(m.get(i, j)).ok_or_else(|| CorrError::OutOfBounds {
                    a: m.assets[i].to_string(),
                    b: m.assets[j].to_string(),
                    value: m.get(i, j),
                })?;
                m.data[i * n + j] = v;
            }
        }
        Ok(CorrelationMatrix(m))
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

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.index_of(name)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.0.rows()
    }

    /// Number of unordered off-diagonal pairs, `n (n - 1) / 2`.
    pub fn pair_count(&self) -> usize {
        pair_count(self.len())
    }

    pub fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    /// `{"assets":[...],"rho":[[...]]}`
    pub fn to_json(&self) -> String {
        self.0.to_json("rho")
    }
}

pub(crate) fn labeled_from_rows(assets: Vec<AssetId>, rows: Vec<Vec<f64>>) -> Result<Labeled, CorrError> {
    let n = assets.len();
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CorrError::InvalidMatrix(format!("expected a {n}x{n} grid")));
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = assets.iter().find(|a| !seen.insert(*a)) {
        return Err(CorrError::InvalidMatrix(format!("duplicate asset `{dup}`")));
    }
    Ok(Labeled {
        assets,
        data: rows.into_iter().flatten().collect(),
    })
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn clamp_rho(v: f64) -> Option<f64> {
    if v.abs() <= 1.0 {
        Some(v)
    } else if v.abs() <= 1.0 + CLAMP_TOLERANCE {
        Some(v.signum())
    } else {
        None
    }
}

/// Pearson correlation of every pair of columns, using temporal averages over
/// all rows. Columns are centred first (two-pass) before accumulating.
pub fn correlation_matrix(returns: &ReturnPanel) -> Result<CorrelationMatrix, CorrError> {
    let rows = returns.len();
    if rows < 2 {
        return Err(CorrError::TooFewRows(rows));
    }
    let n = returns.asset_count();
    let mut centred: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut sums = Vec::with_capacity(n);
    for i in 0..n {
        let col: Vec<f64> = returns.column(i).collect();
        if let Some(row) = col.iter().position(|v| !v.is_finite()) {
            return Err(CorrError::NonFinite {
                asset: returns.assets()[i].to_string(),
                row,
            });
        }
        let mean = col.iter().sum::<f64>() / rows as f64;
        let dev: Vec<f64> = col.iter().map(|v| v - mean).collect();
        let ss: f64 = dev.iter().map(|d| d * d).sum();
        let scale = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // deviations at the level of rounding noise in the mean
        let noise = 4.0 * f64::EPSILON * scale;
        if ss <= rows as f64 * noise * noise {
            return Err(CorrError::ZeroVariance(returns.assets()[i].to_string()));
        }
        centred.push(dev);
        sums.push(ss);
    }

    let mut data = vec![0.0; n * n];
    for i in 0..n {
        data[i * n + i] = 1.0;
        for j in i + 1..n {
            let sxy: f64 = centred[i].iter().zip(&centred[j]).map(|(a, b)| a * b).sum();
            // sqrt(s * s) == s exactly, so identical columns give exactly 1
            let raw = sxy / (sums[i] * sums[j]).sqrt();
            let rho = clamp_rho(raw).ok_or_else(|| CorrError::OutOfBounds {
                a: returns.assets()[i].to_string(),
                b: returns.assets()[j].to_string(),
                value: raw,
            })?;
            data[i * n + j] = rho;
            data[j * n + i] = rho;
        }
    }
    Ok(CorrelationMatrix(Labeled {
        assets: returns.assets().to_vec(),
        data,
    }))
}

/// Three-way classification of a pair's correlation, on half-open intervals:
/// strong `[1/2, 1]`, weak `[0, 1/2)`, negative `[-1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationLevel {
    Strong,
    Weak,
    Negative,
}

pub fn classify_pair(rho: f64) -> Result<CorrelationLevel, CorrError> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(CorrError::InvalidRho(rho));
    }
    Ok(if rho >= 0.5 {
        CorrelationLevel::Strong
    } else if rho >= 0.0 {
        CorrelationLevel::Weak
    } else {
        CorrelationLevel::Negative
    })
}

/// Counts of strongly, weakly and negatively correlated pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CorrelationCensus {
    pub strong: usize,
    pub weak: usize,
    pub negative: usize,
}

impl CorrelationCensus {
    pub fn pairs(&self) -> usize {
        self.strong + self.weak + self.negative
    }

    /// `{"strong":s,"weak":w,"negative":g,"pairs":p}`
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc {
            strong: usize,
            weak: usize,
            negative: usize,
            pairs: usize,
        }
        serde_json::to_string(&Doc {
            strong: self.strong,
            weak: self.weak,
            negative: self.negative,
            pairs: self.pairs(),
        })
        .expect("plain integers")
    }
}

pub fn census(corr: &CorrelationMatrix) -> CorrelationCensus {
    let mut out = CorrelationCensus::default();
    let n = corr.len();
    for i in 0..n {
        for j in i + 1..n {
            match classify_pair(corr.get(i, j)).expect("matrix cells are bounded") {
                CorrelationLevel::Strong => out.strong += 1,
                CorrelationLevel::Weak => out.weak += 1,
                CorrelationLevel::Negative => out.negative += 1,
            }
        }
    }
    out
}

/// `sqrt(2 (1 - rho))`, in `[0, 2]` for `rho` in `[-1, 1]`.
pub fn correlation_distance(rho: f64) -> f64 {
    (2.0 * (1.0 - rho)).max(0.0).sqrt()
}

/// Symmetric, zero-diagonal, non-negative dissimilarity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix(Labeled);

impl DistanceMatrix {
    /// Builds a dissimilarity matrix from explicit rows: finite, non-negative,
    /// exactly symmetric, zero diagonal. No upper bound or triangle inequality
    /// is required, so monotone transforms of a metric are representable.
    pub fn from_rows(assets: Vec<AssetId>, rows: Vec<Vec<f64>>) -> Result<Self, CorrError> {
        let m = labeled_from_rows(assets, rows)?;
        if let Some((i, j)) = m.asymmetry() {
            return Err(CorrError::InvalidMatrix(format!(
                "not symmetric at ({}, {})",
                m.assets[i], m.assets[j]
            )));
        }
        for i in 0..m.n() {
            if m.get(i, i) != 0.0 {
                return Err(CorrError::InvalidMatrix(format!(
                    "diagonal entry of `{}` is not 0",
                    m.assets[i]
                )));
            }
        }
        if m.data.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(CorrError::InvalidMatrix(
                "distances must be finite and non-negative".into(),
            ));
        }
        Ok(DistanceMatrix(m))
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

    /// Applies `f` to every off-diagonal cell.
    pub fn map_off_diagonal(&self, f: impl Fn(f64) -> f64) -> Result<DistanceMatrix, CorrError> {
        let n = self.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { f(self.get(i, j)) }).collect())
            .collect();
        DistanceMatrix::from_rows(self.assets().to_vec(), rows)
    }

    pub fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    /// `{"assets":[...],"d":[[...]]}`
    pub fn to_json(&self) -> String {
        self.0.to_json("d")
    }
}

/// Elementwise `sqrt(2 (1 - rho))` with an exact zero diagonal.
pub fn distance_matrix(corr: &CorrelationMatrix) -> DistanceMatrix {
    let assets = corr.assets().to_vec();
    DistanceMatrix(Labeled::from_fn(assets, |i, j| {
        if i == j {
            0.0
        } else {
            correlation_distance(corr.get(i, j))
        }
    }))
}

/// One entry of the strongest-pairs listing; `first < second` by name.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedPair {
    pub first: AssetId,
    pub second: AssetId,
    pub rho: f64,
    pub distance: f64,
}

/// The `k` most correlated unordered pairs, by `rho` descending and then by
/// lexicographic pair order.
pub fn top_pairs(corr: &CorrelationMatrix, k: usize) -> Result<Vec<RankedPair>, CorrError> {
    let available = corr.pair_count();
    if k > available {
        return Err(CorrError::TooManyPairs {
            requested: k,
            available,
        });
    }
    let assets = corr.assets();
    let mut pairs: Vec<RankedPair> = Vec::with_capacity(available);
    for i in 0..assets.len() {
        for j in i + 1..assets.len() {
            let (first, second) = if assets[i] <= assets[j] { (i, j) } else { (j, i) };
            let rho = corr.get(i, j);
            pairs.push(RankedPair {
                first: assets[first].clone(),
                second: assets[second].clone(),
                rho,
                distance: correlation_distance(rho),
            });
        }
    }
    pairs.sort_by(|a, b| {
        b.rho
            .total_cmp(&a.rho)
            .then_with(|| (&a.first, &a.second).cmp(&(&b.first, &b.second)))
    });
    pairs.truncate(k);
    Ok(pairs)
}

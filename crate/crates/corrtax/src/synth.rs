//! Seeded synthetic panels with known structure.
//!
//! Both generators draw from a single [`ChaCha8Rng`] stream seeded with
//! `seed_from_u64(seed)`, so a given config always produces the same panel.
//! Normal variates come from `rand_distr::StandardNormal` (ziggurat) and
//! gamma variates from `rand_distr::Gamma` (Marsaglia-Tsang).
//!
//! * [`generate_sector_market`] plants sector factors: each asset's log-return
//!   is `loading * factor[sector] + noise_sd * noise[asset]`. Draw order is
//!   column-major: every sector's factor series in sector order, then every
//!   asset's noise series in asset order.
//! * [`generate_competitive_market`] keeps a fixed weekly total and moves
//!   market share between assets. Each week the shares become
//!   `(1 - churn) * previous + churn * fresh`, where `fresh` is a symmetric
//!   Dirichlet draw (normalised gammas), then each share is floored at
//!   [`SHARE_FLOOR`] and the vector is renormalised. Draws are week-major:
//!   the initial shares first, then one Dirichlet draw per later week.

use chrono::{Duration, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::panel::{asset_ids, SalesPanel};

/// Lower bound applied to every market share before renormalisation.
pub const SHARE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("generated value for `{asset}` at week {week} is not a positive finite number")]
    Degenerate { asset: String, week: usize },
}

fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2003, 5, 1).expect("valid date")
}

fn default_concentration() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub label: String,
    pub members: usize,
    /// Factor loading, `>= 0`.
    pub loading: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorConfig {
    pub sectors: Vec<Sector>,
    /// Number of weekly observations.
    pub weeks: usize,
    pub noise_sd: f64,
    pub initial_sales: f64,
    pub seed: u64,
    #[serde(default = "default_start")]
    pub start: NaiveDate,
}

impl SectorConfig {
    /// `count` equally sized sectors `S1, S2, ...` sharing one loading.
    pub fn uniform(count: usize, members: usize, loading: f64, noise_sd: f64, weeks: usize, seed: u64) -> Self {
        SectorConfig {
            sectors: (1..=count)
                .map(|k| Sector {
                    label: format!("S{k}"),
                    members,
                    loading,
                })
                .collect(),
            weeks,
            noise_sd,
            initial_sales: 10_000.0,
            seed,
            start: default_start(),
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidConfig(m));
        if self.sectors.iter().map(|s| s.members).sum::<usize>() < 2 {
            return bad("at least 2 assets in total are required".into());
        }
        if self.weeks < 3 {
            return bad(format!("weeks must be at least 3, got {}", self.weeks));
        }
        if !(self.noise_sd > 0.0 && self.noise_sd.is_finite()) {
            return bad(format!("noise_sd must be positive, got {}", self.noise_sd));
        }
        if !(self.initial_sales > 0.0 && self.initial_sales.is_finite()) {
            return bad(format!("initial_sales must be positive, got {}", self.initial_sales));
        }
        for s in &self.sectors {
            if s.label.is_empty() {
                return bad("sector label must not be empty".into());
            }
            if !(s.loading >= 0.0 && s.loading.is_finite()) {
                return bad(format!("sector `{}` loading must be >= 0, got {}", s.label, s.loading));
            }
        }
        Ok(())
    }

    /// Asset names (`<label>-<k>`) grouped by sector, in generation order.
    pub fn asset_names(&self) -> Vec<String> {
        self.sectors
            .iter()
            .flat_map(|s| (1..=s.members).map(move |k| format!("{}-{k:02}", s.label)))
            .collect()
    }

    /// Sector index of every generated asset.
    pub fn sector_of_assets(&self) -> Vec<usize> {
        self.sectors
            .iter()
            .enumerate()
            .flat_map(|(g, s)| std::iter::repeat_n(g, s.members))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitionConfig {
    pub assets: usize,
    pub weeks: usize,
    pub total_sales: f64,
    /// Share of the market reallocated each week, in `(0, 1)`.
    pub churn: f64,
    pub seed: u64,
    /// Dirichlet concentration of the weekly reallocation draw.
    #[serde(default = "default_concentration")]
    pub concentration: f64,
    #[serde(default = "default_start")]
    pub start: NaiveDate,
}

impl CompetitionConfig {
    pub fn new(assets: usize, weeks: usize, churn: f64, seed: u64) -> Self {
        CompetitionConfig {
            assets,
            weeks,
            total_sales: 1_000_000.0,
            churn,
            seed,
            concentration: default_concentration(),
            start: default_start(),
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidConfig(m));
        if self.assets < 2 {
            return bad(format!("at least 2 assets are required, got {}", self.assets));
        }
        if self.weeks < 3 {
            return bad(format!("weeks must be at least 3, got {}", self.weeks));
        }
        if !(self.total_sales > 0.0 && self.total_sales.is_finite()) {
            return bad(format!("total_sales must be positive, got {}", self.total_sales));
        }
        if !(self.churn > 0.0 && self.churn < 1.0) {
            return bad(format!("churn must lie in (0, 1), got {}", self.churn));
        }
        if !(self.concentration > 0.0 && self.concentration.is_finite()) {
            return bad(format!("concentration must be positive, got {}", self.concentration));
        }
        Ok(())
    }

    pub fn asset_names(&self) -> Vec<String> {
        let digits = self.assets.to_string().len().max(2);
        (1..=self.assets).map(|k| format!("artist-{k:0digits$}")).collect()
    }
}

fn weekly_dates(start: NaiveDate, weeks: usize) -> Vec<NaiveDate> {
    (0..weeks).map(|k| start + Duration::weeks(k as i64)).collect()
}

fn normals(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

fn check_positive(values: &[f64], names: &[String]) -> Result<(), SynthError> {
    let n = names.len();
    match values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        Some(k) => Err(SynthError::Degenerate {
            asset: names[k % n].clone(),
            week: k / n,
        }),
        None => Ok(()),
    }
}

/// Sector factor model; see the module docs for the draw order.
pub fn generate_sector_market(config: &SectorConfig) -> Result<SalesPanel, SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let steps = config.weeks - 1;
    let factors: Vec<Vec<f64>> = config.sectors.iter().map(|_| normals(&mut rng, steps)).collect();
    let sector_of = config.sector_of_assets();
    let noise: Vec<Vec<f64>> = sector_of.iter().map(|_| normals(&mut rng, steps)).collect();

    let n = sector_of.len();
    let mut values = vec![0.0; config.weeks * n];
    for (i, &g) in sector_of.iter().enumerate() {
        let loading = config.sectors[g].loading;
        let mut log_level = config.initial_sales.ln();
        values[i] = config.initial_sales;
        for t in 0..steps {
            log_level += loading * factors[g][t] + config.noise_sd * noise[i][t];
            values[(t + 1) * n + i] = log_level.exp();
        }
    }
    let names = config.asset_names();
    check_positive(&values, &names)?;
    let assets = asset_ids(names).map_err(|e| SynthError::InvalidConfig(e.to_string()))?;
    SalesPanel::new(weekly_dates(config.start, config.weeks), assets, values)
        .map_err(|e| SynthError::InvalidConfig(e.to_string()))
}

fn dirichlet(rng: &mut ChaCha8Rng, gamma: &Gamma<f64>, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
    normalise(draws)
}

fn normalise(mut shares: Vec<f64>) -> Vec<f64> {
    shares.iter_mut().for_each(|s| *s = s.max(SHARE_FLOOR));
    let total: f64 = shares.iter().sum();
    shares.iter_mut().for_each(|s| *s /= total);
    shares
}

/// Share-reallocation model with a conserved weekly total; see the module
/// docs for the update rule.
pub fn generate_competitive_market(config: &CompetitionConfig) -> Result<SalesPanel, SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let gamma =
        Gamma::new(config.concentration, 1.0).map_err(|e| SynthError::InvalidConfig(format!("concentration: {e}")))?;
    let n = config.assets;
    let mut shares = dirichlet(&mut rng, &gamma, n);
    let mut values = Vec::with_capacity(config.weeks * n);
    values.extend(shares.iter().map(|s| s * config.total_sales));
    for _ in 1..config.weeks {
        let fresh = dirichlet(&mut rng, &gamma, n);
        let mixed = shares
            .iter()
            .zip(&fresh)
            .map(|(old, new)| (1.0 - config.churn) * old + config.churn * new)
            .collect();
        shares = normalise(mixed);
        values.extend(shares.iter().map(|s| s * config.total_sales));
    }
    let names = config.asset_names();
    check_positive(&values, &names)?;
    let assets = asset_ids(names).map_err(|e| SynthError::InvalidConfig(e.to_string()))?;
    SalesPanel::new(weekly_dates(config.start, config.weeks), assets, values)
        .map_err(|e| SynthError::InvalidConfig(e.to_string()))
}

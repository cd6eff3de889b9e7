//! Rolling-window spanning trees and their durability.
//!
//! A window of `width` return rows is slid over the panel in strides of
//! `step` rows; each position yields one MST. The survival curve of an origin
//! tree counts how many of its edges are still present `tau` windows later,
//! and the tree half-life is the first (interpolated) lag at which that
//! fraction falls to one half. Repeating this for several widths and fitting
//! `half_life = slope * width` through the origin gives the scaling law.

use std::collections::BTreeSet;
use std::fmt::Write;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corrnet::{correlation_matrix, distance_matrix, CorrError};
use crate::panel::{AssetId, PanelError, ReturnPanel};
use crate::taxonomy::{minimum_spanning_tree, SpanningTree, TaxonomyError};

/// Widths above this many weeks are excluded from the linear fit by default.
pub const DEFAULT_MAX_FIT_WEEKS: f64 = 52.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("window width {0} is below the minimum of 2")]
    WidthTooSmall(usize),
    #[error("window step must be at least 1")]
    ZeroStep,
    #[error("window width {width} exceeds the {rows} available return rows")]
    WidthTooLarge { width: usize, rows: usize },
    #[error("window {window} (rows {start}..{end}): {source}")]
    Window {
        window: usize,
        start: usize,
        end: usize,
        source: CorrError,
    },
    #[error(transparent)]
    Panel(#[from] PanelError),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error("origin {origin} out of range for {trees} trees")]
    OriginOutOfRange { origin: usize, trees: usize },
    #[error("trees span different asset lists")]
    AssetMismatch,
    #[error("need at least 2 trees, found {0}")]
    TooFewTrees(usize),
    #[error("need at least 2 widths, found {0}")]
    TooFewWidths(usize),
    #[error("only {0} defined half-life points inside the fit range; at least 2 required")]
    TooFewPoints(usize),
    #[error("step duration must be positive and finite, got {0}")]
    BadDuration(f64),
}

/// Window width and stride, both in return observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowPlan {
    pub width: usize,
    pub step: usize,
}

impl WindowPlan {
    pub fn new(width: usize, step: usize, rows: usize) -> Result<Self, DynamicsError> {
        if width < 2 {
            return Err(DynamicsError::WidthTooSmall(width));
        }
        if step == 0 {
            return Err(DynamicsError::ZeroStep);
        }
        if width > rows {
            return Err(DynamicsError::WidthTooLarge { width, rows });
        }
        Ok(WindowPlan { width, step })
    }

    /// `floor((rows - width) / step) + 1`.
    pub fn window_count(&self, rows: usize) -> usize {
        if self.width > rows {
            0
        } else {
            (rows - self.width) / self.step + 1
        }
    }

    pub fn starts(&self, rows: usize) -> impl Iterator<Item = usize> {
        let step = self.step;
        (0..self.window_count(rows)).map(move |k| k * step)
    }
}

/// One MST per window position, ordered by window start. Windows are
/// evaluated in parallel; each is a pure function of its slice.
pub fn rolling_trees(returns: &ReturnPanel, plan: &WindowPlan) -> Result<Vec<SpanningTree>, DynamicsError> {
    let plan = WindowPlan::new(plan.width, plan.step, returns.len())?;
    let starts: Vec<usize> = plan.starts(returns.len()).collect();
    starts
        .par_iter()
        .enumerate()
        .map(|(window, &start)| {
            let slice = returns.slice_window(start, plan.width)?;
            let corr = correlation_matrix(&slice).map_err(|source| DynamicsError::Window {
                window,
                start,
                end: start + plan.width,
                source,
            })?;
            Ok(minimum_spanning_tree(&distance_matrix(&corr))?)
        })
        .collect()
}

/// Fraction of an origin tree's edges still present at each later lag.
/// `fraction[0]` is always 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalCurve {
    pub origin: usize,
    pub fraction: Vec<f64>,
}

impl SurvivalCurve {
    pub fn from_fractions(fraction: Vec<f64>) -> Self {
        SurvivalCurve { origin: 0, fraction }
    }

    pub fn lags(&self) -> impl Iterator<Item = usize> {
        0..self.fraction.len()
    }

    /// `lag,fraction` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lag,fraction\n");
        for (lag, f) in self.fraction.iter().enumerate() {
            writeln!(out, "{lag},{f}").unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "origin": self.origin,
            "lags": self.lags().collect::<Vec<_>>(),
            "fraction": self.fraction,
        })
        .to_string()
    }
}

fn same_assets(trees: &[SpanningTree]) -> Result<&[AssetId], DynamicsError> {
    let first = trees.first().map(SpanningTree::assets).unwrap_or(&[]);
    if trees.iter().any(|t| t.assets() != first) {
        return Err(DynamicsError::AssetMismatch);
    }
    Ok(first)
}

/// Compares unordered endpoint pairs only; weight changes are not decay.
pub fn edge_survival(trees: &[SpanningTree], origin: usize) -> Result<SurvivalCurve, DynamicsError> {
    if origin >= trees.len() {
        return Err(DynamicsError::OriginOutOfRange {
            origin,
            trees: trees.len(),
        });
    }
    same_assets(trees)?;
    let initial: BTreeSet<(usize, usize)> = trees[origin].edge_set();
    let total = initial.len() as f64;
    let fraction = trees[origin..]
        .iter()
        .map(|t| {
            let kept = t.edges().iter().filter(|e| initial.contains(&e.endpoints())).count();
            kept as f64 / total
        })
        .collect();
    Ok(SurvivalCurve { origin, fraction })
}

/// Tree half-life in time units, `None` when the curve never falls to 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfLifeEstimate {
    pub half_life: Option<f64>,
    /// Number of origins whose curves reached 1/2 and entered the estimate.
    pub origin_count: usize,
}

impl HalfLifeEstimate {
    pub fn is_defined(&self) -> bool {
        self.half_life.is_some()
    }
}

/// First lag at which the surviving fraction is at most 1/2, linearly
/// interpolated between the bracketing lags and scaled by `step_duration`.
pub fn tree_half_life(curve: &SurvivalCurve, step_duration: f64) -> HalfLifeEstimate {
    let f = &curve.fraction;
    let crossing = (1..f.len()).find(|&k| f[k] <= 0.5);
    let half_life = crossing.map(|k| {
        let (hi, lo) = (f[k - 1], f[k]);
        // f[k-1] > 1/2 >= f[k]
        let frac = (hi - 0.5) / (hi - lo);
        ((k - 1) as f64 + frac) * step_duration
    });
    HalfLifeEstimate {
        half_life,
        origin_count: usize::from(half_life.is_some()),
    }
}

/// Mean of the defined half-lives over every origin with at least one later
/// window.
pub fn mean_half_life(trees: &[SpanningTree], step_duration: f64) -> Result<HalfLifeEstimate, DynamicsError> {
    if trees.len() < 2 {
        return Err(DynamicsError::TooFewTrees(trees.len()));
    }
    if !(step_duration > 0.0 && step_duration.is_finite()) {
        return Err(DynamicsError::BadDuration(step_duration));
    }
    let mut sum = 0.0;
    let mut count = 0;
    for origin in 0..trees.len() - 1 {
        if let Some(h) = tree_half_life(&edge_survival(trees, origin)?, step_duration).half_life {
            sum += h;
            count += 1;
        }
    }
    Ok(HalfLifeEstimate {
        half_life: (count > 0).then(|| sum / count as f64),
        origin_count: count,
    })
}

/// Least-squares slope of `y = slope * x` and the residuals `y - slope * x`.
pub fn through_origin_fit(points: &[(f64, f64)]) -> (f64, Vec<f64>) {
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let slope = sxy / sxx;
    let residuals = points.iter().map(|(x, y)| y - slope * x).collect();
    (slope, residuals)
}

/// Half-life against window width, with the through-origin slope fitted on
/// the widths inside the fit range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfLifeScaling {
    /// Window widths in time units.
    pub widths: Vec<f64>,
    /// Mean half-life per width, in time units.
    pub half_lives: Vec<Option<f64>>,
    pub origin_counts: Vec<usize>,
    pub slope: f64,
    /// `(width, residual)` for every point used in the fit.
    pub residuals: Vec<(f64, f64)>,
}

impl HalfLifeScaling {
    /// `width,half_life`; undefined half-lives are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("width,half_life\n");
        for (w, h) in self.widths.iter().zip(&self.half_lives) {
            match h {
                Some(h) => writeln!(out, "{w},{h}").unwrap(),
                None => writeln!(out, "{w},").unwrap(),
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite values")
    }

    /// Two whitespace-separated columns for gnuplot; the fitted line is
    /// recorded in a comment header and undefined points are skipped.
    pub fn plot_data(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# tree half-life vs window width").unwrap();
        writeln!(out, "# fit: half_life = {} * width", self.slope).unwrap();
        writeln!(out, "# width half_life").unwrap();
        for (w, h) in self.widths.iter().zip(&self.half_lives) {
            if let Some(h) = h {
                writeln!(out, "{w} {h}").unwrap();
            }
        }
        out
    }
}

/// Options for [`half_life_scaling`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingOptions {
    /// Stride between windows, in observations.
    pub step: usize,
    /// Time covered by one observation (weeks for weekly charts).
    pub observation_duration: f64,
    /// Widths longer than this (in time units) are reported but not fitted.
    pub max_fit_width: f64,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        ScalingOptions {
            step: 1,
            observation_duration: 1.0,
            max_fit_width: DEFAULT_MAX_FIT_WEEKS,
        }
    }
}

/// Mean tree half-life for each window width (in observations), then the
/// through-origin slope over the widths with a defined half-life inside the
/// fit range. Widths and half-lives are reported in time units: a width of
/// `w` observations spans `w * observation_duration`, and one lag spans
/// `step * observation_duration`.
pub fn half_life_scaling(
    returns: &ReturnPanel,
    widths: &[usize],
    options: &ScalingOptions,
) -> Result<HalfLifeScaling, DynamicsError> {
    if widths.len() < 2 {
        return Err(DynamicsError::TooFewWidths(widths.len()));
    }
    let unit = options.observation_duration;
    if !(unit > 0.0 && unit.is_finite()) {
        return Err(DynamicsError::BadDuration(unit));
    }
    let lag_duration = options.step as f64 * unit;
    let mut scaled_widths = Vec::with_capacity(widths.len());
    let mut half_lives = Vec::with_capacity(widths.len());
    let mut origin_counts = Vec::with_capacity(widths.len());
    for &width in widths {
        let plan = WindowPlan::new(width, options.step, returns.len())?;
        let trees = rolling_trees(returns, &plan)?;
        let estimate = if trees.len() < 2 {
            HalfLifeEstimate {
                half_life: None,
                origin_count: 0,
            }
        } else {
            mean_half_life(&trees, lag_duration)?
        };
        scaled_widths.push(width as f64 * unit);
        half_lives.push(estimate.half_life);
        origin_counts.push(estimate.origin_count);
    }
    let points: Vec<(f64, f64)> = scaled_widths
        .iter()
        .zip(&half_lives)
        .filter_map(|(&w, h)| h.filter(|_| w <= options.max_fit_width).map(|h| (w, h)))
        .collect();
    if points.len() < 2 {
        return Err(DynamicsError::TooFewPoints(points.len()));
    }
    let (slope, residuals) = through_origin_fit(&points);
    Ok(HalfLifeScaling {
        widths: scaled_widths,
        half_lives,
        origin_counts,
        slope,
        residuals: points.iter().map(|p| p.0).zip(residuals).collect(),
    })
}

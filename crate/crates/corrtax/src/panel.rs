//! Dated panels of weekly observations and their log-returns.
//!
//! A [`SalesPanel`] is a rectangular grid of strictly positive values, one
//! column per asset and one row per (strictly increasing) date. It is turned
//! into a [`ReturnPanel`] by [`log_returns`], and windows of the return panel
//! are cut with [`ReturnPanel::slice_window`].

use std::collections::HashSet;
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum number of observations needed for an analysable panel
/// (two return rows).
pub const MIN_PANEL_LENGTH: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PanelError {
    #[error("panel is empty")]
    Empty,
    #[error("first header column must be `date`, found `{0}`")]
    BadHeader(String),
    #[error("asset name must not be empty (column {column})")]
    EmptyAssetName { column: usize },
    #[error("duplicate asset name `{0}`")]
    DuplicateAsset(String),
    #[error("line {line}: cannot parse date `{text}` (expected YYYY-MM-DD)")]
    BadDate { line: usize, text: String },
    #[error("line {line}: date {date} does not follow {previous}")]
    NonIncreasingDate {
        line: usize,
        previous: NaiveDate,
        date: NaiveDate,
    },
    #[error("line {line}: non-numeric value `{text}` for asset `{asset}`")]
    NonNumeric { line: usize, asset: String, text: String },
    #[error("line {line}: expected {expected} cells, found {found}")]
    Ragged { line: usize, expected: usize, found: usize },
    #[error("non-positive value {value} for asset `{asset}` on {date} (observation {observation})")]
    NonPositive {
        asset: String,
        date: NaiveDate,
        /// 1-based row number within the panel.
        observation: usize,
        value: f64,
    },
    #[error("panel has {len} observations, at least {min} required")]
    TooShort { len: usize, min: usize },
    #[error("values grid has {found} cells, expected {rows}x{cols}")]
    Shape { rows: usize, cols: usize, found: usize },
    #[error("window [{start}, {start}+{width}) exceeds {rows} return rows")]
    WindowOutOfRange { start: usize, width: usize, rows: usize },
    #[error("window width {0} is below the minimum of 2")]
    WindowTooNarrow(usize),
    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for PanelError {
    fn from(e: csv::Error) -> Self {
        PanelError::Csv(e.to_string())
    }
}

/// Non-empty asset label. Ordering is lexicographic on the name and is used
/// for every deterministic tie-break downstream.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AssetId(String);

impl AssetId {
    pub fn new(name: impl Into<String>) -> Option<Self> {
        let name = name.into();
        if name.is_empty() {
            None
        } else {
            Some(AssetId(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for AssetId {
    type Error = &'static str;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        AssetId::new(value).ok_or("asset name must not be empty")
    }
}

impl From<AssetId> for String {
    fn from(id: AssetId) -> Self {
        id.0
    }
}

impl fmt::Display for AssetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Builds asset ids from names, rejecting empty and duplicate names.
pub fn asset_ids<I, S>(names: I) -> Result<Vec<AssetId>, PanelError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (column, name) in names.into_iter().enumerate() {
        let id = AssetId::new(name).ok_or(PanelError::EmptyAssetName { column })?;
        if !seen.insert(id.clone()) {
            return Err(PanelError::DuplicateAsset(id.0));
        }
        out.push(id);
    }
    Ok(out)
}

/// Row-major dated grid shared by sales and return panels.
#[derive(Debug, Clone, PartialEq)]
struct Grid {
    dates: Vec<NaiveDate>,
    assets: Vec<AssetId>,
    values: Vec<f64>,
}

impl Grid {
    fn new(dates: Vec<NaiveDate>, assets: Vec<AssetId>, values: Vec<f64>) -> Result<Self, PanelError> {
        if dates.is_empty() || assets.is_empty() {
            return Err(PanelError::Empty);
        }
        if values.len() != dates.len() * assets.len() {
            return Err(PanelError::Shape {
                rows: dates.len(),
                cols: assets.len(),
                found: values.len(),
            });
        }
        let mut seen = HashSet::new();
        for a in &assets {
            if !seen.insert(a) {
                return Err(PanelError::DuplicateAsset(a.to_string()));
            }
        }
        for (k, pair) in dates.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return Err(PanelError::NonIncreasingDate {
                    line: k + 3,
                    previous: pair[0],
                    date: pair[1],
                });
            }
        }
        Ok(Grid { dates, assets, values })
    }

    fn rows(&self) -> usize {
        self.dates.len()
    }

    fn cols(&self) -> usize {
        self.assets.len()
    }

    fn get(&self, t: usize, i: usize) -> f64 {
        self.values[t * self.cols() + i]
    }

    fn row(&self, t: usize) -> &[f64] {
        let n = self.cols();
        &self.values[t * n..(t + 1) * n]
    }

    fn column(&self, i: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().skip(i).step_by(self.cols()).copied()
    }

    fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut header = vec!["date".to_string()];
        header.extend(self.assets.iter().map(|a| a.to_string()));
        w.write_record(&header).expect("in-memory write");
        for t in 0..self.rows() {
            let mut record = vec![self.dates[t].format("%Y-%m-%d").to_string()];
            record.extend(self.row(t).iter().map(|v| v.to_string()));
            w.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

fn parse_grid(text: &str, floor: Option<f64>) -> Result<Grid, PanelError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header = reader.headers()?.clone();
    let mut cells = header.iter();
    match cells.next() {
        None => return Err(PanelError::Empty),
        Some(first) if first.trim_start_matches('\u{feff}') != "date" => {
            return Err(PanelError::BadHeader(first.to_string()))
        }
        Some(_) => {}
    }
    let assets = asset_ids(cells.map(str::to_string))?;
    if assets.is_empty() {
        return Err(PanelError::Empty);
    }

    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != assets.len() + 1 {
            return Err(PanelError::Ragged {
                line,
                expected: assets.len() + 1,
                found: record.len(),
            });
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|_| PanelError::BadDate {
            line,
            text: record[0].to_string(),
        })?;
        if let Some(&previous) = dates.last() {
            if date <= previous {
                return Err(PanelError::NonIncreasingDate { line, previous, date });
            }
        }
        dates.push(date);
        for (asset, cell) in assets.iter().zip(record.iter().skip(1)) {
            let mut v: f64 = cell.parse().map_err(|_| PanelError::NonNumeric {
                line,
                asset: asset.to_string(),
                text: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(PanelError::NonNumeric {
                    line,
                    asset: asset.to_string(),
                    text: cell.to_string(),
                });
            }
            if v == 0.0 {
                if let Some(eps) = floor {
                    v = eps;
                }
            }
            values.push(v);
        }
    }
    if dates.is_empty() {
        return Err(PanelError::Empty);
    }
    Grid::new(dates, assets, values)
}

/// Aligned dated panel of weekly values, one column per asset.
#[derive(Debug, Clone, PartialEq)]
pub struct SalesPanel(Grid);

impl SalesPanel {
    /// Builds a panel from a row-major `values` grid (`dates.len()` rows of
    /// `assets.len()` cells). Structural checks only; positivity is checked by
    /// [`validate_panel`].
    pub fn new(dates: Vec<NaiveDate>, assets: Vec<AssetId>, values: Vec<f64>) -> Result<Self, PanelError> {
        Grid::new(dates, assets, values).map(SalesPanel)
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.0.dates
    }

    pub fn assets(&self) -> &[AssetId] {
        &self.0.assets
    }

    pub fn values(&self) -> &[f64] {
        &self.0.values
    }

    pub fn len(&self) -> usize {
        self.0.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.rows() == 0
    }

    pub fn asset_count(&self) -> usize {
        self.0.cols()
    }

    pub fn get(&self, t: usize, asset: usize) -> f64 {
        self.0.get(t, asset)
    }

    pub fn row(&self, t: usize) -> &[f64] {
        self.0.row(t)
    }

    pub fn column(&self, asset: usize) -> impl Iterator<Item = f64> + '_ {
        self.0.column(asset)
    }

    /// Multiplies every value by `factor`.
    pub fn scaled(&self, factor: f64) -> SalesPanel {
        let mut g = self.0.clone();
        g.values.iter_mut().for_each(|v| *v *= factor);
        SalesPanel(g)
    }

    /// Serializes to the `date,<asset>...` CSV layout accepted by [`parse_panel`].
    /// Values are written in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        self.0.to_csv()
    }
}

/// Parses a `date,<asset1>,...` CSV document into a panel.
pub fn parse_panel(text: &str) -> Result<SalesPanel, PanelError> {
    parse_grid(text, None).map(SalesPanel)
}

/// Like [`parse_panel`] but replaces exact zeros with `floor` while reading.
pub fn parse_panel_with_floor(text: &str, floor: f64) -> Result<SalesPanel, PanelError> {
    parse_grid(text, Some(floor)).map(SalesPanel)
}

/// Checks value positivity and minimum length; returns the panel unchanged.
pub fn validate_panel(panel: SalesPanel, min_length: usize) -> Result<SalesPanel, PanelError> {
    check_panel(&panel, min_length)?;
    Ok(panel)
}

fn check_panel(panel: &SalesPanel, min_length: usize) -> Result<(), PanelError> {
    for t in 0..panel.len() {
        for (i, &value) in panel.row(t).iter().enumerate() {
            if value.is_nan() || value <= 0.0 {
                return Err(PanelError::NonPositive {
                    asset: panel.assets()[i].to_string(),
                    date: panel.dates()[t],
                    observation: t + 1,
                    value,
                });
            }
        }
    }
    if panel.len() < min_length {
        return Err(PanelError::TooShort {
            len: panel.len(),
            min: min_length,
        });
    }
    Ok(())
}

/// Panel of log-returns; each row is dated by the later observation of its pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel(Grid);

impl ReturnPanel {
    pub fn new(dates: Vec<NaiveDate>, assets: Vec<AssetId>, values: Vec<f64>) -> Result<Self, PanelError> {
        Grid::new(dates, assets, values).map(ReturnPanel)
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.0.dates
    }

    pub fn assets(&self) -> &[AssetId] {
        &self.0.assets
    }

    pub fn values(&self) -> &[f64] {
        &self.0.values
    }

    pub fn len(&self) -> usize {
        self.0.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.rows() == 0
    }

    pub fn asset_count(&self) -> usize {
        self.0.cols()
    }

    pub fn get(&self, t: usize, asset: usize) -> f64 {
        self.0.get(t, asset)
    }

    pub fn row(&self, t: usize) -> &[f64] {
        self.0.row(t)
    }

    pub fn column(&self, asset: usize) -> impl Iterator<Item = f64> + '_ {
        self.0.column(asset)
    }

    /// Contiguous window of `width` return rows starting at `start`.
    pub fn slice_window(&self, start: usize, width: usize) -> Result<ReturnPanel, PanelError> {
        if width < 2 {
            return Err(PanelError::WindowTooNarrow(width));
        }
        let rows = self.len();
        if start.checked_add(width).is_none_or(|end| end > rows) {
            return Err(PanelError::WindowOutOfRange { start, width, rows });
        }
        let n = self.asset_count();
        Ok(ReturnPanel(Grid {
            dates: self.0.dates[start..start + width].to_vec(),
            assets: self.0.assets.clone(),
            values: self.0.values[start * n..(start + width) * n].to_vec(),
        }))
    }

    pub fn to_csv(&self) -> String {
        self.0.to_csv()
    }
}

/// Reads a return panel written by [`ReturnPanel::to_csv`]. Values may be of
/// any sign.
pub fn parse_returns(text: &str) -> Result<ReturnPanel, PanelError> {
    parse_grid(text, None).map(ReturnPanel)
}

/// `values[t][i] = ln(P[t+1][i] / P[t][i])`.
///
/// The ratio form keeps the transform exactly invariant under rescaling by a
/// power of two and accurate for small weekly changes.
pub fn log_returns(panel: &SalesPanel) -> Result<ReturnPanel, PanelError> {
    check_panel(panel, 2)?;
    let n = panel.asset_count();
    let mut values = Vec::with_capacity((panel.len() - 1) * n);
    for t in 1..panel.len() {
        let prev = panel.row(t - 1);
        let next = panel.row(t);
        values.extend(next.iter().zip(prev).map(|(b, a)| (b / a).ln()));
    }
    Ok(ReturnPanel(Grid {
        dates: panel.dates()[1..].to_vec(),
        assets: panel.assets().to_vec(),
        values,
    }))
}

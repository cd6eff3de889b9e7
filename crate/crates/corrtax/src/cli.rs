//! The `corrtax` command line: file (or stdin) in, one document out.
//!
//! Exit status is 0 on success, 1 when the input fails validation or the
//! analysis cannot be carried out, and 2 on usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::corrnet::{census, correlation_matrix, distance_matrix, top_pairs, CorrelationMatrix};
use crate::dynamics::{
    edge_survival, half_life_scaling, mean_half_life, rolling_trees, tree_half_life, ScalingOptions, WindowPlan,
    DEFAULT_MAX_FIT_WEEKS,
};
use crate::panel::{
    log_returns, parse_panel, parse_panel_with_floor, parse_returns, validate_panel, SalesPanel, MIN_PANEL_LENGTH,
};
use crate::synth::{generate_competitive_market, generate_sector_market, CompetitionConfig, SectorConfig};
use crate::taxonomy::{export_dot, export_json, export_newick, minimum_spanning_tree, single_linkage};
use crate::Error;

#[derive(Debug, Parser)]
#[command(
    name = "corrtax",
    version,
    about = "Correlation-based hierarchical taxonomy of weekly panels"
)]
pub struct Cli {
    /// Replace zero values with this positive floor while reading panels
    #[arg(long, global = true, env = "CORRTAX_FLOOR")]
    pub floor: Option<f64>,
    /// Write the result to this file instead of stdout
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
    Dot,
    Newick,
    Plot,
}

/// What the input document holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum InputKind {
    /// `date,<asset>...` panel of positive values
    #[default]
    Panel,
    /// return panel as written by `corrtax returns`
    Returns,
    /// correlation matrix as written by `corrtax corr --format csv`
    Corr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Sector,
    Competition,
}

#[derive(Debug, clap::Args)]
pub struct Source {
    /// Input file, or `-` for stdin
    pub input: String,
    #[arg(long, value_enum, default_value_t = InputKind::Panel)]
    pub input_kind: InputKind,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a panel and report its shape
    Validate {
        /// Input file, or `-` for stdin
        input: String,
        #[arg(long, default_value_t = MIN_PANEL_LENGTH)]
        min_length: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Write the log-return panel as CSV
    Returns {
        /// Input file, or `-` for stdin
        input: String,
    },
    /// Correlation (or distance) matrix
    Corr {
        #[command(flatten)]
        source: Source,
        /// Emit the distance matrix sqrt(2(1 - rho)) instead
        #[arg(long)]
        distance: bool,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Count strongly, weakly and negatively correlated pairs
    Census {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Most correlated pairs with their distances
    Pairs {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 5)]
        top: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Minimum spanning tree of the distance matrix
    Mst {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Single-linkage hierarchy (subdominant ultrametric)
    Tree {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Rolling-window edge survival and tree half-life
    Halflife {
        #[command(flatten)]
        source: Source,
        /// Window width in observations
        #[arg(long)]
        width: usize,
        /// Stride between windows in observations
        #[arg(long, default_value_t = 1)]
        step: usize,
        /// Duration of one observation (weeks)
        #[arg(long, default_value_t = 1.0)]
        step_duration: f64,
        /// Window used as the survival-curve origin
        #[arg(long, default_value_t = 0)]
        origin: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Tree half-life against window width, with a through-origin fit
    Scaling {
        #[command(flatten)]
        source: Source,
        /// Comma-separated window widths in observations
        #[arg(long, value_delimiter = ',', required = true)]
        widths: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        step: usize,
        /// Duration of one observation (weeks)
        #[arg(long, default_value_t = 1.0)]
        step_duration: f64,
        /// Widths longer than this (weeks) are not fitted
        #[arg(long, default_value_t = DEFAULT_MAX_FIT_WEEKS)]
        max_fit_width: f64,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Generate a synthetic panel
    Simulate {
        #[arg(long, value_enum)]
        model: Model,
        /// RNG seed (required)
        #[arg(long)]
        seed: u64,
        /// JSON model config; `--seed` overrides its seed
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 260)]
        weeks: usize,
        /// Number of assets (competition model)
        #[arg(long, default_value_t = 10)]
        assets: usize,
        /// Weekly reallocated share (competition model)
        #[arg(long, default_value_t = 0.3)]
        churn: f64,
        /// Number of sectors (sector model)
        #[arg(long, default_value_t = 2)]
        sectors: usize,
        /// Assets per sector (sector model)
        #[arg(long, default_value_t = 5)]
        members: usize,
        /// Sector factor loading (sector model)
        #[arg(long, default_value_t = 1.0)]
        loading: f64,
        /// Idiosyncratic noise standard deviation (sector model)
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e.to_string())
    }
}

macro_rules! data_err {
    ($e:expr) => {
        $e.map_err(|e| Failure::from(Error::from(e)))
    };
}

fn pick_format(given: Option<Format>, default: Format, allowed: &[Format], command: &str) -> Result<Format, Failure> {
    let f = given.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        let names: Vec<String> = allowed
            .iter()
            .map(|a| {
                a.to_possible_value()
                    .expect("no skipped variants")
                    .get_name()
                    .to_string()
            })
            .collect();
        Err(Failure::Usage(format!(
            "`{command}` does not support --format {}; accepted: {}",
            f.to_possible_value().expect("no skipped variants").get_name(),
            names.join(", ")
        )))
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    floor: Option<f64>,
}

impl Io<'_> {
    fn read(&mut self, input: &str) -> Result<String, Failure> {
        let mut text = String::new();
        if input == "-" {
            self.stdin
                .read_to_string(&mut text)
                .map_err(|e| Failure::Data(format!("stdin: {e}")))?;
        } else {
            text = std::fs::read_to_string(input).map_err(|e| Failure::Data(format!("{input}: {e}")))?;
        }
        Ok(text)
    }

    fn panel(&mut self, input: &str) -> Result<SalesPanel, Failure> {
        let text = self.read(input)?;
        match self.floor {
            Some(eps) if !(eps > 0.0 && eps.is_finite()) => {
                Err(Failure::Usage(format!("--floor must be positive, got {eps}")))
            }
            Some(eps) => data_err!(parse_panel_with_floor(&text, eps)),
            None => data_err!(parse_panel(&text)),
        }
    }

    fn returns(&mut self, source: &Source) -> Result<crate::panel::ReturnPanel, Failure> {
        match source.input_kind {
            InputKind::Panel => {
                let panel = data_err!(validate_panel(self.panel(&source.input)?, MIN_PANEL_LENGTH))?;
                data_err!(log_returns(&panel))
            }
            InputKind::Returns => data_err!(parse_returns(&self.read(&source.input)?)),
            InputKind::Corr => Err(Failure::Usage(
                "this command needs a panel or return panel; --input-kind corr is not accepted".into(),
            )),
        }
    }

    fn correlations(&mut self, source: &Source) -> Result<CorrelationMatrix, Failure> {
        match source.input_kind {
            InputKind::Corr => data_err!(CorrelationMatrix::parse_csv(&self.read(&source.input)?)),
            _ => {
                let returns = self.returns(source)?;
                data_err!(correlation_matrix(&returns))
            }
        }
    }
}

fn matrix_table(names: &[crate::panel::AssetId], rows: &[Vec<f64>]) -> String {
    let width = names
        .iter()
        .map(|a| a.as_str().chars().count())
        .max()
        .unwrap_or(0)
        .max(8);
    let mut out = format!("{:width$}", "");
    for a in names {
        write!(out, " {:>width$}", a.as_str()).unwrap();
    }
    out.push('\n');
    for (a, row) in names.iter().zip(rows) {
        write!(out, "{:width$}", a.as_str()).unwrap();
        for v in row {
            write!(out, " {:>width$.4}", v).unwrap();
        }
        out.push('\n');
    }
    out
}

fn execute(cli: Cli, io: &mut Io<'_>) -> Result<String, Failure> {
    use Format::*;
    let mut out = String::new();
    match cli.command {
        Command::Validate {
            input,
            min_length,
            format,
        } => {
            let format = pick_format(format, Table, &[Table, Json], "validate")?;
            let panel = data_err!(validate_panel(io.panel(&input)?, min_length))?;
            let (first, last) = (panel.dates()[0], panel.dates()[panel.len() - 1]);
            match format {
                Json => {
                    out = serde_json::json!({
                        "valid": true,
                        "assets": panel.asset_count(),
                        "observations": panel.len(),
                        "first": first.to_string(),
                        "last": last.to_string(),
                    })
                    .to_string()
                        + "\n"
                }
                _ => writeln!(
                    out,
                    "ok: {} assets, {} observations, {first} to {last}",
                    panel.asset_count(),
                    panel.len()
                )
                .unwrap(),
            }
        }
        Command::Returns { input } => {
            let panel = data_err!(validate_panel(io.panel(&input)?, MIN_PANEL_LENGTH))?;
            out = data_err!(log_returns(&panel))?.to_csv();
        }
        Command::Corr {
            source,
            distance,
            format,
        } => {
            let format = pick_format(format, Table, &[Table, Csv, Json], "corr")?;
            let corr = io.correlations(&source)?;
            if distance {
                let d = distance_matrix(&corr);
                out = match format {
                    Csv => d.to_csv(),
                    Json => d.to_json() + "\n",
                    _ => matrix_table(d.assets(), &d.rows()),
                };
            } else {
                out = match format {
                    Csv => corr.to_csv(),
                    Json => corr.to_json() + "\n",
                    _ => matrix_table(corr.assets(), &corr.rows()),
                };
            }
        }
        Command::Census { source, format } => {
            let format = pick_format(format, Json, &[Json, Table], "census")?;
            let c = census(&io.correlations(&source)?);
            match format {
                Table => {
                    writeln!(out, "strong    {}", c.strong).unwrap();
                    writeln!(out, "weak      {}", c.weak).unwrap();
                    writeln!(out, "negative  {}", c.negative).unwrap();
                    writeln!(out, "pairs     {}", c.pairs()).unwrap();
                }
                _ => out = c.to_json() + "\n",
            }
        }
        Command::Pairs { source, top, format } => {
            let format = pick_format(format, Table, &[Table, Csv, Json], "pairs")?;
            let pairs = data_err!(top_pairs(&io.correlations(&source)?, top))?;
            match format {
                Json => out = serde_json::to_string(&pairs).expect("finite values") + "\n",
                Csv => {
                    out.push_str("first,second,rho,distance\n");
                    for p in &pairs {
                        writeln!(
                            out,
                            "{},{},{},{}",
                            csv_field(p.first.as_str()),
                            csv_field(p.second.as_str()),
                            p.rho,
                            p.distance
                        )
                        .unwrap();
                    }
                }
                _ => {
                    for p in &pairs {
                        writeln!(out, "{:.2}  {} – {}  (d = {:.2})", p.rho, p.first, p.second, p.distance).unwrap();
                    }
                }
            }
        }
        Command::Mst { source, format } => {
            let format = pick_format(format, Dot, &[Dot, Json, Table], "mst")?;
            let tree = data_err!(minimum_spanning_tree(&distance_matrix(&io.correlations(&source)?)))?;
            match format {
                Json => out = export_json(&tree) + "\n",
                Table => {
                    for e in tree.edges() {
                        let (a, b) = tree.named_edge(e);
                        writeln!(out, "{a}  {b}  {:.4}", e.weight).unwrap();
                    }
                    writeln!(out, "total  {:.4}", tree.total_weight()).unwrap();
                }
                _ => out = export_dot(&tree),
            }
        }
        Command::Tree { source, format } => {
            let format = pick_format(format, Newick, &[Newick, Table], "tree")?;
            let dendro = data_err!(single_linkage(&distance_matrix(&io.correlations(&source)?)))?;
            match format {
                Table => {
                    let n = dendro.leaves().len();
                    let describe = |id: usize| {
                        if id < n {
                            dendro.leaves()[id].to_string()
                        } else {
                            format!("#{}", id - n + 1)
                        }
                    };
                    for (k, m) in dendro.merges().iter().enumerate() {
                        writeln!(
                            out,
                            "#{:<3} {} + {}  height {:.4}  size {}",
                            k + 1,
                            describe(m.left),
                            describe(m.right),
                            m.height,
                            m.size
                        )
                        .unwrap();
                    }
                }
                _ => out = export_newick(&dendro) + "\n",
            }
        }
        Command::Halflife {
            source,
            width,
            step,
            step_duration,
            origin,
            format,
        } => {
            let format = pick_format(format, Table, &[Table, Csv, Json], "halflife")?;
            if !(step_duration > 0.0 && step_duration.is_finite()) {
                return Err(Failure::Usage(format!(
                    "--step-duration must be positive, got {step_duration}"
                )));
            }
            let returns = io.returns(&source)?;
            let plan = data_err!(WindowPlan::new(width, step, returns.len()))?;
            let trees = data_err!(rolling_trees(&returns, &plan))?;
            let curve = data_err!(edge_survival(&trees, origin))?;
            let lag_duration = step as f64 * step_duration;
            let single = tree_half_life(&curve, lag_duration);
            let mean = if trees.len() >= 2 {
                Some(data_err!(mean_half_life(&trees, lag_duration))?)
            } else {
                None
            };
            match format {
                Csv => out = curve.to_csv(),
                Json => {
                    out = serde_json::json!({
                        "width": width,
                        "step": step,
                        "windows": trees.len(),
                        "origin": origin,
                        "fraction": curve.fraction,
                        "half_life": single.half_life,
                        "mean_half_life": mean.and_then(|m| m.half_life),
                        "origin_count": mean.map_or(0, |m| m.origin_count),
                    })
                    .to_string()
                        + "\n"
                }
                _ => {
                    writeln!(out, "windows: {} (width {width}, step {step})", trees.len()).unwrap();
                    writeln!(out, "lag  fraction").unwrap();
                    for (lag, f) in curve.fraction.iter().enumerate() {
                        writeln!(out, "{lag:<4} {f:.4}").unwrap();
                    }
                    match single.half_life {
                        Some(h) => writeln!(out, "half-life from window {origin}: {h:.4}").unwrap(),
                        None => writeln!(out, "half-life from window {origin}: undefined").unwrap(),
                    }
                    match mean.and_then(|m| m.half_life.map(|h| (h, m.origin_count))) {
                        Some((h, count)) => writeln!(out, "mean half-life: {h:.4} over {count} origins").unwrap(),
                        None => writeln!(out, "mean half-life: undefined").unwrap(),
                    }
                }
            }
        }
        Command::Scaling {
            source,
            widths,
            step,
            step_duration,
            max_fit_width,
            format,
        } => {
            let format = pick_format(format, Table, &[Table, Csv, Json, Plot], "scaling")?;
            let returns = io.returns(&source)?;
            let options = ScalingOptions {
                step,
                observation_duration: step_duration,
                max_fit_width,
            };
            let s = data_err!(half_life_scaling(&returns, &widths, &options))?;
            match format {
                Csv => out = s.to_csv(),
                Json => out = s.to_json() + "\n",
                Plot => out = s.plot_data(),
                _ => {
                    writeln!(out, "width     half-life  origins").unwrap();
                    for ((w, h), c) in s.widths.iter().zip(&s.half_lives).zip(&s.origin_counts) {
                        let h = h.map_or("undefined".to_string(), |h| format!("{h:.4}"));
                        writeln!(out, "{w:<9} {h:<10} {c}").unwrap();
                    }
                    writeln!(out, "slope: {:.6}", s.slope).unwrap();
                }
            }
        }
        Command::Simulate {
            model,
            seed,
            config,
            weeks,
            assets,
            churn,
            sectors,
            members,
            loading,
            noise,
        } => {
            let text = match &config {
                Some(path) => {
                    Some(std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?)
                }
                None => None,
            };
            let bad_config = |e: serde_json::Error| Failure::Data(format!("config: {e}"));
            let panel = match model {
                Model::Sector => {
                    let cfg = match text {
                        Some(t) => {
                            let mut v: serde_json::Value = serde_json::from_str(&t).map_err(bad_config)?;
                            v["seed"] = seed.into();
                            serde_json::from_value::<SectorConfig>(v).map_err(bad_config)?
                        }
                        None => SectorConfig::uniform(sectors, members, loading, noise, weeks, seed),
                    };
                    data_err!(generate_sector_market(&cfg))?
                }
                Model::Competition => {
                    let cfg = match text {
                        Some(t) => {
                            let mut v: serde_json::Value = serde_json::from_str(&t).map_err(bad_config)?;
                            v["seed"] = seed.into();
                            serde_json::from_value::<CompetitionConfig>(v).map_err(bad_config)?
                        }
                        None => CompetitionConfig::new(assets, weeks, churn, seed),
                    };
                    data_err!(generate_competitive_market(&cfg))?
                }
            };
            out = panel.to_csv();
        }
    }
    Ok(out)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Parses `args` (including the program name) and runs one command. Returns
/// the process exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    let output = cli.output.clone();
    let mut io = Io {
        stdin,
        floor: cli.floor,
    };
    match execute(cli, &mut io) {
        Ok(text) => {
            let written = match output {
                Some(path) => std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display())),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    1
                }
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "usage error: {msg}");
            2
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut input = stdin.as_bytes();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["corrtax"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut input, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    const PANEL: &str = "date,A,B,C\n\
        2003-05-01,100,200,50\n\
        2003-05-08,110,190,55\n\
        2003-05-15,121,181,52\n\
        2003-05-22,115,185,60\n\
        2003-05-29,118,170,58\n";

    #[test]
    fn validate_reports_shape() {
        let (code, out, _) = call(&["validate", "-"], PANEL);
        assert_eq!(code, 0);
        assert_eq!(out, "ok: 3 assets, 5 observations, 2003-05-01 to 2003-05-29\n");
        let (code, _, err) = call(&["validate", "--min-length", "10", "-"], PANEL);
        assert_eq!(code, 1);
        assert!(err.contains("at least 10"));
    }

    #[test]
    fn zero_cells_and_floor() {
        let zeroed = PANEL.replace("2003-05-15,121", "2003-05-15,0");
        let (code, _, err) = call(&["validate", "-"], &zeroed);
        assert_eq!(code, 1);
        assert!(err.contains("`A`") && err.contains("2003-05-15"), "{err}");
        let (code, _, _) = call(&["--floor", "0.5", "validate", "-"], &zeroed);
        assert_eq!(code, 0);
        let (code, _, _) = call(&["--floor", "-1", "validate", "-"], &zeroed);
        assert_eq!(code, 2);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["simulate", "--model", "sector"], "").0, 2);
        assert_eq!(call(&["bogus"], "").0, 2);
        assert_eq!(call(&["census", "--nope", "-"], PANEL).0, 2);
        let (code, _, err) = call(&["census", "--format", "dot", "-"], PANEL);
        assert_eq!(code, 2);
        assert!(err.contains("accepted: json, table"), "{err}");
        assert_eq!(
            call(&["halflife", "--input-kind", "corr", "--width", "2", "-"], PANEL).0,
            2
        );
    }

    #[test]
    fn census_defaults_to_json() {
        let (code, out, _) = call(&["census", "-"], PANEL);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["pairs"], 3);
    }

    #[test]
    fn pairs_listing_format() {
        let (code, out, _) = call(&["pairs", "--top", "2", "-"], PANEL);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].contains(" – ") && lines[0].contains("(d = "), "{out}");
        assert_eq!(call(&["pairs", "--top", "4", "-"], PANEL).0, 1);
    }

    #[test]
    fn mst_and_tree_defaults() {
        let (code, out, _) = call(&["mst", "-"], PANEL);
        assert_eq!(code, 0);
        assert!(out.starts_with("graph mst {"));
        assert_eq!(out.matches(" -- ").count(), 2);
        let (code, out, _) = call(&["tree", "-"], PANEL);
        assert_eq!(code, 0);
        assert!(out.trim_end().ends_with(';'));
    }

    #[test]
    fn simulate_is_seeded() {
        let a = call(
            &[
                "simulate",
                "--model",
                "competition",
                "--seed",
                "3",
                "--weeks",
                "20",
                "--assets",
                "4",
            ],
            "",
        );
        let b = call(
            &[
                "simulate",
                "--model",
                "competition",
                "--seed",
                "3",
                "--weeks",
                "20",
                "--assets",
                "4",
            ],
            "",
        );
        assert_eq!(a.0, 0);
        assert_eq!(a, b);
        assert_eq!(a.1.lines().count(), 21);
    }
}

//! Command-line front end: wires the exact eta pipeline, the fixed-point
//! enumeration, the classification arithmetic and the Cheeger deformation
//! sweeps into reproducible machine-readable reports.

pub mod report;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use num_rational::Rational64;

use etamod_core::brieskorn::{BrieskornData, Space};
use etamod_core::cheeger::{
    brieskorn_link_charts, deformed_metric, find_t0, flat_torus_chart, hopf_chart,
    noncommuting_pair, orbit_splitting, ActionChart, ChartSetSpec, T0Config,
};
use etamod_core::classify::{self, ClassReport};
use etamod_core::error::Error as CoreError;
use etamod_core::eta::{brieskorn_eta_derivation, plumbing_eta_derivation};
use etamod_core::rational::parse_rational;

use report::{
    ChartReport, CheegerReport, CsvRow, EtaReport, FixedPointEntry, FixedPointsReport,
    PermutationReport, ProfileRow, T0Verdict, CSV_HEADER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "etamod",
    version,
    about = "Exact relative eta-invariants of Brieskorn-sphere quotients, \
             Cheeger deformation sweeps, and moduli-space component reports"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Seed for all pseudo-random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Tolerance for numerical rank and membership decisions.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relative eta-invariant with its full derivation trace.
    Eta {
        /// Half-dimension parameter of the link pipeline (odd, >= 3).
        #[arg(long, conflicts_with = "k")]
        n: Option<u32>,
        /// Plumbing pipeline parameter (dimension 4k+1).
        #[arg(long)]
        k: Option<u32>,
        /// Exponent of the singularity (odd).
        #[arg(long)]
        d: u32,
    },
    /// Isolated fixed points of the involution, their isotropy, and the
    /// induced permutation by a root of unity.
    Fixedpoints {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        /// Smoothing parameter as a rational `p/q` in (0, 1).
        #[arg(long)]
        epsilon: String,
        /// Acting root of unity as a fraction of a full turn
        /// (default `1/(2d)`, a primitive generator).
        #[arg(long)]
        w_turn: Option<String>,
    },
    /// Classification report over a range of exponents or a family.
    Classify {
        /// Dimension `4k + 1` (for example 5).
        #[arg(long, conflicts_with = "k")]
        dim: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        /// Scan all odd exponents up to this bound.
        #[arg(long = "d-max", conflicts_with = "family")]
        d_max: Option<u64>,
        /// Base exponent of a step-2^(2k+2) family.
        #[arg(long)]
        family: Option<u64>,
        /// Number of generated family members beyond the base.
        #[arg(long, requires = "family")]
        count: Option<usize>,
    },
    /// Deformation sweep on a chart set: wedge-weight profiles, curvature
    /// bounds, non-commutation certificates and the t0 verdict.
    Cheeger {
        /// `hopf`, `torus`, `brieskorn`, or a path to a chart JSON file.
        #[arg(long)]
        chart: String,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        epsilon: Option<String>,
        /// Number of sampled chart points (brieskorn source).
        #[arg(long)]
        samples: Option<usize>,
        /// Synthetic constant sectional curvature for sampled charts.
        #[arg(long = "sec-const")]
        sec_const: Option<f64>,
        /// Comma-separated list of deformation times to profile.
        #[arg(long)]
        t: Option<String>,
        /// Upper end of the t0 search.
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        /// Geometric grid density (points per decade) for the t0 search.
        #[arg(long = "grid-density")]
        grid_density: Option<usize>,
    },
}

/// A rendered report body.
pub struct Rendered {
    pub body: String,
}

#[derive(Debug)]
pub enum CliError {
    Core(CoreError),
    Usage(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Runs a parsed invocation and returns the rendered report body.
pub fn run(cli: &Cli) -> CliResult<Rendered> {
    let body = match &cli.command {
        Command::Eta { n, k, d } => run_eta(cli, *n, *k, *d)?,
        Command::Fixedpoints {
            n,
            d,
            epsilon,
            w_turn,
        } => run_fixedpoints(cli, *n, *d, epsilon, w_turn.as_deref())?,
        Command::Classify {
            dim,
            k,
            d_max,
            family,
            count,
        } => run_classify(cli, *dim, *k, *d_max, *family, *count)?,
        Command::Cheeger {
            chart,
            n,
            d,
            epsilon,
            samples,
            sec_const,
            t,
            t_max,
            grid_density,
        } => run_cheeger(
            cli,
            chart,
            *n,
            *d,
            epsilon.as_deref(),
            *samples,
            *sec_const,
            t.as_deref(),
            *t_max,
            *grid_density,
        )?,
    };
    Ok(Rendered { body })
}

/// Writes the rendered body to the configured destination.
pub fn emit(cli: &Cli, rendered: &Rendered) -> CliResult<()> {
    match &cli.output {
        Some(path) => fs::write(path, &rendered.body)?,
        None => print!("{}", rendered.body),
    }
    Ok(())
}

/// One-line machine-readable error object.
pub fn error_object(err: &CliError) -> String {
    serde_json::json!({ "error": err.to_string() }).to_string()
}

fn run_eta(cli: &Cli, n: Option<u32>, k: Option<u32>, d: u32) -> CliResult<String> {
    let derivation = match (n, k) {
        (Some(n), None) => brieskorn_eta_derivation(n, d)?,
        (None, Some(k)) => plumbing_eta_derivation(k, d)?,
        _ => return Err(usage("eta requires exactly one of --n or --k")),
    };
    let rep = EtaReport {
        command: "eta".into(),
        n,
        k,
        d,
        eta: derivation.relative_eta.to_string(),
        derivation,
    };
    match cli.format {
        Format::Json => to_json(&rep),
        Format::Csv => {
            let k_param = k.unwrap_or_else(|| (n.unwrap() - 1) / 2);
            let n_param = n.unwrap_or(2 * k_param + 1);
            let row = CsvRow {
                d: d as u64,
                n_or_k: n.map(u64::from).unwrap_or(k.unwrap() as u64),
                eta_num: rep.derivation.relative_eta.numer_string(),
                eta_den: rep.derivation.relative_eta.denom_string(),
                diffeo_class: String::new(),
                kervaire: format!("{:?}", classify::kervaire_type(n_param, d as u64)?),
                components: String::new(),
            };
            Ok(format!("{CSV_HEADER}\n{}\n", row.render()))
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "relative eta-invariant: {}", rep.eta).unwrap();
            for (i, step) in rep.derivation.steps.iter().enumerate() {
                writeln!(out, "  {}. {}", i + 1, step).unwrap();
            }
            Ok(out)
        }
    }
}

fn run_fixedpoints(
    cli: &Cli,
    n: u32,
    d: u32,
    epsilon: &str,
    w_turn: Option<&str>,
) -> CliResult<String> {
    let eps = parse_rational(epsilon)?;
    let data = BrieskornData::new(n, d, eps)?;
    let fps = data.tau_fixed_points()?;
    let turn = match w_turn {
        Some(raw) => Rational64::from_str(raw)
            .map_err(|_| usage(format!("invalid --w-turn value `{raw}`")))?,
        None => Rational64::new(1, 2 * d as i64),
    };
    let perm = data.z2d_permutation(turn)?;
    let points = fps
        .iter()
        .map(|fp| {
            let isotropy = data.isotropy_at(&fp.point, Space::Variety, cli.tol.max(1e-8))?;
            Ok(FixedPointEntry {
                index: fp.index,
                turn: fp.turn.to_string(),
                radius: fp.radius,
                radius_exact: fp.radius_exact.clone(),
                coordinates: fp.point.0.iter().map(|z| [z.re, z.im]).collect(),
                isotropy,
                power_exact: fp.verify_power_exact(&data),
                power_f64: fp.verify_power(&data, 1e-12),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let rep = FixedPointsReport {
        command: "fixedpoints".into(),
        n,
        d,
        epsilon: data.epsilon().to_string(),
        count: points.len(),
        points,
        permutation: PermutationReport {
            generator_turn: turn.to_string(),
            images: perm.0.clone(),
            is_full_cycle: perm.is_full_cycle(),
        },
    };
    match cli.format {
        Format::Json => to_json(&rep),
        Format::Csv => Err(usage("csv output is defined for eta and classify only")),
        Format::Text => {
            let mut out = String::new();
            writeln!(
                out,
                "{} fixed points of the involution on W(n={}, d={}, epsilon={})",
                rep.count, rep.n, rep.d, rep.epsilon
            )
            .unwrap();
            for p in &rep.points {
                writeln!(
                    out,
                    "  p{}: turn {}, radius {:.6}{}, isotropy {} ({}), power check {}",
                    p.index,
                    p.turn,
                    p.radius,
                    p.radius_exact
                        .as_deref()
                        .map(|r| format!(" (= {r} exactly)"))
                        .unwrap_or_default(),
                    serde_json::to_string(&p.isotropy.label).unwrap(),
                    p.isotropy.group,
                    if p.power_exact == Some(true) {
                        "exact"
                    } else if p.power_f64 {
                        "1e-12"
                    } else {
                        "FAILED"
                    }
                )
                .unwrap();
            }
            writeln!(
                out,
                "permutation by w = exp(2 pi i {}): {:?}{}",
                rep.permutation.generator_turn,
                rep.permutation.images,
                if rep.permutation.is_full_cycle {
                    " (full cycle)"
                } else {
                    ""
                }
            )
            .unwrap();
            Ok(out)
        }
    }
}

fn run_classify(
    cli: &Cli,
    dim: Option<u32>,
    k: Option<u32>,
    d_max: Option<u64>,
    family: Option<u64>,
    count: Option<usize>,
) -> CliResult<String> {
    let k = match (dim, k) {
        (Some(dim), None) => {
            if dim < 5 || dim % 4 != 1 {
                return Err(usage(format!(
                    "--dim must be of the form 4k+1 >= 5, got {dim}"
                )));
            }
            (dim - 1) / 4
        }
        (None, Some(k)) => k,
        _ => return Err(usage("classify requires exactly one of --dim or --k")),
    };
    let report: ClassReport = match (family, d_max) {
        (Some(d0), None) => classify::build_family_report(k, d0, count.unwrap_or(5))?,
        (None, d_max) => classify::build_dim_report(k, d_max.unwrap_or(1))?,
        (Some(_), Some(_)) => {
            return Err(usage("--family and --d-max are mutually exclusive"));
        }
    };
    match cli.format {
        Format::Json => to_json(&report),
        Format::Text => Ok(report.render_table()),
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for row in &report.rows {
                let csv = CsvRow {
                    d: row.d,
                    n_or_k: k as u64,
                    eta_num: row.eta.numer_string(),
                    eta_den: row.eta.denom_string(),
                    diffeo_class: row.diffeo_class_key.clone(),
                    kervaire: format!("{:?}", row.kervaire),
                    components: report.component_lower_bound.to_string(),
                };
                out.push_str(&csv.render());
                out.push('\n');
            }
            Ok(out)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_cheeger(
    cli: &Cli,
    chart: &str,
    n: Option<u32>,
    d: Option<u32>,
    epsilon: Option<&str>,
    samples: Option<usize>,
    sec_const: Option<f64>,
    t: Option<&str>,
    t_max: Option<f64>,
    grid_density: Option<usize>,
) -> CliResult<String> {
    let (charts, source): (Vec<ActionChart>, String) = match chart {
        "hopf" => (vec![hopf_chart()], "hopf".into()),
        "torus" => (vec![flat_torus_chart()], "torus".into()),
        "brieskorn" => {
            let n = n.unwrap_or(3);
            let d = d.unwrap_or(3);
            let eps = parse_rational(epsilon.unwrap_or("1/2"))?;
            let samples = samples.unwrap_or(8);
            let charts =
                brieskorn_link_charts(n, d, eps, samples, cli.seed, sec_const.unwrap_or(0.0))?;
            (charts, format!("brieskorn(n={n}, d={d})"))
        }
        path => {
            let raw = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read chart file `{path}`: {e}")))?;
            let spec = ChartSetSpec::from_json(&raw)?;
            (spec.build(cli.tol)?, path.to_string())
        }
    };
    if charts.is_empty() {
        return Err(CoreError::EmptyCharts.into());
    }

    let times: Vec<f64> = match t {
        Some(raw) => raw
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("invalid time `{s}` in --t")))
            })
            .collect::<CliResult<Vec<_>>>()?,
        None => {
            let hi = t_max.unwrap_or(10.0);
            vec![0.0, hi / 100.0, hi / 10.0, hi]
        }
    };

    let algebra_dim = charts[0].algebra().dim();
    let mut chart_reports = Vec::with_capacity(charts.len());
    for (index, chart) in charts.iter().enumerate() {
        let splitting = orbit_splitting(chart)?;
        let pair = noncommuting_pair(chart, cli.tol.max(1e-8), cli.seed)?;
        let (v, w) = representative_plane(chart, &splitting)?;
        let mut profile = Vec::with_capacity(times.len());
        for &tv in &times {
            let dm = deformed_metric(chart, tv)?;
            let (alpha, beta) = dm.alpha_beta(&v, &w)?;
            let (plane_bound, scal) = if chart.has_sec() {
                (
                    dm.lift_plane_curvature_bound(&v, &w)?,
                    dm.scal_estimate()?,
                )
            } else {
                (f64::NAN, f64::NAN)
            };
            profile.push(ProfileRow {
                t: tv,
                alpha,
                beta,
                plane_bound,
                scal_estimate: scal,
            });
        }
        chart_reports.push(ChartReport {
            index,
            dim: chart.dim(),
            vertical_dim: splitting.vertical_dim(),
            horizontal_dim: splitting.horizontal_dim(),
            noncommuting_pair: pair.is_some(),
            profile,
        });
    }

    let t0 = match t_max {
        Some(hi) => {
            let config = T0Config {
                t_max: hi,
                points_per_decade: grid_density.unwrap_or(64),
                t_min: 1e-3,
            };
            let verdict = find_t0(&charts, &config)?;
            Some(T0Verdict {
                certified: verdict.is_some(),
                t0: verdict,
                t_max: hi,
                note: match verdict {
                    Some(t0) => format!(
                        "positive scalar-curvature estimate certified on the sample for all \
                         grid t in [{t0:.3e}, {hi:.3e}]"
                    ),
                    None => format!(
                        "not certified at t_max = {hi:.3e}: the sampled estimate did not stay \
                         positive (this is not a disproof)"
                    ),
                },
            })
        }
        None => None,
    };

    let rep = CheegerReport {
        command: "cheeger".into(),
        chart_source: source,
        chart_count: charts.len(),
        algebra_dim,
        charts: chart_reports,
        t0,
    };
    match cli.format {
        Format::Json => to_json(&rep),
        Format::Csv => Err(usage("csv output is defined for eta and classify only")),
        Format::Text => {
            let mut out = String::new();
            writeln!(
                out,
                "cheeger sweep on {} ({} charts, algebra dimension {})",
                rep.chart_source, rep.chart_count, rep.algebra_dim
            )
            .unwrap();
            for c in &rep.charts {
                writeln!(
                    out,
                    "chart {}: dim {}, vertical {}, horizontal {}, noncommuting pair: {}",
                    c.index,
                    c.dim,
                    c.vertical_dim,
                    c.horizontal_dim,
                    if c.noncommuting_pair { "yes" } else { "no" }
                )
                .unwrap();
                writeln!(
                    out,
                    "  {:>12} {:>12} {:>12} {:>14} {:>14}",
                    "t", "alpha", "beta", "plane bound", "scal estimate"
                )
                .unwrap();
                for row in &c.profile {
                    writeln!(
                        out,
                        "  {:>12.6} {:>12.6} {:>12.6} {:>14.6} {:>14.6}",
                        row.t, row.alpha, row.beta, row.plane_bound, row.scal_estimate
                    )
                    .unwrap();
                }
            }
            if let Some(v) = &rep.t0 {
                writeln!(
                    out,
                    "t0 verdict: {}",
                    if v.certified {
                        format!("certified, t0 = {:.6e}", v.t0.unwrap())
                    } else {
                        "none (not certified)".to_string()
                    }
                )
                .unwrap();
                writeln!(out, "  {}", v.note).unwrap();
            }
            Ok(out)
        }
    }
}

fn representative_plane(
    chart: &ActionChart,
    splitting: &etamod_core::cheeger::OrbitSplitting,
) -> CliResult<(DVector<f64>, DVector<f64>)> {
    if chart.dim() < 2 {
        return Err(usage("charts must have dimension at least 2"));
    }
    let v = if splitting.vertical_dim() > 0 {
        splitting.vertical.column(0).into_owned()
    } else {
        splitting.horizontal.column(0).into_owned()
    };
    let w = if splitting.horizontal_dim() > 0 {
        splitting.horizontal.column(0).into_owned()
    } else {
        splitting.vertical.column(1).into_owned()
    };
    Ok((v, w))
}

fn to_json<T: serde::Serialize>(value: &T) -> CliResult<String> {
    let mut body = serde_json::to_string_pretty(value).map_err(CoreError::Json)?;
    body.push('\n');
    Ok(body)
}

//! Machine-readable report types emitted by the command-line front end.
//!
//! JSON serialization of every report round-trips byte-identically through
//! its typed struct (field order is fixed by the struct definitions).

use serde::{Deserialize, Serialize};

use etamod_core::brieskorn::IsotropyClass;
use etamod_core::eta::EtaDerivation;

/// Output of `etamod eta`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtaReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub d: u32,
    /// The relative eta-invariant as an exact `p/q` string.
    pub eta: String,
    pub derivation: EtaDerivation,
}

/// One fixed point in a `fixedpoints` report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedPointEntry {
    pub index: u32,
    /// Argument as a fraction of a full turn.
    pub turn: String,
    pub radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_exact: Option<String>,
    /// Ambient coordinates as `[re, im]` pairs.
    pub coordinates: Vec<[f64; 2]>,
    pub isotropy: IsotropyClass,
    /// `lambda^d = epsilon` verified exactly (when a closed form exists).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_exact: Option<bool>,
    /// `lambda^d = epsilon` verified in double precision at 1e-12.
    pub power_f64: bool,
}

/// The induced permutation of the fixed points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PermutationReport {
    /// The acting root of unity as a fraction of a full turn.
    pub generator_turn: String,
    pub images: Vec<usize>,
    pub is_full_cycle: bool,
}

/// Output of `etamod fixedpoints`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedPointsReport {
    pub command: String,
    pub n: u32,
    pub d: u32,
    pub epsilon: String,
    pub count: usize,
    pub points: Vec<FixedPointEntry>,
    pub permutation: PermutationReport,
}

/// One sampled deformation time in a `cheeger` report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileRow {
    pub t: f64,
    /// Wedge weights of the representative plane.
    pub alpha: f64,
    pub beta: f64,
    /// Curvature lower bound of the representative plane.
    pub plane_bound: f64,
    /// Average bound over an orthonormal plane basis.
    pub scal_estimate: f64,
}

/// Per-chart section of a `cheeger` report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartReport {
    pub index: usize,
    pub dim: usize,
    pub vertical_dim: usize,
    pub horizontal_dim: usize,
    pub noncommuting_pair: bool,
    pub profile: Vec<ProfileRow>,
}

/// Verdict of the `t0` search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct T0Verdict {
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    pub t_max: f64,
    pub note: String,
}

/// Output of `etamod cheeger`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheegerReport {
    pub command: String,
    pub chart_source: String,
    pub chart_count: usize,
    pub algebra_dim: usize,
    pub charts: Vec<ChartReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<T0Verdict>,
}

/// Fixed CSV column set shared by `eta` and `classify`:
/// `d,n_or_k,eta_num,eta_den,diffeo_class,kervaire,components`.
pub const CSV_HEADER: &str = "d,n_or_k,eta_num,eta_den,diffeo_class,kervaire,components";

#[derive(Debug, Clone)]
pub struct CsvRow {
    pub d: u64,
    pub n_or_k: u64,
    pub eta_num: String,
    pub eta_den: String,
    pub diffeo_class: String,
    pub kervaire: String,
    pub components: String,
}

impl CsvRow {
    pub fn render(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.d,
            self.n_or_k,
            self.eta_num,
            self.eta_den,
            quote_csv(&self.diffeo_class),
            self.kervaire,
            self.components
        )
    }
}

fn quote_csv(field: &str) -> String {
    if field.contains(',') || field.contains('"') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

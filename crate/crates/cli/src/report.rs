//! Serializable reports. Multiprecision values travel as decimal strings.

use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "confocal-billiards/1";

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Envelope<R> {
    pub schema: String,
    pub command: String,
    pub report: R,
}

impl<R> Envelope<R> {
    pub fn new(command: &str, report: R) -> Self {
        Envelope { schema: SCHEMA.to_string(), command: command.to_string(), report }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub closed: bool,
    pub period: Option<usize>,
    pub closure_error: f64,
    pub caustic_spread: f64,
    pub winding: Option<Vec<usize>>,
    pub elliptic_period: Option<usize>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub a: Vec<String>,
    pub alpha: Vec<String>,
    pub kinds: Vec<String>,
    pub n: usize,
    pub periodic: bool,
    pub elliptic_period: Option<usize>,
    pub cartesian_period: Option<usize>,
    pub winding: Option<Vec<usize>>,
    pub signature: Option<Vec<usize>>,
    pub pell_residual: Option<f64>,
    pub reason: String,
    pub simulation: Option<SimulationReport>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TrajectoryReport {
    pub a: Vec<String>,
    pub alpha: Vec<String>,
    /// Impact points, bounce 0 first.
    pub impacts: Vec<Vec<f64>>,
    /// Direction leaving each impact.
    pub directions: Vec<Vec<f64>>,
    pub simulation: SimulationReport,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PellReport {
    pub n: usize,
    pub d: usize,
    pub c: Vec<String>,
    /// Ascending coefficients of `p_hat`.
    pub p: Vec<String>,
    /// Ascending coefficients of `q_hat`.
    pub q: Vec<String>,
    pub residual: f64,
    pub winding: Vec<usize>,
    pub signature: Vec<usize>,
    pub elliptic_period: usize,
    pub q_roots: Vec<f64>,
    pub law_holds: bool,
    pub band_excess: f64,
    /// `(s, p_hat(s))` samples.
    pub graph: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct DPlusOneReport {
    pub a: Vec<String>,
    pub gamma: String,
    pub alpha: Vec<String>,
    pub kinds: Vec<String>,
    pub admissible: bool,
    pub conditions_hold: Option<bool>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Hyperboloid4Report {
    pub a2: String,
    pub a3: String,
    /// Exact form when both inputs are rational.
    pub a1_exact: Option<String>,
    pub alpha_exact: Option<String>,
    pub a1: String,
    pub alpha: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct UniquePairReport {
    pub a: Vec<String>,
    pub lambda: String,
    pub alpha: String,
    pub shifted: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct FrequencyReport {
    pub a: Vec<String>,
    pub alpha: Vec<String>,
    pub f: Vec<f64>,
    pub band_measures: Vec<f64>,
    pub total_mass: f64,
    /// Ascending coefficients of the monic third-kind polynomial.
    pub eta: Vec<f64>,
    pub gap_residuals: Vec<f64>,
    pub roots_in_gaps: bool,
    pub monotone: bool,
    /// `(numerator, denominator)` when `f_k` is a small-denominator rational.
    pub rational_fit: Vec<Option<(i64, u64)>>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RotationRow {
    pub lambda: f64,
    pub rho: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RotationSweepReport {
    pub a: f64,
    pub b: f64,
    pub rows: Vec<RotationRow>,
    pub increasing_steps: usize,
    pub decreasing_steps: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RouteReport {
    pub periodic: bool,
    pub period: Option<usize>,
    pub elliptic_period: Option<usize>,
    pub winding: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub label: String,
    pub satisfied: bool,
    pub magnitudes: Vec<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CatalogRow {
    pub key: String,
    pub title: String,
    pub a: Vec<String>,
    pub alpha: Vec<String>,
    pub kinds: Vec<String>,
    pub n: usize,
    pub constraint: String,
    pub constraint_holds: bool,
    pub conditions: Vec<ConditionReport>,
    /// `(p_2, p_1)` ascending coefficients.
    pub witness: Option<(Vec<String>, Vec<String>)>,
    pub condition_winding: Option<Vec<usize>>,
    pub cayley: RouteReport,
    pub pell: RouteReport,
    pub simulation: RouteReport,
    pub routes_agree: bool,
    pub signature: Vec<usize>,
    pub pell_residual: f64,
    pub band_excess: f64,
    pub closure_error: f64,
    pub reflection_period: Option<usize>,
    pub frequency: Vec<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CatalogReport {
    pub precision: usize,
    pub entries: Vec<CatalogRow>,
    /// CSV files written, if an output directory was given.
    pub files: Vec<String>,
}

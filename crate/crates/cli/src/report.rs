//! Report documents. JSON output is pretty-printed with a trailing newline;
//! wall-clock fields are zero unless timings were requested, so equal inputs
//! and seed give byte-identical files.

use serde::{Deserialize, Serialize};

use hyperslice::irreddetect::{CensusRow, Fit, Mode};
use hyperslice::projgeom::Rational;
use hyperslice::slicestats::{rational_string, EmpiricalStats, FiberSummary, VarianceBound};

pub const TOOL: &str = "hyperslice";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_HEADER: &str = "q,total_hyperplanes,very_bad,good,equals_x,mode,runtime_ms";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusDocument {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub scenario: String,
    pub mode: Mode,
    pub max_extension: u32,
    pub rows: Vec<CensusRow>,
    pub fit: Fit,
    pub theoretical_exponent: u32,
}

pub fn census_csv(rows: &[CensusRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.q, r.total_hyperplanes, r.very_bad, r.good, r.equals_x, r.mode, r.runtime_ms
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountEntry {
    pub m: u32,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountDocument {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub q: u64,
    pub counts: Vec<CountEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Moments {
    #[serde(with = "rational_string")]
    pub mean: Rational,
    #[serde(with = "rational_string")]
    pub variance: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsDocument {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub source: String,
    pub q: u64,
    pub n: usize,
    /// `exhaustive` or `samples`.
    pub method: String,
    pub hyperplanes: u64,
    pub fibers: FiberSummary,
    pub predicted: Moments,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<Moments>,
    /// Exact and predicted moments agree (exhaustive only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub equal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub empirical: Option<EmpiricalStats>,
    pub variance_bound: VarianceBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanDocument {
    pub tool: String,
    pub version: String,
    pub q: u64,
    pub n: usize,
    pub points: Vec<Vec<u32>>,
    pub rank: usize,
    pub span_dim: i64,
    pub locus_dim: i64,
    /// Hyperplanes containing every point, by enumeration.
    pub containing_hyperplanes: u64,
    /// `containing_hyperplanes` equals the number of points of a `P^locus_dim`.
    pub enumeration_agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeDocument {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub q: u64,
    pub hyperplane: Vec<u32>,
    pub mode: Mode,
    pub verdict: String,
    pub very_bad: bool,
    pub slice_counts: Vec<u64>,
    pub x_count: u64,
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("report serializes") + "\n"
}

//! Batch driver: scenario loading, subcommands, reports and exit codes.

pub mod report;
pub mod scenario;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand};
use serde::Deserialize;

use hyperslice::fields::{field_of_order, Elem};
use hyperslice::irreddetect::{census, classify, Mode};
use hyperslice::projgeom::{incident, projective_count, rank, span_dim, span_locus_dim, ProjPoint, ProjectiveSpace};
use hyperslice::slicestats::{
    exact_stats, mc_stats, predicted_stats, variance_bound, Geometric, Sampling, SetMap, SliceSource,
};
use hyperslice::variety::{count_points, CountOptions};
use hyperslice::Error;

use report::*;
use scenario::{bundled, parse_hyperplane, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const BUDGET: i32 = 4;
    pub const FIT: i32 = 5;
    pub const MATH: i32 = 6;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => exit::IO,
            CliError::Usage(_) => exit::USAGE,
            CliError::Core(e) => match e {
                Error::BudgetExceeded { .. } => exit::BUDGET,
                Error::FitUnderdetermined { .. } => exit::FIT,
                Error::InconsistentCollisionSum { .. } | Error::NonpositiveT | Error::ConeMismatch { .. } => exit::MATH,
                _ => exit::VALIDATION,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "Io",
            CliError::Usage(_) => "Usage",
            CliError::Core(e) => match e {
                Error::Field(_) => "Field",
                Error::Poly(_) => "Parse",
                Error::DimensionMismatch { .. } => "DimensionMismatch",
                Error::EmptyInput => "EmptyInput",
                Error::ZeroVector => "ZeroVector",
                Error::FieldMismatch(_) => "FieldMismatch",
                Error::BudgetExceeded { .. } => "BudgetExceeded",
                Error::BasePointHit { .. } => "BasePointHit",
                Error::InvalidVariety(_) => "InvalidVariety",
                Error::InconsistentCollisionSum { .. } => "InconsistentCollisionSum",
                Error::NonpositiveT => "NonpositiveT",
                Error::DimensionTooSmall => "DimensionTooSmall",
                Error::FitUnderdetermined { .. } => "FitUnderdetermined",
                Error::DimensionCheckFailed { .. } => "DimensionCheckFailed",
                Error::ConeMismatch { .. } => "ConeMismatch",
                Error::TooFewSamples => "TooFewSamples",
                Error::Scenario(_) => "Scenario",
            },
        }
    }

    /// One line: `error code=<n> kind=<Kind>: <message>`.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("error code={} kind={}: {msg}", self.exit_code(), self.kind())
    }
}

#[derive(Debug, Parser)]
#[command(name = "hyperslice", version, about = "Hyperplane slices of varieties over finite fields")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Enumeration budget (points per count); overrides HYPERSLICE_BUDGET and the scenario.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Record wall-clock times in reports.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Point counts N_1..N_M of X.
    Count {
        /// Scenario file or bundled scenario name.
        scenario: String,
        #[arg(long)]
        q: Option<u64>,
        /// Largest extension degree.
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean and variance of the slice count over random hyperplanes.
    #[command(group(ArgGroup::new("source").required(true).args(["scenario", "setmap"])))]
    #[command(group(ArgGroup::new("method").required(true).args(["exhaustive", "samples"])))]
    Stats {
        scenario: Option<String>,
        /// JSON file `{"q": .., "n": .., "points": [[..], ..]}` describing a map of sets.
        #[arg(long)]
        setmap: Option<PathBuf>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify every hyperplane for each q and fit the growth exponent.
    Census {
        scenario: String,
        #[arg(long, value_delimiter = ',')]
        q: Vec<u64>,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        max_extension: Option<u32>,
        /// Also run the other classifier and report disagreements.
        #[arg(long)]
        cross_check: bool,
        /// JSON report path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV table path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Span and locus dimensions of a point set.
    Span {
        /// JSON array of coordinate vectors.
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
    },
    /// Classify one hyperplane.
    Probe {
        scenario: String,
        #[arg(long)]
        q: Option<u64>,
        /// Comma-separated coefficients c0,...,cn.
        #[arg(long, allow_hyphen_values = true)]
        hyperplane: String,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        max_extension: Option<u32>,
    },
    /// List bundled scenarios.
    Scenarios,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Loads a scenario from a file, falling back to the bundled ones.
pub fn load_scenario(spec: &str) -> Result<Scenario, CliError> {
    let path = Path::new(spec);
    let text = if path.exists() {
        read(path)?
    } else if let Some(text) = bundled(spec) {
        text.to_string()
    } else {
        return Err(CliError::Io {
            path: spec.to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or bundled scenario"),
        });
    };
    Ok(Scenario::from_json(&text)?)
}

fn emit(out: &Option<PathBuf>, text: String) -> Result<String, CliError> {
    match out {
        Some(path) => {
            write(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SetMapFile {
    q: u64,
    n: usize,
    points: Vec<Vec<u32>>,
}

fn points_from(field: &hyperslice::fields::Field, raw: &[Vec<u32>]) -> Result<Vec<ProjPoint>, CliError> {
    raw.iter()
        .map(|v| {
            if let Some(&c) = v.iter().find(|&&c| u64::from(c) >= field.size()) {
                return Err(Error::FieldMismatch(format!("coordinate {c} is not an element of {field}")).into());
            }
            Ok(ProjPoint::new(field, &v.iter().map(|&c| Elem(c)).collect::<Vec<_>>())?)
        })
        .collect()
}

/// Runs a parsed command line and returns what goes to stdout.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.workers {
        if k == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| run(cli))
}

fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Count { scenario, q, m, out } => {
            let s = load_scenario(scenario)?;
            let q = q.unwrap_or(s.field.order());
            let inst = s.instantiate(q)?;
            let opts = s.count_options(cli.budget);
            let counts = (1..=(*m).max(1))
                .map(|m| count_points(&inst.x, m, &opts).map(|r| CountEntry { m, count: r.count }))
                .collect::<Result<Vec<_>, _>>()?;
            let doc = CountDocument { tool: TOOL.into(), version: VERSION.into(), scenario: s.name, q, counts };
            emit(out, to_json(&doc))
        }
        Command::Stats { scenario, setmap, q, exhaustive, samples, out } => {
            let sampling = match (exhaustive, samples) {
                (true, _) => Sampling::Exhaustive,
                (false, Some(k)) => Sampling::Random { samples: *k, seed: cli.seed },
                (false, None) => return Err(CliError::Usage("give --exhaustive or --samples".into())),
            };
            if let Some(path) = setmap {
                let file: SetMapFile = serde_json::from_str(&read(path)?)
                    .map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?;
                let field = field_of_order(q.unwrap_or(file.q)).map_err(Error::from)?;
                let map = SetMap::new(&field, file.n, points_from(&field, &file.points)?)?;
                let source = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
                let opts = CountOptions::default();
                let opts = CountOptions { budget: cli.budget.unwrap_or(opts.budget), ..opts };
                emit(out, to_json(&stats_doc(&map, source, sampling, cli.seed, &opts)?))
            } else {
                let s = load_scenario(scenario.as_deref().expect("clap enforces a source"))?;
                let inst = s.instantiate(q.unwrap_or(s.field.order()))?;
                let g = Geometric { x: &inst.x, phi: &inst.phi };
                emit(out, to_json(&stats_doc(&g, s.name.clone(), sampling, cli.seed, &s.count_options(cli.budget))?))
            }
        }
        Command::Census { scenario, q, mode, max_extension, cross_check, out, csv } => {
            let s = load_scenario(scenario)?;
            let qs = if q.is_empty() { s.q_list.clone() } else { q.clone() };
            let instances =
                qs.iter().map(|&q| s.instantiate(q).map(|i| (i.x, i.phi))).collect::<Result<Vec<_>, _>>()?;
            let mut cfg = s.census_config(*mode, *max_extension, cli.budget);
            cfg.cross_check = *cross_check;
            cfg.timings = cli.timings;
            let rep = census(&instances, &cfg)?;
            let doc = CensusDocument {
                tool: TOOL.into(),
                version: VERSION.into(),
                seed: cli.seed,
                scenario: s.name.clone(),
                mode: cfg.mode,
                max_extension: cfg.max_extension,
                rows: rep.rows,
                fit: rep.fit,
                theoretical_exponent: rep.theoretical_exponent,
            };
            if let Some(path) = csv {
                write(path, &census_csv(&doc.rows))?;
            }
            match out {
                Some(path) => {
                    write(path, &to_json(&doc))?;
                    Ok(census_csv(&doc.rows)
                        + &format!(
                            "fit exponent {:.4} (residual {:.4}), theoretical {}\n",
                            doc.fit.exponent, doc.fit.residual, doc.theoretical_exponent
                        ))
                }
                None => Ok(to_json(&doc)),
            }
        }
        Command::Span { points, q, n } => {
            let field = field_of_order(*q).map_err(Error::from)?;
            let raw: Vec<Vec<u32>> = serde_json::from_str(&read(points)?)
                .map_err(|e| Error::Scenario(format!("{}: {e}", points.display())))?;
            let pts = points_from(&field, &raw)?;
            if let Some(p) = pts.iter().find(|p| p.dim() != *n) {
                return Err(Error::DimensionMismatch { expected: n + 1, got: p.dim() + 1 }.into());
            }
            let span = span_dim(&field, &pts)?;
            let locus = span_locus_dim(&field, &pts)?;
            let mut containing = 0;
            for h in ProjectiveSpace::new(&field, *n).hyperplanes() {
                let mut all = true;
                for p in &pts {
                    all &= incident(&field, p, &h)?;
                }
                containing += u64::from(all);
            }
            let doc = SpanDocument {
                tool: TOOL.into(),
                version: VERSION.into(),
                q: *q,
                n: *n,
                points: pts.iter().map(|p| p.clone().into()).collect(),
                rank: rank(&field, pts.iter().map(|p| p.coords().to_vec()).collect()),
                span_dim: span,
                locus_dim: locus,
                containing_hyperplanes: containing,
                enumeration_agrees: containing == projective_count(*q, locus),
            };
            Ok(to_json(&doc))
        }
        Command::Probe { scenario, q, hyperplane, mode, max_extension } => {
            let s = load_scenario(scenario)?;
            let q = q.unwrap_or(s.field.order());
            let inst = s.instantiate(q)?;
            let cfg = s.census_config(*mode, *max_extension, cli.budget);
            let h = parse_hyperplane(hyperplane, &inst.field, inst.phi.target_dim())?;
            let v = classify(&inst.x, &inst.phi, &h, s.r, cfg.mode, cfg.max_extension, &cfg.opts)?;
            let doc = ProbeDocument {
                tool: TOOL.into(),
                version: VERSION.into(),
                scenario: s.name.clone(),
                q,
                hyperplane: h.into(),
                mode: cfg.mode,
                verdict: v.verdict.to_string(),
                very_bad: v.verdict.is_very_bad(),
                slice_counts: v.counts,
                x_count: count_points(&inst.x, 1, &cfg.opts)?.count,
            };
            Ok(to_json(&doc))
        }
        Command::Scenarios => Ok(scenario::bundled_names().map(|n| format!("{n}\n")).collect()),
    }
}

fn stats_doc<S: SliceSource>(
    src: &S,
    source: String,
    sampling: Sampling,
    seed: u64,
    opts: &CountOptions,
) -> Result<StatsDocument, CliError> {
    let q = src.field().size();
    let n = src.target_dim();
    let fibers = src.fibers(opts)?;
    let (mean, variance) = predicted_stats(fibers.domain_size, fibers.collision_sum, q, n as u32)?;
    let predicted = Moments { mean, variance };
    let bound = variance_bound(&fibers, q, n as u32);
    let hyperplanes = ProjectiveSpace::new(src.field(), n).len();
    let doc = match sampling {
        Sampling::Exhaustive => {
            let s = exact_stats(src, opts)?;
            let exact = Moments { mean: s.mean, variance: s.variance };
            StatsDocument {
                tool: TOOL.into(),
                version: VERSION.into(),
                seed,
                source,
                q,
                n,
                method: "exhaustive".into(),
                hyperplanes,
                fibers,
                equal: Some(exact == predicted),
                exact: Some(exact),
                predicted,
                empirical: None,
                variance_bound: bound,
            }
        }
        Sampling::Random { .. } => {
            let e = mc_stats(src, sampling, opts)?;
            StatsDocument {
                tool: TOOL.into(),
                version: VERSION.into(),
                seed,
                source,
                q,
                n,
                method: "samples".into(),
                hyperplanes,
                fibers,
                predicted,
                exact: None,
                equal: None,
                empirical: Some(e),
                variance_bound: bound,
            }
        }
    };
    Ok(doc)
}

//! Component-count estimates from point counts, the very-bad-hyperplane
//! classifier and hyperplane censuses with a growth-exponent fit.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projgeom::{Hyperplane, ProjectiveSpace};
use crate::slicestats::{chebyshev_bad_bound, predicted_stats, rational_string, to_f64};
use crate::variety::{count_points, fiber_profile, slice, ConstructibleSet, CountOptions, FiberProfile, MorphismToPn};

/// Default number of extension degrees counted.
pub const DEFAULT_MAX_EXTENSION: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentEstimate {
    /// `N_1..N_M`.
    pub counts: Vec<u64>,
    /// `None` when every count is zero.
    pub dim: Option<u32>,
    /// `round(N_1 / q^r)`.
    pub components: u64,
}

/// `round(n / q^r)`, halves rounded up.
fn round_ratio(n: u64, q: u64, r: u32) -> u64 {
    let d = u128::from(q).pow(r);
    ((2 * u128::from(n) + d) / (2 * d)) as u64
}

/// Dimension guess `round(ln N_m / (m ln q))` from the last nonzero count.
pub fn growth_dimension(counts: &[u64], q: u64) -> Option<u32> {
    let (i, &n) = counts.iter().enumerate().rev().find(|(_, &n)| n > 0)?;
    let m = (i + 1) as f64;
    Some(((n as f64).ln() / (m * (q as f64).ln())).round().max(0.0) as u32)
}

pub fn estimate_from_counts(counts: Vec<u64>, q: u64, declared: Option<u32>) -> ComponentEstimate {
    if counts.iter().all(|&n| n == 0) {
        return ComponentEstimate { counts, dim: None, components: 0 };
    }
    let r = declared.or_else(|| growth_dimension(&counts, q)).unwrap_or(0);
    let components = round_ratio(counts[0], q, r);
    ComponentEstimate { counts, dim: Some(r), components }
}

/// Counts `X` over `F_{q^m}` for `m = 1..M` and estimates its components.
pub fn lw_estimate(
    x: &ConstructibleSet,
    max_extension: u32,
    declared: Option<u32>,
    opts: &CountOptions,
) -> Result<ComponentEstimate> {
    let counts =
        (1..=max_extension.max(1)).map(|m| count_points(x, m, opts).map(|r| r.count)).collect::<Result<Vec<_>>>()?;
    Ok(estimate_from_counts(counts, x.field().size(), declared))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Threshold,
    Estimator,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Threshold => "threshold",
            Mode::Estimator => "estimator",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "threshold" => Ok(Mode::Threshold),
            "estimator" => Ok(Mode::Estimator),
            _ => Err(format!("unknown mode '{s}' (expected threshold or estimator)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Reason {
    Empty,
    CountLow,
    CountHigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Good,
    VeryBad(Reason),
    /// `phi(X)` lies in `H`; counted as good.
    EqualsX,
}

impl Verdict {
    pub fn is_very_bad(self) -> bool {
        matches!(self, Verdict::VeryBad(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Good => f.write_str("Good"),
            Verdict::EqualsX => f.write_str("EqualsX"),
            Verdict::VeryBad(r) => write!(f, "VeryBad({r:?})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceVerdict {
    pub hyperplane: Hyperplane,
    pub verdict: Verdict,
    /// Slice counts `N_1, N_2, ...` that were needed for the decision.
    pub counts: Vec<u64>,
}

/// Lazily fetched point counts; `Ok(None)` means over budget.
struct Counts<F: FnMut(u32) -> Result<Option<u64>>> {
    fetch: F,
    known: Vec<Option<u64>>,
}

impl<F: FnMut(u32) -> Result<Option<u64>>> Counts<F> {
    fn get(&mut self, m: u32) -> Result<Option<u64>> {
        while self.known.len() < m as usize {
            let next = self.known.len() as u32 + 1;
            let v = (self.fetch)(next)?;
            self.known.push(v);
        }
        Ok(self.known[m as usize - 1])
    }

    fn fetched(&self) -> Vec<u64> {
        self.known.iter().map_while(|c| *c).collect()
    }
}

fn optional(r: Result<u64>) -> Result<Option<u64>> {
    match r {
        Ok(n) => Ok(Some(n)),
        Err(Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Verdict for one slice from its counts `n` and those of `X`.
fn decide<F, G>(mode: Mode, q: u64, r: u32, max_ext: u32, n: &mut Counts<F>, x: &mut Counts<G>) -> Result<Verdict>
where
    F: FnMut(u32) -> Result<Option<u64>>,
    G: FnMut(u32) -> Result<Option<u64>>,
{
    let n1 = n.get(1)?.expect("first count is always fetched");
    if n1 > 0 && Some(n1) == x.get(1)? {
        let same = max_ext < 2 || {
            let (a, b) = (n.get(2)?, x.get(2)?);
            a.is_none() || b.is_none() || a == b
        };
        if same {
            return Ok(Verdict::EqualsX);
        }
    }
    let empty_or_low = |n: &mut Counts<F>| -> Result<Verdict> {
        for m in 2..=max_ext {
            if n.get(m)?.is_some_and(|c| c > 0) {
                return Ok(Verdict::VeryBad(Reason::CountLow));
            }
        }
        Ok(Verdict::VeryBad(Reason::Empty))
    };
    let thr = q.pow(r - 1);
    match mode {
        Mode::Threshold => {
            if n1 == 0 {
                return empty_or_low(n);
            }
            if 2 * n1.abs_diff(thr) < thr {
                Ok(Verdict::Good)
            } else if n1 < thr {
                Ok(Verdict::VeryBad(Reason::CountLow))
            } else {
                Ok(Verdict::VeryBad(Reason::CountHigh))
            }
        }
        Mode::Estimator => match round_ratio(n1, q, r - 1) {
            1 => Ok(Verdict::Good),
            0 if n1 == 0 => empty_or_low(n),
            0 => Ok(Verdict::VeryBad(Reason::CountLow)),
            _ => Ok(Verdict::VeryBad(Reason::CountHigh)),
        },
    }
}

/// Classifies `H` by counting `phi^{-1} H` directly; `r = dim X`.
pub fn classify(
    x: &ConstructibleSet,
    phi: &MorphismToPn,
    h: &Hyperplane,
    r: u32,
    mode: Mode,
    max_extension: u32,
    opts: &CountOptions,
) -> Result<SliceVerdict> {
    if r == 0 {
        return Err(Error::DimensionTooSmall);
    }
    let s = slice(x, phi, h)?;
    let mut n = Counts {
        fetch: |m| {
            if m == 1 {
                count_points(&s, 1, opts).map(|c| Some(c.count))
            } else {
                optional(count_points(&s, m, opts).map(|c| c.count))
            }
        },
        known: Vec::new(),
    };
    let mut xc = Counts { fetch: |m| optional(count_points(x, m, opts).map(|c| c.count)), known: Vec::new() };
    let verdict = decide(mode, x.field().size(), r, max_extension, &mut n, &mut xc)?;
    Ok(SliceVerdict { hyperplane: h.clone(), verdict, counts: n.fetched() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub exponent: f64,
    pub intercept: f64,
    /// Largest absolute deviation in log space.
    pub residual: f64,
    pub points: usize,
}

/// Least squares of `ln count` against `ln q` over the points with `count > 0`.
pub fn fit_exponent(points: &[(u64, u64)]) -> Result<Fit> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|p| p.1 > 0).map(|&(q, c)| ((q as f64).ln(), (c as f64).ln())).collect();
    let k = pts.len();
    let distinct = {
        let mut qs: Vec<u64> = points.iter().filter(|p| p.1 > 0).map(|p| p.0).collect();
        qs.sort_unstable();
        qs.dedup();
        qs.len()
    };
    if k < 3 || distinct < 2 {
        return Err(Error::FitUnderdetermined { usable: k });
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = pts.iter().map(|p| (p.1 - intercept - exponent * p.0).abs()).fold(0.0, f64::max);
    Ok(Fit { exponent, intercept, residual, points: k })
}

#[derive(Debug, Clone)]
pub struct CensusConfig {
    /// Declared `dim X`.
    pub r: u32,
    /// Declared `codim phi(X)`.
    pub codim: u32,
    pub mode: Mode,
    pub max_extension: u32,
    pub opts: CountOptions,
    /// Also run the other mode and count disagreements.
    pub cross_check: bool,
    /// Record wall time; otherwise `runtime_ms` is 0 so reports are reproducible.
    pub timings: bool,
}

impl CensusConfig {
    pub fn new(r: u32, codim: u32) -> Self {
        CensusConfig {
            r,
            codim,
            mode: Mode::Threshold,
            max_extension: DEFAULT_MAX_EXTENSION,
            opts: CountOptions::default(),
            cross_check: false,
            timings: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub q: u64,
    pub total_hyperplanes: u64,
    pub very_bad: u64,
    pub good: u64,
    pub equals_x: u64,
    pub empty: u64,
    pub count_low: u64,
    pub count_high: u64,
    pub mode: Mode,
    pub runtime_ms: u64,
    /// `#X(F_{q^m})` for `m = 1..M` (over-budget degrees omitted).
    pub x_counts: Vec<u64>,
    /// Exact `sigma^2` of the slice count.
    #[serde(with = "rational_string")]
    pub variance: crate::projgeom::Rational,
    /// `4 sigma^2 / q^(2r - 2)`.
    #[serde(with = "rational_string")]
    pub chebyshev_bound: crate::projgeom::Rational,
    pub chebyshev_bound_f64: f64,
    pub very_bad_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub disagreements: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub rows: Vec<CensusRow>,
    pub fit: Fit,
    pub theoretical_exponent: u32,
}

/// Fiber profiles of `phi` over `F_{q^m}`, `m = 1..M`, stopping at the first over-budget degree.
fn profiles(x: &ConstructibleSet, phi: &MorphismToPn, max_ext: u32, opts: &CountOptions) -> Result<Vec<FiberProfile>> {
    let mut out = vec![fiber_profile(x, phi, 1, opts)?];
    for m in 2..=max_ext {
        match fiber_profile(x, phi, m, opts) {
            Ok(p) => out.push(p),
            Err(Error::BudgetExceeded { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn verdict_from_profiles(mode: Mode, q: u64, r: u32, max_ext: u32, ps: &[FiberProfile], h: &Hyperplane) -> Verdict {
    let mut n = Counts { fetch: |m: u32| Ok(ps.get(m as usize - 1).map(|p| p.slice_count(h))), known: Vec::new() };
    let mut x = Counts { fetch: |m: u32| Ok(ps.get(m as usize - 1).map(|p| p.domain_size)), known: Vec::new() };
    decide(mode, q, r, max_ext, &mut n, &mut x).expect("profile counts never fail")
}

/// Classifies every hyperplane over the field of `x`.
///
/// Slice counts come from the fiber profiles of `phi` over `F_{q^m}`; the
/// declared dimension is checked against the growth of `#X(F_{q^m})` and
/// base-point-freeness is checked while profiling.
pub fn census_row(x: &ConstructibleSet, phi: &MorphismToPn, cfg: &CensusConfig) -> Result<CensusRow> {
    if cfg.r == 0 {
        return Err(Error::DimensionTooSmall);
    }
    let start = Instant::now();
    let q = x.field().size();
    let n = phi.target_dim();
    let max_ext = cfg.max_extension.max(1);
    let ps = profiles(x, phi, max_ext, &cfg.opts)?;
    let x_counts: Vec<u64> = ps.iter().map(|p| p.domain_size).collect();
    let estimated = growth_dimension(&x_counts, q).map_or(-1, i64::from);
    if estimated != i64::from(cfg.r) {
        return Err(Error::DimensionCheckFailed { declared: cfg.r, estimated, q });
    }
    let dual = ProjectiveSpace::new(x.field(), n);
    let verdicts: Vec<(Verdict, Option<Verdict>)> = (0..dual.len())
        .into_par_iter()
        .map(|rank| {
            let h = dual.hyperplane(rank);
            let v = verdict_from_profiles(cfg.mode, q, cfg.r, max_ext, &ps, &h);
            let other = cfg.cross_check.then(|| {
                let alt = match cfg.mode {
                    Mode::Threshold => Mode::Estimator,
                    Mode::Estimator => Mode::Threshold,
                };
                verdict_from_profiles(alt, q, cfg.r, max_ext, &ps, &h)
            });
            (v, other)
        })
        .collect();
    let total = dual.len();
    let tally = |pred: &dyn Fn(Verdict) -> bool| verdicts.iter().filter(|(v, _)| pred(*v)).count() as u64;
    let very_bad = tally(&|v| v.is_very_bad());
    let (_, variance) = predicted_stats(ps[0].domain_size, ps[0].collision_sum, q, n as u32)?;
    let chebyshev_bound = chebyshev_bad_bound(&variance, q, cfg.r)?;
    Ok(CensusRow {
        q,
        total_hyperplanes: total,
        very_bad,
        good: tally(&|v| v == Verdict::Good),
        equals_x: tally(&|v| v == Verdict::EqualsX),
        empty: tally(&|v| v == Verdict::VeryBad(Reason::Empty)),
        count_low: tally(&|v| v == Verdict::VeryBad(Reason::CountLow)),
        count_high: tally(&|v| v == Verdict::VeryBad(Reason::CountHigh)),
        mode: cfg.mode,
        runtime_ms: if cfg.timings { start.elapsed().as_millis() as u64 } else { 0 },
        x_counts,
        chebyshev_bound_f64: to_f64(&chebyshev_bound),
        variance,
        chebyshev_bound,
        very_bad_fraction: very_bad as f64 / total as f64,
        disagreements: cfg.cross_check.then(|| {
            verdicts.iter().filter(|(a, b)| b.is_some_and(|b| b.is_very_bad() != a.is_very_bad())).count() as u64
        }),
    })
}

/// One census row per instance (typically the same scenario over several fields) plus the fit.
pub fn census(instances: &[(ConstructibleSet, MorphismToPn)], cfg: &CensusConfig) -> Result<CensusReport> {
    let rows = instances.iter().map(|(x, phi)| census_row(x, phi, cfg)).collect::<Result<Vec<_>>>()?;
    let fit = fit_exponent(&rows.iter().map(|r| (r.q, r.very_bad)).collect::<Vec<_>>())?;
    Ok(CensusReport { rows, fit, theoretical_exponent: cfg.codim + 1 })
}

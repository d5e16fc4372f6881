//! Constructible sets, morphisms to `P^n`, brute-force point counts, slices
//! and fiber profiles.
//!
//! A point of `X = V(E) \ V(G)` is counted iff every equation vanishes and
//! either `G` is empty or some inequation is nonzero. Enumeration is split
//! into fixed contiguous chunks processed in parallel and merged in chunk
//! order, so results never depend on the number of workers.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Elem, Field};
use crate::polyexpr::{CompiledSystem, Poly, Scratch, Vars};
use crate::projgeom::{Hyperplane, ProjPoint, ProjectiveSpace};

/// Default enumeration budget, in points enumerated.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "HYPERSLICE_BUDGET";

const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmbientKind {
    Affine,
    Projective,
}

/// Affine space `A^N` (variables `x_1..x_N`) or projective space `P^N`
/// (homogeneous variables `x_0..x_N`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ambient {
    kind: AmbientKind,
    vars: Vars,
}

impl Ambient {
    pub fn new(kind: AmbientKind, vars: Vars) -> Result<Self> {
        let a = Ambient { kind, vars };
        if a.vars.is_empty() || (kind == AmbientKind::Projective && a.vars.len() < 2) {
            return Err(Error::InvalidVariety("ambient dimension must be at least 1".into()));
        }
        Ok(a)
    }

    pub fn kind(&self) -> AmbientKind {
        self.kind
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            AmbientKind::Affine => self.vars.len(),
            AmbientKind::Projective => self.vars.len() - 1,
        }
    }
}

/// `V(E) \ V(G)` inside an ambient space over a fixed field.
#[derive(Debug, Clone)]
pub struct ConstructibleSet {
    field: Field,
    ambient: Ambient,
    equations: Vec<Poly>,
    inequations: Vec<Poly>,
}

fn check_poly(field: &Field, ambient: &Ambient, p: &Poly) -> Result<()> {
    if p.field() != field {
        return Err(Error::FieldMismatch(format!("polynomial over {}, set over {}", p.field(), field)));
    }
    if p.vars()[..] != ambient.vars()[..] {
        return Err(Error::InvalidVariety(format!(
            "polynomial variables {:?} differ from ambient variables {:?}",
            p.vars(),
            ambient.vars()
        )));
    }
    if ambient.kind == AmbientKind::Projective && !p.is_homogeneous() {
        return Err(Error::InvalidVariety(format!("{p} is not homogeneous")));
    }
    Ok(())
}

impl ConstructibleSet {
    pub fn new(field: &Field, ambient: Ambient, equations: Vec<Poly>, inequations: Vec<Poly>) -> Result<Self> {
        for p in equations.iter().chain(&inequations) {
            check_poly(field, &ambient, p)?;
        }
        Ok(ConstructibleSet { field: field.clone(), ambient, equations, inequations })
    }

    /// The whole ambient space.
    pub fn full(field: &Field, ambient: Ambient) -> Self {
        ConstructibleSet { field: field.clone(), ambient, equations: Vec::new(), inequations: Vec::new() }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn equations(&self) -> &[Poly] {
        &self.equations
    }

    pub fn inequations(&self) -> &[Poly] {
        &self.inequations
    }

    /// Adds one equation.
    pub fn with_equation(&self, eq: Poly) -> Result<Self> {
        check_poly(&self.field, &self.ambient, &eq)?;
        let mut out = self.clone();
        out.equations.push(eq);
        Ok(out)
    }

    /// True when some equation is a nonzero constant.
    pub fn trivially_empty(&self) -> bool {
        self.equations.iter().any(|e| e.as_constant().is_some_and(|c| !c.is_zero()))
    }
}

/// A morphism `X -> P^n` given by components `[f_0 : ... : f_n]`.
#[derive(Debug, Clone)]
pub struct MorphismToPn {
    components: Vec<Poly>,
}

impl MorphismToPn {
    pub fn new(x: &ConstructibleSet, components: Vec<Poly>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::InvalidVariety("a morphism to P^n needs at least 2 components".into()));
        }
        for c in &components {
            check_poly(&x.field, &x.ambient, c)?;
        }
        if components.iter().all(Poly::is_zero) {
            return Err(Error::InvalidVariety("all components are zero".into()));
        }
        if x.ambient.kind == AmbientKind::Projective {
            let mut degrees = components.iter().filter(|c| !c.is_zero()).map(|c| c.total_degree());
            let first = degrees.next();
            if degrees.any(|d| Some(d) != first) {
                return Err(Error::InvalidVariety("components must share one degree".into()));
            }
        }
        Ok(MorphismToPn { components })
    }

    /// The inclusion `[x_0 : ... : x_N]` of a projective set.
    pub fn inclusion(x: &ConstructibleSet) -> Result<Self> {
        if x.ambient.kind != AmbientKind::Projective {
            return Err(Error::InvalidVariety("inclusion needs a projective ambient".into()));
        }
        let comps = (0..x.ambient.nvars()).map(|i| Poly::var(&x.field, x.ambient.vars(), i)).collect();
        MorphismToPn::new(x, comps)
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    /// Target dimension `n`.
    pub fn target_dim(&self) -> usize {
        self.components.len() - 1
    }
}

/// Enumeration settings.
#[derive(Debug, Clone, Copy)]
pub struct CountOptions {
    /// Maximum number of points to enumerate.
    pub budget: u64,
    /// For projective sets, also count the affine cone and check consistency.
    pub cone_check: bool,
}

impl Default for CountOptions {
    /// Budget from `HYPERSLICE_BUDGET` if set, else [`DEFAULT_BUDGET`].
    fn default() -> Self {
        let budget = std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET);
        CountOptions { budget, cone_check: false }
    }
}

impl CountOptions {
    pub fn with_budget(budget: u64) -> Self {
        CountOptions { budget, cone_check: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCountRecord {
    /// Extension degree.
    pub m: u32,
    pub count: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// The set of coordinate vectors enumerated for one ambient over one field.
#[derive(Debug, Clone)]
pub(crate) enum PointSpace {
    Affine { q: u64, nvars: usize },
    Projective(ProjectiveSpace),
}

impl PointSpace {
    pub(crate) fn new(kind: AmbientKind, field: &Field, nvars: usize) -> Self {
        match kind {
            AmbientKind::Affine => PointSpace::Affine { q: field.size(), nvars },
            AmbientKind::Projective => PointSpace::Projective(ProjectiveSpace::new(field, nvars - 1)),
        }
    }

    /// Number of points, `None` on overflow.
    pub(crate) fn cost(&self) -> Option<u128> {
        match self {
            PointSpace::Affine { q, nvars } => u128::from(*q).checked_pow(*nvars as u32),
            PointSpace::Projective(s) => {
                let q = u128::from(s.field().size());
                let top = q.checked_pow(s.dim() as u32 + 1)?;
                Some((top - 1) / (q - 1))
            }
        }
    }

    pub(crate) fn checked_len(&self, budget: u64) -> Result<u64> {
        let cost = self.cost().unwrap_or(u128::MAX);
        if cost > u128::from(budget) {
            return Err(Error::BudgetExceeded { cost, budget });
        }
        Ok(cost as u64)
    }

    #[inline]
    pub(crate) fn write(&self, mut rank: u64, out: &mut [Elem]) {
        match self {
            PointSpace::Affine { q, .. } => {
                for slot in out.iter_mut().rev() {
                    *slot = Elem((rank % q) as u32);
                    rank /= q;
                }
            }
            PointSpace::Projective(s) => s.write_point(rank, out),
        }
    }
}

/// Runs `f` on contiguous chunks of `0..len` in parallel; results come back in chunk order.
pub(crate) fn map_chunks<T, F>(len: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    let nchunks = len.div_ceil(CHUNK);
    (0..nchunks).into_par_iter().map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(len))).collect()
}

/// Compiled membership test plus optional extra polynomials.
struct Evaluator {
    sys: CompiledSystem,
    ne: usize,
    ng: usize,
}

impl Evaluator {
    fn new(x: &ConstructibleSet, extra: &[Poly], field: &Field) -> Result<Self> {
        let all: Vec<Poly> =
            x.equations.iter().chain(&x.inequations).chain(extra).filter(|p| !p.is_zero()).cloned().collect();
        let ne = x.equations.iter().filter(|p| !p.is_zero()).count();
        let ng = x.inequations.iter().filter(|p| !p.is_zero()).count();
        let sys = CompiledSystem::new(&all, x.ambient.nvars(), field)?;
        // a zero inequation removes everything it guards; keep G nonempty so the rule still applies
        let ng = if ng == 0 && !x.inequations.is_empty() { usize::MAX } else { ng };
        Ok(Evaluator { sys, ne, ng })
    }

    #[inline]
    fn member(&self, scratch: &Scratch) -> bool {
        if (0..self.ne).any(|i| !self.sys.eval(i, scratch).is_zero()) {
            return false;
        }
        match self.ng {
            0 => true,
            usize::MAX => false,
            ng => (self.ne..self.ne + ng).any(|i| !self.sys.eval(i, scratch).is_zero()),
        }
    }
}

fn enumeration_field(x: &ConstructibleSet, m: u32) -> Result<Field> {
    if m == 1 {
        Ok(x.field.clone())
    } else {
        Ok(x.field.extension(m)?.field)
    }
}

/// Number of `F_{q^m}`-points of `x`, by full enumeration.
pub fn count_points(x: &ConstructibleSet, m: u32, opts: &CountOptions) -> Result<PointCountRecord> {
    let start = Instant::now();
    let field = enumeration_field(x, m)?;
    let space = PointSpace::new(x.ambient.kind, &field, x.ambient.nvars());
    let len = space.checked_len(opts.budget)?;
    let count = if x.trivially_empty() { 0 } else { count_in(x, &field, &space, len)? };
    if opts.cone_check && x.ambient.kind == AmbientKind::Projective {
        check_cone(x, m, &field, count, opts)?;
    }
    Ok(PointCountRecord { m, count, elapsed: start.elapsed() })
}

fn count_in(x: &ConstructibleSet, field: &Field, space: &PointSpace, len: u64) -> Result<u64> {
    let ev = Evaluator::new(x, &[], field)?;
    let nvars = x.ambient.nvars();
    let parts = map_chunks(len, |range| {
        let mut scratch = Scratch::default();
        let mut pt = vec![Elem::ZERO; nvars];
        let mut n = 0u64;
        for rank in range {
            space.write(rank, &mut pt);
            ev.sys.load(&pt, &mut scratch);
            n += u64::from(ev.member(&scratch));
        }
        n
    });
    Ok(parts.into_iter().sum())
}

/// Points of the affine cone over a projective set, including the origin when it qualifies.
pub fn affine_cone_count(x: &ConstructibleSet, m: u32, opts: &CountOptions) -> Result<u64> {
    let field = enumeration_field(x, m)?;
    let space = PointSpace::Affine { q: field.size(), nvars: x.ambient.nvars() };
    let len = space.checked_len(opts.budget)?;
    if x.trivially_empty() {
        return Ok(0);
    }
    count_in(x, &field, &space, len)
}

fn check_cone(x: &ConstructibleSet, m: u32, field: &Field, points: u64, opts: &CountOptions) -> Result<()> {
    let cone = affine_cone_count(x, m, opts)?;
    let ev = Evaluator::new(x, &[], field)?;
    let mut scratch = Scratch::default();
    ev.sys.load(&vec![Elem::ZERO; x.ambient.nvars()], &mut scratch);
    let origin = u64::from(ev.member(&scratch) && !x.trivially_empty());
    if cone - origin != points * (field.size() - 1) {
        return Err(Error::ConeMismatch { cone, points });
    }
    Ok(())
}

/// `phi^{-1} H`: `x` with the equation `sum c_i f_i` appended.
pub fn slice(x: &ConstructibleSet, phi: &MorphismToPn, h: &Hyperplane) -> Result<ConstructibleSet> {
    if h.coeffs().len() != phi.components.len() {
        return Err(Error::DimensionMismatch { expected: phi.components.len(), got: h.coeffs().len() });
    }
    let mut eq = Poly::zero(&x.field, x.ambient.vars());
    for (&c, f) in h.coeffs().iter().zip(&phi.components) {
        if !c.is_zero() {
            eq = &eq + &f.scale(c);
        }
    }
    x.with_equation(eq)
}

/// Fiber data of `phi` on `X(F_{q^m})`.
#[derive(Debug, Clone)]
pub struct FiberProfile {
    /// Field the points and image live over.
    pub field: Field,
    pub n: usize,
    pub domain_size: u64,
    pub image_size: u64,
    pub max_fiber: u64,
    /// `sum_y f_y^2`.
    pub collision_sum: u128,
    /// Image points with fiber sizes, in canonical order.
    pub fibers: Vec<(ProjPoint, u64)>,
}

impl FiberProfile {
    /// Points of `phi^{-1} H` over the profile's field, for `H` defined over a subfield.
    pub fn slice_count(&self, h: &Hyperplane) -> u64 {
        let f = &self.field;
        self.fibers
            .iter()
            .filter(|(y, _)| {
                y.coords().iter().zip(h.coeffs()).fold(Elem::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b))).is_zero()
            })
            .map(|(_, k)| k)
            .sum()
    }
}

struct ImageChunk {
    fibers: HashMap<u64, u64>,
    base_point: Option<Vec<u32>>,
}

/// Enumerates `X(F_{q^m})` and tallies the fibers of `phi`.
pub fn fiber_profile(x: &ConstructibleSet, phi: &MorphismToPn, m: u32, opts: &CountOptions) -> Result<FiberProfile> {
    let field = enumeration_field(x, m)?;
    let n = phi.target_dim();
    let target = ProjectiveSpace::new(&field, n);
    let space = PointSpace::new(x.ambient.kind, &field, x.ambient.nvars());
    let len = space.checked_len(opts.budget)?;
    let mut fibers = BTreeMap::new();
    if !x.trivially_empty() {
        let ev = Evaluator::new(x, &phi.components, &field)?;
        let off = ev.sys.len() - phi.components.iter().filter(|p| !p.is_zero()).count();
        let nvars = x.ambient.nvars();
        let parts = map_chunks(len, |range| {
            let mut scratch = Scratch::default();
            let mut pt = vec![Elem::ZERO; nvars];
            let mut val = vec![Elem::ZERO; n + 1];
            let mut out = ImageChunk { fibers: HashMap::new(), base_point: None };
            for rank in range {
                space.write(rank, &mut pt);
                ev.sys.load(&pt, &mut scratch);
                if !ev.member(&scratch) {
                    continue;
                }
                let mut k = off;
                for (slot, c) in val.iter_mut().zip(&phi.components) {
                    *slot = if c.is_zero() {
                        Elem::ZERO
                    } else {
                        k += 1;
                        ev.sys.eval(k - 1, &scratch)
                    };
                }
                match ProjPoint::new(&field, &val) {
                    Ok(y) => *out.fibers.entry(target.rank_of(y.coords())).or_default() += 1,
                    Err(_) => {
                        out.base_point = Some(pt.iter().map(|e| e.0).collect());
                        break;
                    }
                }
            }
            out
        });
        for part in parts {
            if let Some(point) = part.base_point {
                return Err(Error::BasePointHit { point });
            }
            for (r, k) in part.fibers {
                *fibers.entry(r).or_insert(0u64) += k;
            }
        }
    }
    let fibers: Vec<(ProjPoint, u64)> = fibers.into_iter().map(|(r, k)| (target.point(r), k)).collect();
    Ok(FiberProfile {
        field,
        n,
        domain_size: fibers.iter().map(|f| f.1).sum(),
        image_size: fibers.len() as u64,
        max_fiber: fibers.iter().map(|f| f.1).max().unwrap_or(0),
        collision_sum: fibers.iter().map(|f| u128::from(f.1) * u128::from(f.1)).sum(),
        fibers,
    })
}

/// Result of a base-point search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasePointReport {
    pub free: bool,
    /// First point (in enumeration order) where every component vanishes.
    pub witness: Option<Vec<u32>>,
}

pub fn check_base_point_free(
    x: &ConstructibleSet,
    phi: &MorphismToPn,
    m: u32,
    opts: &CountOptions,
) -> Result<BasePointReport> {
    match fiber_profile(x, phi, m, opts) {
        Ok(_) => Ok(BasePointReport { free: true, witness: None }),
        Err(Error::BasePointHit { point }) => Ok(BasePointReport { free: false, witness: Some(point) }),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::field_of_order;
    use crate::polyexpr::{make_vars, parse_poly};
    use crate::projgeom::enum_hyperplanes;

    fn set(q: u64, kind: AmbientKind, vars: &[&str], eqs: &[&str], ineqs: &[&str]) -> ConstructibleSet {
        let f = field_of_order(q).unwrap();
        let v = make_vars(vars).unwrap();
        let p = |s: &&str| parse_poly(s, &v, &f).unwrap();
        ConstructibleSet::new(
            &f,
            Ambient::new(kind, v.clone()).unwrap(),
            eqs.iter().map(p).collect(),
            ineqs.iter().map(p).collect(),
        )
        .unwrap()
    }

    fn morphism(x: &ConstructibleSet, comps: &[&str]) -> MorphismToPn {
        let c = comps.iter().map(|s| parse_poly(s, x.ambient().vars(), x.field()).unwrap()).collect();
        MorphismToPn::new(x, c).unwrap()
    }

    fn hp(x: &ConstructibleSet, c: &[i64]) -> Hyperplane {
        Hyperplane::new(x.field(), &c.iter().map(|&v| x.field().from_int(v)).collect::<Vec<_>>()).unwrap()
    }

    fn count(x: &ConstructibleSet, m: u32) -> u64 {
        count_points(x, m, &CountOptions::with_budget(DEFAULT_BUDGET)).unwrap().count
    }

    /// Independent oracle: nested loops with direct polynomial evaluation.
    fn naive_count(x: &ConstructibleSet) -> u64 {
        let f = x.field();
        let q = f.size();
        let nv = x.ambient().nvars();
        let mut n = 0;
        for k in 0..q.pow(nv as u32) {
            let mut r = k;
            let pt: Vec<Elem> = (0..nv)
                .map(|_| {
                    let c = Elem((r % q) as u32);
                    r /= q;
                    c
                })
                .collect();
            if x.ambient().kind() == AmbientKind::Projective {
                // keep only canonical representatives
                match pt.iter().find(|c| !c.is_zero()) {
                    Some(&c) if c == Elem::ONE => {}
                    _ => continue,
                }
            }
            let eqs = x.equations().iter().all(|e| e.eval(&pt).unwrap().is_zero());
            let gs = x.inequations().is_empty() || x.inequations().iter().any(|g| !g.eval(&pt).unwrap().is_zero());
            n += u64::from(eqs && gs);
        }
        n
    }

    #[test]
    fn count_examples() {
        assert_eq!(count(&set(5, AmbientKind::Affine, &["x", "y"], &[], &[]), 1), 25);
        let quadric = set(3, AmbientKind::Projective, &["x0", "x1", "x2", "x3"], &["x0*x3 - x1*x2"], &[]);
        assert_eq!(count(&quadric, 1), 16);
        assert_eq!(count(&set(5, AmbientKind::Affine, &["x", "y"], &["x*y"], &[]), 1), 9);
    }

    #[test]
    fn counts_match_naive_oracle() {
        let cases = [
            set(5, AmbientKind::Affine, &["x", "y", "z"], &["x^2 + y^2 - z"], &["x"]),
            set(4, AmbientKind::Affine, &["x", "y"], &["y^2 + x*y + x^3 + g"], &[]),
            set(3, AmbientKind::Projective, &["a", "b", "c"], &["a*b - c^2"], &[]),
            set(7, AmbientKind::Projective, &["a", "b", "c"], &[], &["a", "b*c"]),
            set(2, AmbientKind::Affine, &["x", "y", "z", "w"], &["x*y + z*w + 1"], &["x + y"]),
            set(3, AmbientKind::Affine, &["x"], &["0"], &["0"]),
        ];
        for x in &cases {
            assert_eq!(count(x, 1), naive_count(x), "{:?}", x.equations());
        }
    }

    #[test]
    fn extension_counts() {
        // x^2 + 1 over F_3: no roots in F_3, two in F_9
        let x = set(3, AmbientKind::Affine, &["x"], &["x^2 + 1"], &[]);
        assert_eq!(count(&x, 1), 0);
        assert_eq!(count(&x, 2), 2);
        // smooth conic has q^m + 1 points
        let conic = set(3, AmbientKind::Projective, &["x", "y", "z"], &["x*y - z^2"], &[]);
        for m in 1..=3 {
            assert_eq!(count(&conic, m), 3u64.pow(m) + 1);
        }
        let quadric = set(3, AmbientKind::Projective, &["x0", "x1", "x2", "x3"], &["x0*x3 - x1*x2"], &[]);
        assert_eq!(count(&quadric, 2), 100);
    }

    #[test]
    fn cone_consistency() {
        for q in [3, 5] {
            let quadric = set(q, AmbientKind::Projective, &["x0", "x1", "x2", "x3"], &["x0*x3 - x1*x2"], &[]);
            let opts = CountOptions { budget: DEFAULT_BUDGET, cone_check: true };
            let n = count_points(&quadric, 1, &opts).unwrap().count;
            assert_eq!(n, (q + 1) * (q + 1));
            assert_eq!(affine_cone_count(&quadric, 1, &opts).unwrap() - 1, n * (q - 1));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let x = set(7, AmbientKind::Affine, &["x", "y", "z"], &[], &[]);
        let err = count_points(&x, 1, &CountOptions::with_budget(100)).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded { cost: 343, budget: 100 });
        assert_eq!(count_points(&x, 1, &CountOptions::with_budget(343)).unwrap().count, 343);
    }

    #[test]
    fn projective_needs_homogeneous() {
        let f = field_of_order(3).unwrap();
        let v = make_vars(&["x", "y", "z"]).unwrap();
        let amb = Ambient::new(AmbientKind::Projective, v.clone()).unwrap();
        let bad = parse_poly("x*y - z", &v, &f).unwrap();
        assert!(matches!(ConstructibleSet::new(&f, amb.clone(), vec![bad], vec![]), Err(Error::InvalidVariety(_))));
        let zero = parse_poly("0", &v, &f).unwrap();
        assert!(ConstructibleSet::new(&f, amb, vec![zero], vec![]).is_ok());
    }

    #[test]
    fn slice_examples() {
        let x = set(5, AmbientKind::Affine, &["x1", "x2", "y"], &["y^2 - x1"], &[]);
        let phi = morphism(&x, &["1", "x1", "x2"]);
        let s = slice(&x, &phi, &hp(&x, &[0, 1, 0])).unwrap();
        assert_eq!(s.equations().last().unwrap().to_string(), "x1");
        let s = slice(&x, &phi, &hp(&x, &[1, 0, 0])).unwrap();
        assert!(s.trivially_empty());
        assert_eq!(count(&s, 1), 0);
        let quadric = set(3, AmbientKind::Projective, &["x0", "x1", "x2", "x3"], &["x0*x3 - x1*x2"], &[]);
        let inc = MorphismToPn::inclusion(&quadric).unwrap();
        let s = slice(&quadric, &inc, &hp(&quadric, &[1, 0, 0, 0])).unwrap();
        assert_eq!(s.equations().last().unwrap().to_string(), "x0");
        assert!(matches!(slice(&x, &phi, &hp(&x, &[1, 0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn fiber_profile_examples() {
        let x = set(5, AmbientKind::Affine, &["x1", "x2", "y"], &["y^2 - x1"], &[]);
        let phi = morphism(&x, &["1", "x1", "x2"]);
        let fp = fiber_profile(&x, &phi, 1, &CountOptions::default()).unwrap();
        assert_eq!((fp.domain_size, fp.image_size, fp.max_fiber, fp.collision_sum), (25, 15, 2, 45));
        let quadric = set(3, AmbientKind::Projective, &["x0", "x1", "x2", "x3"], &["x0*x3 - x1*x2"], &[]);
        let inc = MorphismToPn::inclusion(&quadric).unwrap();
        let fp = fiber_profile(&quadric, &inc, 1, &CountOptions::default()).unwrap();
        assert_eq!((fp.domain_size, fp.image_size, fp.max_fiber, fp.collision_sum), (16, 16, 1, 16));
        let empty = set(5, AmbientKind::Affine, &["x1", "x2", "y"], &["1"], &[]);
        let fp = fiber_profile(&empty, &morphism(&empty, &["1", "x1", "x2"]), 1, &CountOptions::default()).unwrap();
        assert_eq!((fp.image_size, fp.max_fiber, fp.collision_sum), (0, 0, 0));
    }

    #[test]
    fn base_points() {
        let a2 = set(3, AmbientKind::Affine, &["x1", "x2"], &[], &[]);
        let opts = CountOptions::default();
        let r = check_base_point_free(&a2, &morphism(&a2, &["1", "x1", "x2"]), 1, &opts).unwrap();
        assert!(r.free);
        let r = check_base_point_free(&a2, &morphism(&a2, &["x1", "x2"]), 1, &opts).unwrap();
        assert_eq!(r, BasePointReport { free: false, witness: Some(vec![0, 0]) });
        assert!(matches!(fiber_profile(&a2, &morphism(&a2, &["x1", "x2"]), 1, &opts), Err(Error::BasePointHit { .. })));
        let quadric = set(3, AmbientKind::Projective, &["x0", "x1", "x2", "x3"], &["x0*x3 - x1*x2"], &[]);
        let inc = MorphismToPn::inclusion(&quadric).unwrap();
        assert!(check_base_point_free(&quadric, &inc, 2, &opts).unwrap().free);
    }

    #[test]
    fn double_counting_and_profile_slices() {
        let cases: Vec<(ConstructibleSet, Vec<&str>)> = vec![
            (set(5, AmbientKind::Affine, &["x1", "x2", "y"], &["y^2 - x1"], &[]), vec!["1", "x1", "x2"]),
            (set(3, AmbientKind::Affine, &["x", "t", "s"], &[], &[]), vec!["1", "x", "x*t", "x*s"]),
            (
                set(3, AmbientKind::Projective, &["x0", "x1", "x2", "x3"], &["x0*x3 - x1*x2"], &[]),
                vec!["x0", "x1", "x2", "x3"],
            ),
        ];
        for (x, comps) in &cases {
            let phi = morphism(x, comps);
            let q = x.field().size();
            let n = phi.target_dim() as u32;
            let fp1 = fiber_profile(x, &phi, 1, &CountOptions::default()).unwrap();
            let fp2 = fiber_profile(x, &phi, 2, &CountOptions::default()).unwrap();
            let mut total = 0;
            for h in enum_hyperplanes(x.field(), n as usize) {
                let s = slice(x, &phi, &h).unwrap();
                let c = count(&s, 1);
                assert!(c <= fp1.domain_size);
                assert_eq!(c, fp1.slice_count(&h));
                assert_eq!(count(&s, 2), fp2.slice_count(&h));
                total += c;
            }
            assert_eq!(total, count(x, 1) * (q.pow(n) - 1) / (q - 1));
        }
    }
}

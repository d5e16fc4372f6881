//! Mean and variance of `Z = #(phi^{-1} H)` for a uniformly random hyperplane
//! `H`: exhaustively over the dual space, from closed forms in the fiber
//! data, and by seeded sampling.
//!
//! Sample variance uses the unbiased `K - 1` denominator.

use num::{BigInt, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Field;
use crate::projgeom::{
    incident, p1, p2, rational_from_int, sample_hyperplane, stream_rng, Hyperplane, ProjPoint, ProjectiveSpace,
    Rational,
};
use crate::variety::{count_points, fiber_profile, slice, ConstructibleSet, CountOptions, MorphismToPn};

/// A map of sets `X -> P^n(F_q)`: domain element `i` goes to `points[i]`.
#[derive(Debug, Clone)]
pub struct SetMap {
    field: Field,
    n: usize,
    points: Vec<ProjPoint>,
}

impl SetMap {
    pub fn new(field: &Field, n: usize, points: Vec<ProjPoint>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionTooSmall);
        }
        if let Some(p) = points.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n + 1, got: p.dim() + 1 });
        }
        let q = field.size();
        if let Some(p) = points.iter().find(|p| p.coords().iter().any(|c| u64::from(c.0) >= q)) {
            return Err(Error::FieldMismatch(format!("{p} has a coordinate outside {field}")));
        }
        Ok(SetMap { field: field.clone(), n, points })
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Fiber sizes of a map: `|X|`, `#phi(X)`, `s = max f_y` and `D = sum f_y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberSummary {
    pub domain_size: u64,
    pub image_size: u64,
    pub max_fiber: u64,
    pub collision_sum: u128,
}

/// Anything whose hyperplane pullbacks can be counted.
pub trait SliceSource: Sync {
    fn field(&self) -> &Field;
    fn target_dim(&self) -> usize;
    fn fibers(&self, opts: &CountOptions) -> Result<FiberSummary>;
    /// `#(phi^{-1} H)`, computed directly.
    fn slice_size(&self, h: &Hyperplane, opts: &CountOptions) -> Result<u64>;
    /// Upper bound on the work of one `slice_size` call.
    fn slice_cost(&self) -> u128;
}

impl SliceSource for SetMap {
    fn field(&self) -> &Field {
        &self.field
    }

    fn target_dim(&self) -> usize {
        self.n
    }

    fn fibers(&self, _: &CountOptions) -> Result<FiberSummary> {
        let mut sorted: Vec<&ProjPoint> = self.points.iter().collect();
        sorted.sort();
        let mut sizes = Vec::new();
        for (i, p) in sorted.iter().enumerate() {
            if i > 0 && sorted[i - 1] == *p {
                *sizes.last_mut().unwrap() += 1u64;
            } else {
                sizes.push(1);
            }
        }
        Ok(FiberSummary {
            domain_size: self.points.len() as u64,
            image_size: sizes.len() as u64,
            max_fiber: sizes.iter().copied().max().unwrap_or(0),
            collision_sum: sizes.iter().map(|&k| u128::from(k) * u128::from(k)).sum(),
        })
    }

    fn slice_size(&self, h: &Hyperplane, _: &CountOptions) -> Result<u64> {
        let f = &self.field;
        let mut n = 0;
        for y in &self.points {
            n += u64::from(incident(f, y, h)?);
        }
        Ok(n)
    }

    fn slice_cost(&self) -> u128 {
        self.points.len().max(1) as u128
    }
}

/// A constructible set with a morphism to `P^n`.
#[derive(Debug, Clone, Copy)]
pub struct Geometric<'a> {
    pub x: &'a ConstructibleSet,
    pub phi: &'a MorphismToPn,
}

impl SliceSource for Geometric<'_> {
    fn field(&self) -> &Field {
        self.x.field()
    }

    fn target_dim(&self) -> usize {
        self.phi.target_dim()
    }

    fn fibers(&self, opts: &CountOptions) -> Result<FiberSummary> {
        let fp = fiber_profile(self.x, self.phi, 1, opts)?;
        Ok(FiberSummary {
            domain_size: fp.domain_size,
            image_size: fp.image_size,
            max_fiber: fp.max_fiber,
            collision_sum: fp.collision_sum,
        })
    }

    fn slice_size(&self, h: &Hyperplane, opts: &CountOptions) -> Result<u64> {
        Ok(count_points(&slice(self.x, self.phi, h)?, 1, opts)?.count)
    }

    fn slice_cost(&self) -> u128 {
        let q = u128::from(self.x.field().size());
        q.checked_pow(self.x.ambient().nvars() as u32).unwrap_or(u128::MAX)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceStats {
    #[serde(with = "rational_string")]
    pub mean: Rational,
    #[serde(with = "rational_string")]
    pub variance: Rational,
    pub collision_sum: u128,
    pub max_fiber: u64,
    pub image_size: u64,
    pub domain_size: u64,
    pub hyperplanes: u64,
}

/// Mean and population variance of integer observations.
fn moments(n: u64, sum: u128, sum_sq: u128) -> (Rational, Rational) {
    if n == 0 {
        return (Rational::zero(), Rational::zero());
    }
    let nn = rational_from_int(u128::from(n));
    let mean = rational_from_int(sum) / &nn;
    let var = rational_from_int(sum_sq) / &nn - &mean * &mean;
    (mean, var)
}

fn slice_sizes<S: SliceSource>(src: &S, hs: &[Hyperplane], opts: &CountOptions) -> Result<Vec<u64>> {
    hs.par_iter().map(|h| src.slice_size(h, opts)).collect()
}

fn check_budget<S: SliceSource>(src: &S, hyperplanes: u64, opts: &CountOptions) -> Result<()> {
    let cost = src.slice_cost().saturating_mul(u128::from(hyperplanes));
    if cost > u128::from(opts.budget) {
        return Err(Error::BudgetExceeded { cost, budget: opts.budget });
    }
    Ok(())
}

/// `mu` and `sigma^2` over the uniform distribution on all hyperplanes,
/// by counting every pullback.
pub fn exact_stats<S: SliceSource>(src: &S, opts: &CountOptions) -> Result<SliceStats> {
    let dual = ProjectiveSpace::new(src.field(), src.target_dim());
    let total = dual.len();
    check_budget(src, total, opts)?;
    let fib = src.fibers(opts)?;
    let hs: Vec<Hyperplane> = dual.hyperplanes().collect();
    let zs = slice_sizes(src, &hs, opts)?;
    let sum: u128 = zs.iter().map(|&z| u128::from(z)).sum();
    let sum_sq: u128 = zs.iter().map(|&z| u128::from(z) * u128::from(z)).sum();
    let (mean, variance) = moments(total, sum, sum_sq);
    Ok(SliceStats {
        mean,
        variance,
        collision_sum: fib.collision_sum,
        max_fiber: fib.max_fiber,
        image_size: fib.image_size,
        domain_size: fib.domain_size,
        hyperplanes: total,
    })
}

/// Closed forms `mu = |X| p1` and
/// `sigma^2 = D (p1 - p1^2) + (|X|^2 - D)(p2 - p1^2)`.
pub fn predicted_stats(domain: u64, collision_sum: u128, q: u64, n: u32) -> Result<(Rational, Rational)> {
    let x = u128::from(domain);
    if collision_sum > x * x {
        return Err(Error::InconsistentCollisionSum { collision_sum, max: x * x });
    }
    let (a, b) = (p1(q, n), p2(q, n));
    let a2 = &a * &a;
    let d = rational_from_int(collision_sum);
    let mean = rational_from_int(x) * &a;
    let var = &d * (&a - &a2) + rational_from_int(x * x - collision_sum) * (&b - &a2);
    Ok((mean, var))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarianceBound {
    /// `D p1`.
    #[serde(with = "rational_string")]
    pub sharp: Rational,
    /// `#phi(X) s^2 p1`.
    #[serde(with = "rational_string")]
    pub coarse: Rational,
}

pub fn variance_bound(fib: &FiberSummary, q: u64, n: u32) -> VarianceBound {
    let a = p1(q, n);
    let s = u128::from(fib.max_fiber);
    VarianceBound {
        sharp: rational_from_int(fib.collision_sum) * &a,
        coarse: rational_from_int(u128::from(fib.image_size) * s * s) * a,
    }
}

/// How hyperplanes are drawn for [`mc_stats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Every hyperplane once; reproduces [`exact_stats`].
    Exhaustive,
    /// `samples` uniform draws; draw `i` uses stream `i` of `seed`.
    Random { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalStats {
    pub samples: u64,
    #[serde(with = "rational_string")]
    pub mean: Rational,
    /// Unbiased (`K - 1`) for random sampling, population variance when exhaustive.
    #[serde(with = "rational_string")]
    pub variance: Rational,
    pub mean_f64: f64,
    pub variance_f64: f64,
    /// `sqrt(variance / K)`.
    pub mean_std_error: f64,
    /// `variance * sqrt(2 / (K - 1))`, the normal-theory approximation.
    pub variance_std_error: f64,
}

pub fn mc_stats<S: SliceSource>(src: &S, sampling: Sampling, opts: &CountOptions) -> Result<EmpiricalStats> {
    let (k, mean, variance) = match sampling {
        Sampling::Exhaustive => {
            let dual = ProjectiveSpace::new(src.field(), src.target_dim());
            check_budget(src, dual.len(), opts)?;
            let hs: Vec<Hyperplane> = dual.hyperplanes().collect();
            let zs = slice_sizes(src, &hs, opts)?;
            let sum: u128 = zs.iter().map(|&z| u128::from(z)).sum();
            let sum_sq: u128 = zs.iter().map(|&z| u128::from(z) * u128::from(z)).sum();
            let (mean, var) = moments(dual.len(), sum, sum_sq);
            (dual.len(), mean, var)
        }
        Sampling::Random { samples, seed } => {
            if samples < 2 {
                return Err(Error::TooFewSamples);
            }
            check_budget(src, samples, opts)?;
            let (field, n) = (src.field(), src.target_dim());
            let zs: Vec<u64> = (0..samples)
                .into_par_iter()
                .map(|i| src.slice_size(&sample_hyperplane(field, n, &mut stream_rng(seed, i)), opts))
                .collect::<Result<_>>()?;
            let sum: u128 = zs.iter().map(|&z| u128::from(z)).sum();
            let sum_sq: u128 = zs.iter().map(|&z| u128::from(z) * u128::from(z)).sum();
            let (mean, pop) = moments(samples, sum, sum_sq);
            let k = rational_from_int(u128::from(samples));
            let var = pop * &k / (k - Rational::from_integer(BigInt::from(1)));
            (samples, mean, var)
        }
    };
    let mean_f64 = to_f64(&mean);
    let variance_f64 = to_f64(&variance);
    Ok(EmpiricalStats {
        samples: k,
        mean_f64,
        variance_f64,
        mean_std_error: (variance_f64 / k as f64).sqrt(),
        variance_std_error: variance_f64 * (2.0 / (k as f64 - 1.0).max(1.0)).sqrt(),
        mean,
        variance,
    })
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Chebyshev: `Prob(|Z - mu| >= t sigma) <= 1 / t^2`.
pub fn chebyshev_tail(t: &Rational) -> Result<Rational> {
    if !t.is_positive() {
        return Err(Error::NonpositiveT);
    }
    Ok((t * t).recip())
}

/// The tail bound at `t sigma = q^(r-1) / 2`: `4 sigma^2 / q^(2r - 2)`.
pub fn chebyshev_bad_bound(variance: &Rational, q: u64, r: u32) -> Result<Rational> {
    if r == 0 {
        return Err(Error::DimensionTooSmall);
    }
    let den = num::pow(BigInt::from(q), 2 * (r as usize - 1));
    Ok(variance * Rational::from_integer(BigInt::from(4)) / Rational::from_integer(den))
}

/// Serializes rationals as `"num/den"` (or `"num"` for integers).
pub mod rational_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::projgeom::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{field_of_order, Elem};
    use crate::polyexpr::{make_vars, parse_poly};
    use crate::projgeom::{enum_points, rational};
    use crate::variety::{Ambient, AmbientKind};
    use proptest::prelude::*;

    fn opts() -> CountOptions {
        CountOptions::default()
    }

    fn pt(f: &Field, v: &[u32]) -> ProjPoint {
        ProjPoint::new(f, &v.iter().map(|&x| Elem(x)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn four_points_on_one() {
        let f = field_of_order(2).unwrap();
        let m = SetMap::new(&f, 2, vec![pt(&f, &[1, 0, 0]); 4]).unwrap();
        let s = exact_stats(&m, &opts()).unwrap();
        assert_eq!(s.mean, rational(12, 7));
        assert_eq!(s.variance, rational(192, 49));
        assert_eq!((s.collision_sum, s.max_fiber, s.image_size), (16, 4, 1));
        assert_eq!(predicted_stats(4, 16, 2, 2).unwrap(), (rational(12, 7), rational(192, 49)));
        let b = variance_bound(&m.fibers(&opts()).unwrap(), 2, 2);
        assert_eq!(b.coarse, rational(48, 7));
        assert!(s.variance <= b.sharp && b.sharp <= b.coarse);
    }

    #[test]
    fn empty_domain() {
        let f = field_of_order(3).unwrap();
        let m = SetMap::new(&f, 2, vec![]).unwrap();
        let s = exact_stats(&m, &opts()).unwrap();
        assert!(s.mean.is_zero() && s.variance.is_zero());
        assert_eq!(predicted_stats(0, 0, 3, 2).unwrap(), (Rational::zero(), Rational::zero()));
    }

    #[test]
    fn line_in_plane() {
        let f = field_of_order(2).unwrap();
        let v = make_vars(&["x0", "x1", "x2"]).unwrap();
        let x = ConstructibleSet::new(
            &f,
            Ambient::new(AmbientKind::Projective, v.clone()).unwrap(),
            vec![parse_poly("x2", &v, &f).unwrap()],
            vec![],
        )
        .unwrap();
        let phi = MorphismToPn::inclusion(&x).unwrap();
        let g = Geometric { x: &x, phi: &phi };
        let s = exact_stats(&g, &opts()).unwrap();
        assert_eq!(s.mean, rational(9, 7));
        let (mu, var) = predicted_stats(s.domain_size, s.collision_sum, 2, 2).unwrap();
        assert_eq!((mu, var), (s.mean.clone(), s.variance.clone()));
        // the same three points as a set map
        let m = SetMap::new(&f, 2, vec![pt(&f, &[1, 0, 0]), pt(&f, &[0, 1, 0]), pt(&f, &[1, 1, 0])]).unwrap();
        assert_eq!(exact_stats(&m, &opts()).unwrap().variance, s.variance);
    }

    #[test]
    fn three_general_points() {
        assert_eq!(predicted_stats(3, 3, 2, 2).unwrap(), (rational(9, 7), rational(24, 49)));
        let f = field_of_order(2).unwrap();
        let m = SetMap::new(&f, 2, vec![pt(&f, &[1, 0, 0]), pt(&f, &[0, 1, 0]), pt(&f, &[0, 0, 1])]).unwrap();
        let s = exact_stats(&m, &opts()).unwrap();
        assert_eq!((s.mean, s.variance), (rational(9, 7), rational(24, 49)));
        assert!(matches!(predicted_stats(2, 5, 2, 2), Err(Error::InconsistentCollisionSum { .. })));
    }

    #[test]
    fn chebyshev() {
        assert_eq!(chebyshev_tail(&rational(2, 1)).unwrap(), rational(1, 4));
        assert_eq!(chebyshev_tail(&rational(0, 1)), Err(Error::NonpositiveT));
        assert_eq!(chebyshev_tail(&rational(-1, 2)), Err(Error::NonpositiveT));
        assert_eq!(chebyshev_bad_bound(&rational(192, 49), 2, 1).unwrap(), rational(768, 49));
        let mut prev = chebyshev_tail(&rational(1, 10)).unwrap();
        for k in 2..200 {
            let cur = chebyshev_tail(&rational(k, 10)).unwrap();
            assert!(cur < prev);
            prev = cur;
        }
    }

    #[test]
    fn mean_asymptotics() {
        for q in 2..=64u64 {
            if crate::fields::prime_power(q).is_err() {
                continue;
            }
            for n in 1..=4 {
                let dev = p1(q, n) - rational(1, q as i64);
                assert!(dev.abs() <= rational(2, (q * q) as i64));
            }
        }
    }

    #[test]
    fn monte_carlo() {
        let f = field_of_order(2).unwrap();
        let m = SetMap::new(&f, 2, vec![pt(&f, &[1, 0, 0]), pt(&f, &[0, 1, 0]), pt(&f, &[1, 1, 0])]).unwrap();
        let exact = exact_stats(&m, &opts()).unwrap();
        let k = 10_000;
        let mc = mc_stats(&m, Sampling::Random { samples: k, seed: 3 }, &opts()).unwrap();
        let sigma = to_f64(&exact.variance).sqrt();
        assert!((mc.mean_f64 - 9.0 / 7.0).abs() <= 5.0 * sigma / (k as f64).sqrt());
        let again = mc_stats(&m, Sampling::Random { samples: k, seed: 3 }, &opts()).unwrap();
        assert_eq!(mc, again);
        let ex = mc_stats(&m, Sampling::Exhaustive, &opts()).unwrap();
        assert_eq!((ex.mean, ex.variance), (exact.mean, exact.variance));
        assert_eq!(mc_stats(&m, Sampling::Random { samples: 1, seed: 0 }, &opts()), Err(Error::TooFewSamples));
    }

    #[test]
    fn unbiased_variance_oracle() {
        let f = field_of_order(3).unwrap();
        let m = SetMap::new(&f, 2, enum_points(&f, 2)[..5].to_vec()).unwrap();
        let k = 40;
        let mc = mc_stats(&m, Sampling::Random { samples: k, seed: 9 }, &opts()).unwrap();
        let zs: Vec<f64> = (0..k)
            .map(|i| m.slice_size(&sample_hyperplane(&f, 2, &mut stream_rng(9, i)), &opts()).unwrap() as f64)
            .collect();
        let mean = zs.iter().sum::<f64>() / k as f64;
        let var = zs.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (k as f64 - 1.0);
        assert!((mc.mean_f64 - mean).abs() < 1e-12);
        assert!((mc.variance_f64 - var).abs() < 1e-12);
    }

    #[test]
    fn budget_for_exact_stats() {
        let f = field_of_order(2).unwrap();
        let m = SetMap::new(&f, 2, vec![pt(&f, &[1, 0, 0]); 4]).unwrap();
        assert!(matches!(exact_stats(&m, &CountOptions::with_budget(10)), Err(Error::BudgetExceeded { .. })));
    }

    fn setmap_strategy() -> impl Strategy<Value = (u64, usize, Vec<u64>)> {
        (prop::sample::select(vec![2u64, 3, 4, 5]), 1usize..=3).prop_flat_map(|(q, n)| {
            let total = (q.pow(n as u32 + 1) - 1) / (q - 1);
            (Just(q), Just(n), prop::collection::vec(0..total, 0..=30))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(120))]
        #[test]
        fn exhaustive_matches_closed_form((q, n, ranks) in setmap_strategy()) {
            let f = field_of_order(q).unwrap();
            let space = ProjectiveSpace::new(&f, n);
            let m = SetMap::new(&f, n, ranks.iter().map(|&r| space.point(r)).collect()).unwrap();
            let s = exact_stats(&m, &opts()).unwrap();
            let (mu, var) = predicted_stats(s.domain_size, s.collision_sum, q, n as u32).unwrap();
            prop_assert_eq!(&s.mean, &mu);
            prop_assert_eq!(&s.variance, &var);
            prop_assert!(s.variance >= Rational::zero());
            let b = variance_bound(&m.fibers(&opts()).unwrap(), q, n as u32);
            prop_assert!(s.variance <= b.sharp && b.sharp <= b.coarse);
            if !m.is_empty() {
                prop_assert!(s.collision_sum >= u128::from(s.image_size));
            }
        }
    }
}

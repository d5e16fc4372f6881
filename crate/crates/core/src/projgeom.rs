//! Projective space `P^n(F_q)`, its dual, incidence probabilities and the
//! linear algebra behind spans of point sets.
//!
//! Canonical form: a coordinate vector is scaled so that its first nonzero
//! coordinate is 1. Points and hyperplanes share one enumeration order: first
//! the vectors whose leading 1 sits at position 0, then position 1, and so on;
//! within a block the free coordinates count up in base `q` with the last
//! coordinate least significant.

use std::fmt;

use num::{BigInt, BigRational, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::fields::{Elem, Field};

/// Exact rational number (arbitrary precision, always reduced).
pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_from_int(n: u128) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

type Coords = SmallVec<[Elem; 8]>;

/// A point of `P^n` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<u32>", try_from = "Vec<u32>")]
pub struct ProjPoint(Coords);

/// A hyperplane `c_0 x_0 + ... + c_n x_n = 0`, i.e. a point of the dual space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<u32>", try_from = "Vec<u32>")]
pub struct Hyperplane(ProjPoint);

fn normalize(field: &Field, mut v: Coords) -> Result<Coords> {
    let lead = v.iter().copied().find(|c| !c.is_zero()).ok_or(Error::ZeroVector)?;
    if lead != Elem::ONE {
        let inv = field.inv(lead)?;
        for c in v.iter_mut() {
            *c = field.mul(*c, inv);
        }
    }
    Ok(v)
}

impl ProjPoint {
    /// Normalizes a nonzero coordinate vector.
    pub fn new(field: &Field, coords: &[Elem]) -> Result<Self> {
        Ok(ProjPoint(normalize(field, coords.iter().copied().collect())?))
    }

    pub fn coords(&self) -> &[Elem] {
        &self.0
    }

    /// Ambient dimension `n` (the vector has `n + 1` entries).
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }
}

impl From<ProjPoint> for Vec<u32> {
    fn from(p: ProjPoint) -> Self {
        p.0.iter().map(|c| c.0).collect()
    }
}

impl TryFrom<Vec<u32>> for ProjPoint {
    type Error = String;
    fn try_from(v: Vec<u32>) -> std::result::Result<Self, String> {
        let lead = v.iter().find(|&&c| c != 0).ok_or("zero coordinate vector")?;
        if *lead != 1 {
            return Err("coordinates are not normalized".into());
        }
        Ok(ProjPoint(v.into_iter().map(Elem).collect()))
    }
}

impl Hyperplane {
    pub fn new(field: &Field, coeffs: &[Elem]) -> Result<Self> {
        Ok(Hyperplane(ProjPoint::new(field, coeffs)?))
    }

    pub fn coeffs(&self) -> &[Elem] {
        self.0.coords()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// The hyperplane with the same coordinates, viewed as a point.
    pub fn as_point(&self) -> &ProjPoint {
        &self.0
    }
}

impl From<Hyperplane> for Vec<u32> {
    fn from(h: Hyperplane) -> Self {
        h.0.into()
    }
}

impl TryFrom<Vec<u32>> for Hyperplane {
    type Error = String;
    fn try_from(v: Vec<u32>) -> std::result::Result<Self, String> {
        ProjPoint::try_from(v).map(Hyperplane)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.0.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `P^n` over a field, with a fixed enumeration order.
#[derive(Debug, Clone)]
pub struct ProjectiveSpace {
    field: Field,
    n: usize,
}

impl ProjectiveSpace {
    pub fn new(field: &Field, n: usize) -> Self {
        ProjectiveSpace { field: field.clone(), n }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `(q^(n+1) - 1) / (q - 1)`.
    pub fn len(&self) -> u64 {
        let q = self.field.size();
        (0..=self.n as u32).map(|i| q.pow(i)).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Writes the point of the given rank into `out` (length `n + 1`).
    pub fn write_point(&self, mut rank: u64, out: &mut [Elem]) {
        let q = self.field.size();
        let mut lead = 0;
        loop {
            let block = q.pow((self.n - lead) as u32);
            if rank < block {
                break;
            }
            rank -= block;
            lead += 1;
        }
        out[..lead].fill(Elem::ZERO);
        out[lead] = Elem::ONE;
        for slot in out[lead + 1..].iter_mut().rev() {
            *slot = Elem((rank % q) as u32);
            rank /= q;
        }
    }

    pub fn point(&self, rank: u64) -> ProjPoint {
        let mut v: Coords = SmallVec::from_elem(Elem::ZERO, self.n + 1);
        self.write_point(rank, &mut v);
        ProjPoint(v)
    }

    pub fn hyperplane(&self, rank: u64) -> Hyperplane {
        Hyperplane(self.point(rank))
    }

    /// Position of a canonical vector in the enumeration order.
    pub fn rank_of(&self, coords: &[Elem]) -> u64 {
        let q = self.field.size();
        let lead = coords.iter().position(|c| !c.is_zero()).expect("nonzero vector");
        let before: u64 = (0..lead).map(|i| q.pow((self.n - i) as u32)).sum();
        let within = coords[lead + 1..].iter().fold(0u64, |acc, c| acc * q + u64::from(c.0));
        before + within
    }

    pub fn points(&self) -> impl Iterator<Item = ProjPoint> + '_ {
        (0..self.len()).map(|r| self.point(r))
    }

    pub fn hyperplanes(&self) -> impl Iterator<Item = Hyperplane> + '_ {
        (0..self.len()).map(|r| self.hyperplane(r))
    }
}

pub fn enum_points(field: &Field, n: usize) -> Vec<ProjPoint> {
    ProjectiveSpace::new(field, n).points().collect()
}

pub fn enum_hyperplanes(field: &Field, n: usize) -> Vec<Hyperplane> {
    ProjectiveSpace::new(field, n).hyperplanes().collect()
}

/// Whether `y` lies on `h`.
pub fn incident(field: &Field, y: &ProjPoint, h: &Hyperplane) -> Result<bool> {
    if y.0.len() != h.coeffs().len() {
        return Err(Error::DimensionMismatch { expected: h.coeffs().len(), got: y.0.len() });
    }
    let dot = y.0.iter().zip(h.coeffs()).fold(Elem::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b)));
    Ok(dot.is_zero())
}

fn big_pow(q: u64, k: u32) -> BigInt {
    num::pow(BigInt::from(q), k as usize)
}

/// Probability that a uniformly random hyperplane contains a fixed point:
/// `(q^n - 1) / (q^(n+1) - 1)`.
pub fn p1(q: u64, n: u32) -> Rational {
    Rational::new(big_pow(q, n) - 1, big_pow(q, n + 1) - 1)
}

/// Probability that a uniformly random hyperplane contains two fixed
/// distinct points: `(q^(n-1) - 1) / (q^(n+1) - 1)`.
pub fn p2(q: u64, n: u32) -> Rational {
    if n == 0 {
        return Rational::zero();
    }
    Rational::new(big_pow(q, n - 1) - 1, big_pow(q, n + 1) - 1)
}

/// Independent random stream `index` under a master seed (ChaCha8, stream id
/// = index). Results never depend on which worker draws which stream.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform hyperplane: a uniform nonzero coefficient vector, normalized.
/// Each hyperplane has exactly `q - 1` representatives.
pub fn sample_hyperplane<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Hyperplane {
    let q = field.size();
    let total = q.pow(n as u32 + 1);
    let mut k = rng.random_range(1..total);
    let mut v: Coords = SmallVec::from_elem(Elem::ZERO, n + 1);
    for slot in v.iter_mut().rev() {
        *slot = Elem((k % q) as u32);
        k /= q;
    }
    Hyperplane(ProjPoint(normalize(field, v).expect("nonzero by construction")))
}

/// Rank of a matrix over `field` (rows are consumed by elimination).
pub fn rank(field: &Field, mut rows: Vec<Vec<Elem>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..ncols {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let inv = field.inv(rows[r][col]).expect("pivot is nonzero");
        for c in rows[r].iter_mut() {
            *c = field.mul(*c, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col];
            for (x, &p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = field.sub(*x, field.mul(factor, p));
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

fn point_matrix_rank(field: &Field, points: &[ProjPoint]) -> Result<(usize, usize)> {
    let first = points.first().ok_or(Error::EmptyInput)?;
    let n = first.dim();
    if let Some(bad) = points.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n + 1, got: bad.0.len() });
    }
    let rows = points.iter().map(|p| p.0.to_vec()).collect();
    Ok((rank(field, rows), n))
}

/// Dimension of the linear span of `points` (`rank - 1`).
pub fn span_dim(field: &Field, points: &[ProjPoint]) -> Result<i64> {
    let (r, _) = point_matrix_rank(field, points)?;
    Ok(r as i64 - 1)
}

/// Dimension of the linear system of hyperplanes containing every point
/// (`n - rank`); `-1` when no hyperplane contains them all.
pub fn span_locus_dim(field: &Field, points: &[ProjPoint]) -> Result<i64> {
    let (r, n) = point_matrix_rank(field, points)?;
    Ok(n as i64 - r as i64)
}

/// Number of `F_q`-points of a projective space of dimension `d` (0 for `d < 0`).
pub fn projective_count(q: u64, d: i64) -> u64 {
    if d < 0 {
        0
    } else {
        (0..=d as u32).map(|i| q.pow(i)).sum()
    }
}

/// `(q^(n+1) - 1)^2 (p1^2 - p2)`; equals `q^(n-1) (q - 1)^2`.
pub fn collision_gap_scaled(q: u64, n: u32) -> Rational {
    let d = Rational::from_integer(big_pow(q, n + 1) - 1);
    let a = p1(q, n);
    &d * &d * (&a * &a - p2(q, n))
}

pub fn is_one(r: &Rational) -> bool {
    r.is_one()
}

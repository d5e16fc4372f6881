//! Finite fields `GF(p^e)` and their extensions `GF(q^m)`.
//!
//! A [`Field`] is a cheap, shareable handle to an immutable field description.
//! Elements are [`Elem`] indices: the canonical coefficient vector over the
//! immediate subfield, packed in base `#subfield` with the constant
//! coefficient least significant. Packing is recursive, so an index is also
//! the base-`p` digit string of the element over the prime field, and an
//! element of a subfield keeps the same index in every extension built on top
//! of it. The embedding `GF(q) -> GF(q^m)` is therefore the identity on
//! indices.
//!
//! Moduli are found by a seeded search: candidate `k = (seed + j) mod q^m` for
//! `j = 0, 1, 2, ...` is the monic polynomial `T^m + c_{m-1} T^{m-1} + ... + c_0`
//! whose lower coefficients are the base-`q` digits of `k` (`c_0` least
//! significant, each digit an element index). The first irreducible
//! candidate is taken.

mod upoly;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

/// Largest accepted characteristic (exclusive).
pub const MAX_CHARACTERISTIC: u64 = 1 << 20;

/// Fields up to this size get log/exp tables; larger ones use schoolbook
/// arithmetic on coefficient vectors.
const TABLE_LIMIT: u64 = 1 << 20;

/// Element indices are `u32`.
const MAX_FIELD_SIZE: u64 = 1 << 31;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} is not below 2^20")]
    CharacteristicTooLarge(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus must be monic of degree at least 1")]
    BadModulus,
    #[error("modulus is reducible over the subfield")]
    ReducibleModulus,
    #[error("field of order {base}^{degree} is too large")]
    TooLarge { base: u64, degree: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
}

/// A field element, identified by its canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }
}

/// Handle to a finite field description.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

struct Inner {
    p: u32,
    degree: u32,
    size: u32,
    /// `[p, m_1, modulus_1..., m_2, modulus_2..., ...]`; equal keys mean equal fields.
    key: Vec<u32>,
    level: Level,
    arith: Arith,
}

enum Level {
    Prime,
    Extension { sub: Field, modulus: Vec<Elem> },
}

enum Arith {
    Prime,
    Tables(Tables),
    Reference,
}

struct Tables {
    order: u32,
    log: Vec<u32>,
    /// `exp[i] = g^i` for `i < 2 * order`.
    exp: Vec<u32>,
    /// `zech[d] = log(1 + g^d)`, or `NO_LOG` when `1 + g^d = 0`.
    zech: Vec<u32>,
    neg: Vec<u32>,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^e`.
pub fn prime_power(q: u64) -> Result<(u64, u32), FieldError> {
    if q < 2 {
        return Err(FieldError::NotPrimePower(q));
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).expect("q >= 2 has a divisor");
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    if rest != 1 {
        return Err(FieldError::NotPrimePower(q));
    }
    Ok((p, e))
}

/// Builds `GF(p^e)`. For `e > 1` the modulus over `GF(p)` comes from the
/// seeded search described in the module docs.
pub fn make_field(p: u64, e: u32, seed: u64) -> Result<Field, FieldError> {
    if e == 0 {
        return Err(FieldError::DegreeZero);
    }
    let prime = Field::prime(p)?;
    if e == 1 {
        return Ok(prime);
    }
    Ok(extend(&prime, e, seed)?.field)
}

/// Builds the field of order `q` with the seed-0 modulus.
pub fn field_of_order(q: u64) -> Result<Field, FieldError> {
    let (p, e) = prime_power(q)?;
    make_field(p, e, 0)
}

/// A degree-`m` extension together with the base it extends.
#[derive(Clone)]
pub struct ExtField {
    pub base: Field,
    pub field: Field,
    pub m: u32,
    /// Monic modulus over `base`, low degree first.
    pub modulus: Vec<Elem>,
}

impl ExtField {
    /// Constant inclusion of a base element.
    #[inline]
    pub fn embed(&self, a: Elem) -> Elem {
        debug_assert!(u64::from(a.0) < self.base.size());
        a
    }

    pub fn size(&self) -> u64 {
        self.field.size()
    }
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {} (m = {})", self.field, self.base, self.m)
    }
}

/// Finds a degree-`m` irreducible modulus over `base` and builds the extension.
pub fn extend(base: &Field, m: u32, seed: u64) -> Result<ExtField, FieldError> {
    if m == 0 {
        return Err(FieldError::DegreeZero);
    }
    let q = base.size();
    let total = q.checked_pow(m).filter(|&t| t < MAX_FIELD_SIZE).ok_or(FieldError::TooLarge { base: q, degree: m })?;
    for j in 0..total {
        let mut k = (seed % total + j) % total;
        let mut modulus = Vec::with_capacity(m as usize + 1);
        for _ in 0..m {
            modulus.push(Elem((k % q) as u32));
            k /= q;
        }
        modulus.push(Elem::ONE);
        if upoly::is_irreducible(base, &modulus) {
            let field = if m == 1 { base.clone() } else { Field::build_extension(base, modulus.clone()) };
            return Ok(ExtField { base: base.clone(), field, m, modulus });
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

type ExtensionCache = Mutex<HashMap<(Vec<u32>, u32), ExtField>>;

fn extension_cache() -> &'static ExtensionCache {
    static CACHE: OnceLock<ExtensionCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

impl Field {
    /// The prime field `GF(p)`.
    pub fn prime(p: u64) -> Result<Field, FieldError> {
        if p >= MAX_CHARACTERISTIC {
            return Err(FieldError::CharacteristicTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Field(Arc::new(Inner {
            p: p as u32,
            degree: 1,
            size: p as u32,
            key: vec![p as u32],
            level: Level::Prime,
            arith: Arith::Prime,
        })))
    }

    /// Extension of `sub` by an explicit monic modulus (low degree first).
    pub fn with_modulus(sub: &Field, modulus: Vec<Elem>) -> Result<Field, FieldError> {
        let modulus = upoly::trim(modulus);
        if modulus.len() < 2 || modulus.last() != Some(&Elem::ONE) {
            return Err(FieldError::BadModulus);
        }
        if modulus.iter().any(|c| u64::from(c.0) >= sub.size()) {
            return Err(FieldError::BadModulus);
        }
        let m = (modulus.len() - 1) as u32;
        sub.size()
            .checked_pow(m)
            .filter(|&t| t < MAX_FIELD_SIZE)
            .ok_or(FieldError::TooLarge { base: sub.size(), degree: m })?;
        if !upoly::is_irreducible(sub, &modulus) {
            return Err(FieldError::ReducibleModulus);
        }
        if m == 1 {
            return Ok(sub.clone());
        }
        Ok(Field::build_extension(sub, modulus))
    }

    fn build_extension(sub: &Field, modulus: Vec<Elem>) -> Field {
        let m = (modulus.len() - 1) as u32;
        let size = sub.size().pow(m);
        let mut key = sub.0.key.clone();
        key.push(m);
        key.extend(modulus.iter().map(|c| c.0));
        let mut inner = Inner {
            p: sub.0.p,
            degree: sub.0.degree * m,
            size: size as u32,
            key,
            level: Level::Extension { sub: sub.clone(), modulus },
            arith: Arith::Reference,
        };
        if size <= TABLE_LIMIT {
            inner.arith = Arith::Tables(build_tables(&inner));
        }
        Field(Arc::new(inner))
    }

    /// The canonical degree-`m` extension (seed 0), cached per process.
    pub fn extension(&self, m: u32) -> Result<ExtField, FieldError> {
        let key = (self.0.key.clone(), m);
        if let Some(ext) = extension_cache().lock().unwrap().get(&key) {
            return Ok(ext.clone());
        }
        let ext = extend(self, m, 0)?;
        extension_cache().lock().unwrap().insert(key, ext.clone());
        Ok(ext)
    }

    #[inline]
    pub fn characteristic(&self) -> u64 {
        u64::from(self.0.p)
    }

    /// Number of elements.
    #[inline]
    pub fn size(&self) -> u64 {
        u64::from(self.0.size)
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    /// Immediate subfield, `None` for a prime field.
    pub fn subfield(&self) -> Option<&Field> {
        match &self.0.level {
            Level::Prime => None,
            Level::Extension { sub, .. } => Some(sub),
        }
    }

    /// Modulus over the immediate subfield, `None` for a prime field.
    pub fn modulus(&self) -> Option<&[Elem]> {
        match &self.0.level {
            Level::Prime => None,
            Level::Extension { modulus, .. } => Some(modulus),
        }
    }

    /// Degree over the immediate subfield.
    pub fn relative_degree(&self) -> u32 {
        self.modulus().map_or(1, |m| (m.len() - 1) as u32)
    }

    /// True if `self` is `other` or lies in the subfield chain of `self`.
    pub fn contains(&self, other: &Field) -> bool {
        let mut cur = Some(self);
        while let Some(f) = cur {
            if f == other {
                return true;
            }
            cur = f.subfield();
        }
        false
    }

    /// Residue class of the modulus variable; `None` for prime fields.
    pub fn generator(&self) -> Option<Elem> {
        self.subfield().map(|sub| Elem(sub.0.size))
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    #[inline]
    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// Image of an integer under `Z -> GF(p) -> self`.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(i64::from(self.0.p)) as u32)
    }

    /// All elements, zero first, in increasing index order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + use<> {
        (0..self.0.size).map(Elem)
    }

    /// Coefficient vector over the immediate subfield (length `relative_degree`).
    pub fn coefficients(&self, a: Elem) -> Vec<Elem> {
        match &self.0.level {
            Level::Prime => vec![a],
            Level::Extension { sub, modulus } => {
                let s = sub.0.size;
                let mut x = a.0;
                (0..modulus.len() - 1)
                    .map(|_| {
                        let d = x % s;
                        x /= s;
                        Elem(d)
                    })
                    .collect()
            }
        }
    }

    /// Inverse of [`Field::coefficients`].
    pub fn from_coefficients(&self, coeffs: &[Elem]) -> Elem {
        match &self.0.level {
            Level::Prime => coeffs.first().copied().unwrap_or(Elem::ZERO),
            Level::Extension { sub, .. } => {
                let s = sub.0.size;
                Elem(coeffs.iter().rev().fold(0, |acc, c| acc * s + c.0))
            }
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.0.arith {
            Arith::Prime => {
                let s = a.0 + b.0;
                Elem(if s >= self.0.p { s - self.0.p } else { s })
            }
            Arith::Tables(t) => {
                if self.0.p == 2 {
                    return Elem(a.0 ^ b.0);
                }
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let la = t.log[a.0 as usize];
                let lb = t.log[b.0 as usize];
                let d = if lb >= la { lb - la } else { lb + t.order - la };
                let z = t.zech[d as usize];
                if z == NO_LOG {
                    Elem::ZERO
                } else {
                    Elem(t.exp[(la + z) as usize])
                }
            }
            Arith::Reference => self.ref_add(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        match &self.0.arith {
            Arith::Prime => Elem(if a.0 == 0 { 0 } else { self.0.p - a.0 }),
            Arith::Tables(t) => Elem(t.neg[a.0 as usize]),
            Arith::Reference => self.ref_neg(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.0.arith {
            Arith::Prime => Elem(((u64::from(a.0) * u64::from(b.0)) % u64::from(self.0.p)) as u32),
            Arith::Tables(t) => {
                if a.0 == 0 || b.0 == 0 {
                    Elem::ZERO
                } else {
                    Elem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
                }
            }
            Arith::Reference => self.ref_mul(a, b),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match &self.0.arith {
            Arith::Prime => {
                // extended Euclid on (a, p)
                let (mut r0, mut r1) = (i64::from(self.0.p), i64::from(a.0));
                let (mut t0, mut t1) = (0i64, 1i64);
                while r1 != 0 {
                    let quot = r0 / r1;
                    (r0, r1) = (r1, r0 - quot * r1);
                    (t0, t1) = (t1, t0 - quot * t1);
                }
                Elem(t0.rem_euclid(i64::from(self.0.p)) as u32)
            }
            Arith::Tables(t) => {
                let l = t.log[a.0 as usize];
                Elem(t.exp[((t.order - l) % t.order) as usize])
            }
            Arith::Reference => self.pow(a, self.size() - 2),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^k` by square-and-multiply; `0^0 = 1`.
    pub fn pow(&self, a: Elem, mut k: u64) -> Elem {
        let mut result = Elem::ONE;
        let mut base = a;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        result
    }

    /// Whether `a` has a square root in this field.
    pub fn is_square(&self, a: Elem) -> bool {
        if self.0.p == 2 || a.is_zero() {
            return true;
        }
        self.pow(a, (self.size() - 1) / 2) == Elem::ONE
    }

    // Schoolbook arithmetic on coefficient vectors. Used directly for large
    // fields, and to build (and test) the tables otherwise.

    pub fn ref_add(&self, a: Elem, b: Elem) -> Elem {
        match &self.0.level {
            Level::Prime => self.add(a, b),
            Level::Extension { sub, .. } => {
                let x = self.coefficients(a);
                let y = self.coefficients(b);
                let z: Vec<Elem> = x.iter().zip(&y).map(|(&u, &v)| sub.add(u, v)).collect();
                self.from_coefficients(&z)
            }
        }
    }

    pub fn ref_neg(&self, a: Elem) -> Elem {
        match &self.0.level {
            Level::Prime => self.neg(a),
            Level::Extension { sub, .. } => {
                let z: Vec<Elem> = self.coefficients(a).into_iter().map(|u| sub.neg(u)).collect();
                self.from_coefficients(&z)
            }
        }
    }

    pub fn ref_mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.0.level {
            Level::Prime => self.mul(a, b),
            Level::Extension { sub, modulus } => {
                let m = modulus.len() - 1;
                let x = self.coefficients(a);
                let y = self.coefficients(b);
                let mut prod = vec![Elem::ZERO; 2 * m - 1];
                for (i, &u) in x.iter().enumerate() {
                    if u.is_zero() {
                        continue;
                    }
                    for (j, &v) in y.iter().enumerate() {
                        prod[i + j] = sub.add(prod[i + j], sub.mul(u, v));
                    }
                }
                // modulus is monic: T^m = -(c_0 + ... + c_{m-1} T^{m-1})
                for i in (m..2 * m - 1).rev() {
                    let c = prod[i];
                    if c.is_zero() {
                        continue;
                    }
                    prod[i] = Elem::ZERO;
                    for (j, &mj) in modulus.iter().enumerate().take(m) {
                        prod[i - m + j] = sub.sub(prod[i - m + j], sub.mul(c, mj));
                    }
                }
                prod.truncate(m);
                self.from_coefficients(&prod)
            }
        }
    }
}

fn build_tables(inner: &Inner) -> Tables {
    // A temporary handle with reference arithmetic.
    let tmp = Field(Arc::new(Inner {
        p: inner.p,
        degree: inner.degree,
        size: inner.size,
        key: inner.key.clone(),
        level: match &inner.level {
            Level::Prime => Level::Prime,
            Level::Extension { sub, modulus } => Level::Extension { sub: sub.clone(), modulus: modulus.clone() },
        },
        arith: Arith::Reference,
    }));
    let size = u64::from(inner.size);
    let order = size - 1;
    let primes = upoly::factor_distinct_primes(order);
    let ref_pow = |a: Elem, mut k: u64| {
        let mut r = Elem::ONE;
        let mut b = a;
        while k > 0 {
            if k & 1 == 1 {
                r = tmp.ref_mul(r, b);
            }
            b = tmp.ref_mul(b, b);
            k >>= 1;
        }
        r
    };
    let g = (1..inner.size)
        .map(Elem)
        .find(|&c| primes.iter().all(|&l| ref_pow(c, order / l) != Elem::ONE))
        .expect("the multiplicative group is cyclic");
    let order = order as u32;
    let mut exp = vec![0u32; 2 * order as usize];
    let mut log = vec![NO_LOG; inner.size as usize];
    let mut x = Elem::ONE;
    for i in 0..order {
        exp[i as usize] = x.0;
        log[x.0 as usize] = i;
        x = tmp.ref_mul(x, g);
    }
    for i in order..2 * order {
        exp[i as usize] = exp[(i - order) as usize];
    }
    let zech = (0..order)
        .map(|d| {
            let s = tmp.ref_add(Elem::ONE, Elem(exp[d as usize]));
            if s.is_zero() {
                NO_LOG
            } else {
                log[s.0 as usize]
            }
        })
        .collect();
    let neg = (0..inner.size).map(|a| tmp.ref_neg(Elem(a)).0).collect();
    Tables { order, log, exp, zech, neg }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.key == other.0.key
    }
}

impl Eq for Field {}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.degree == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{})", self.0.p, self.0.degree)
        }
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")?;
        if let Some(m) = self.modulus() {
            let idx: Vec<u32> = m.iter().map(|c| c.0).collect();
            write!(f, " mod {idx:?}")?;
        }
        Ok(())
    }
}

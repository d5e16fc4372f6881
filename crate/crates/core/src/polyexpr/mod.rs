//! Sparse multivariate polynomials over a [`Field`] and the expression
//! language used to write them down.
//!
//! Grammar (whitespace between tokens is ignored):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' nonneg-int)?
//! atom   := int-literal | var-name | 'g' | '(' expr ')'
//! ```
//!
//! An `expr` may additionally start with a single `-`. Integer literals are
//! reduced mod `p`. `g` is the residue class of the modulus variable and is
//! only legal when the field is not prime.

mod compiled;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::fields::{Elem, ExtField, Field};

pub use compiled::{CompiledSystem, Scratch};
pub use parse::parse_poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable '{name}' at column {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("generator 'g' used at column {pos} but the field is prime")]
    GeneratorInPrimeField { pos: usize },
    #[error("negative exponent at column {pos}")]
    NegativeExponent { pos: usize },
    #[error("invalid variable name '{0}'")]
    InvalidVariable(String),
    #[error("expected {expected} coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("polynomial is defined over {poly} but {other} was supplied")]
    FieldMismatch { poly: String, other: String },
    #[error("the zero polynomial has no degree")]
    ZeroPolynomial,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
}

/// Exponent vector over a fixed variable list.
///
/// Ordered by total degree, then lexicographically by exponents, so the
/// largest monomial in graded-lex order sorts last.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u32; 6]>);

impl Monomial {
    pub fn new(exps: impl IntoIterator<Item = u32>) -> Self {
        Monomial(exps.into_iter().collect())
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree().cmp(&other.total_degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Validated, shareable variable list.
pub type Vars = Arc<[String]>;

pub fn make_vars<S: AsRef<str>>(names: &[S]) -> Result<Vars, PolyError> {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        let n = n.as_ref();
        let mut chars = n.chars();
        let ok_start = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
        let ok_rest = chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok_start || !ok_rest || n == "g" || !seen.insert(n) {
            return Err(PolyError::InvalidVariable(n.to_string()));
        }
    }
    Ok(names.iter().map(|s| s.as_ref().to_string()).collect())
}

/// A polynomial: a sparse map from monomials to nonzero coefficients.
#[derive(Clone)]
pub struct Poly {
    field: Field,
    vars: Vars,
    terms: BTreeMap<Monomial, Elem>,
}

impl Poly {
    pub fn zero(field: &Field, vars: &Vars) -> Poly {
        Poly { field: field.clone(), vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(field: &Field, vars: &Vars, c: Elem) -> Poly {
        Poly::from_terms(field, vars, [(Monomial::one(vars.len()), c)])
    }

    /// The `i`-th variable.
    pub fn var(field: &Field, vars: &Vars, i: usize) -> Poly {
        let mut exps = Monomial::one(vars.len());
        exps.0[i] = 1;
        Poly::from_terms(field, vars, [(exps, Elem::ONE)])
    }

    /// Collects terms, adding coefficients of repeated monomials and dropping zeros.
    pub fn from_terms(field: &Field, vars: &Vars, terms: impl IntoIterator<Item = (Monomial, Elem)>) -> Poly {
        let mut p = Poly::zero(field, vars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), vars.len(), "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Elem) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = self.field.add(*o.get(), c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, Elem)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    /// `Some(c)` if the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Elem> {
        match self.terms.len() {
            0 => Some(Elem::ZERO),
            1 => self.terms.iter().next().filter(|(m, _)| m.is_one()).map(|(_, &c)| c),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// Largest exponent of each variable.
    pub fn max_exponents(&self) -> Vec<u32> {
        let mut out = vec![0; self.vars.len()];
        for m in self.terms.keys() {
            for (o, &e) in out.iter_mut().zip(&m.0) {
                *o = (*o).max(e);
            }
        }
        out
    }

    pub fn homogeneous_degree(&self) -> Result<u32, PolyError> {
        let mut degs = self.terms.keys().map(Monomial::total_degree);
        let d = degs.next().ok_or(PolyError::ZeroPolynomial)?;
        if degs.all(|e| e == d) {
            Ok(d)
        } else {
            Err(PolyError::NotHomogeneous)
        }
    }

    /// True for the zero polynomial and for homogeneous ones.
    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_ok()
    }

    fn check_compatible(&self, other: &Poly) {
        assert!(self.field == other.field, "polynomials over different fields");
        assert!(self.vars == other.vars, "polynomials over different variables");
    }

    pub fn scale(&self, c: Elem) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.field, &self.vars);
        }
        let terms = self.terms.iter().map(|(m, &a)| (m.clone(), self.field.mul(a, c))).collect();
        Poly { field: self.field.clone(), vars: self.vars.clone(), terms }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::constant(&self.field, &self.vars, Elem::ONE);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Evaluates at a point with coordinates in the polynomial's own field.
    pub fn eval(&self, point: &[Elem]) -> Result<Elem, PolyError> {
        self.eval_in(&self.field.clone(), point)
    }

    /// Evaluates at a point over `field`, which must contain the coefficient
    /// field; coefficients keep their indices under the embedding.
    pub fn eval_in(&self, field: &Field, point: &[Elem]) -> Result<Elem, PolyError> {
        if point.len() != self.vars.len() {
            return Err(PolyError::ArityMismatch { expected: self.vars.len(), got: point.len() });
        }
        if !field.contains(&self.field) {
            return Err(PolyError::FieldMismatch { poly: self.field.to_string(), other: field.to_string() });
        }
        let maxe = self.max_exponents();
        let powers: Vec<Vec<Elem>> = point
            .iter()
            .zip(&maxe)
            .map(|(&x, &e)| {
                let mut v = Vec::with_capacity(e as usize + 1);
                v.push(Elem::ONE);
                for k in 1..=e as usize {
                    v.push(field.mul(v[k - 1], x));
                }
                v
            })
            .collect();
        let mut acc = Elem::ZERO;
        for (m, &c) in &self.terms {
            let mut t = c;
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = field.mul(t, powers[v][e as usize]);
                }
            }
            acc = field.add(acc, t);
        }
        Ok(acc)
    }

    /// The same polynomial with coefficients pushed into `ext`.
    pub fn base_change(&self, ext: &ExtField) -> Result<Poly, PolyError> {
        if self.field != ext.base {
            return Err(PolyError::FieldMismatch { poly: self.field.to_string(), other: ext.base.to_string() });
        }
        let terms = self.terms.iter().map(|(m, &c)| (m.clone(), ext.embed(c))).collect();
        Ok(Poly { field: ext.field.clone(), vars: self.vars.clone(), terms })
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.vars == other.vars && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let terms = self.terms.iter().map(|(m, &c)| (m.clone(), self.field.neg(c))).collect();
        Poly { field: self.field.clone(), vars: self.vars.clone(), terms }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_compatible(rhs);
        let mut out = Poly::zero(&self.field, &self.vars);
        for (ma, &a) in &self.terms {
            for (mb, &b) in &rhs.terms {
                out.add_term(ma.times(mb), self.field.mul(a, b));
            }
        }
        out
    }
}

/// Writes a coefficient so that the parser reads it back: an integer in a
/// prime field, a polynomial in `g` otherwise. Elements of towers whose
/// immediate subfield is not prime print as `{index}`.
pub fn format_elem(field: &Field, c: Elem) -> String {
    match field.subfield() {
        None => c.0.to_string(),
        Some(sub) if sub.degree() == 1 => {
            let coeffs = field.coefficients(c);
            let parts: Vec<String> = coeffs
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, a)| !a.is_zero())
                .map(|(i, a)| {
                    let g = match i {
                        0 => String::new(),
                        1 => "g".to_string(),
                        _ => format!("g^{i}"),
                    };
                    match (i, a.0) {
                        (0, v) => v.to_string(),
                        (_, 1) => g,
                        (_, v) => format!("{v}*{g}"),
                    }
                })
                .collect();
            match parts.len() {
                0 => "0".to_string(),
                1 => parts.into_iter().next().unwrap(),
                _ => format!("({})", parts.join(" + ")),
            }
        }
        Some(_) => format!("{{{}}}", c.0),
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, &c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            if c != Elem::ONE || m.is_one() {
                factors.push(format_elem(&self.field, c));
            }
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[v].clone()),
                    _ => factors.push(format!("{}^{e}", self.vars[v])),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({self})", self.field)
    }
}

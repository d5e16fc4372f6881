use super::{Poly, PolyError};
use crate::fields::{Elem, Field};

/// A list of polynomials flattened for repeated evaluation over one field.
///
/// [`CompiledSystem::load`] fills a power table for a point once; each
/// [`CompiledSystem::eval`] then costs one multiplication per factor.
#[derive(Debug, Clone)]
pub struct CompiledSystem {
    field: Field,
    nvars: usize,
    max_exp: Vec<u32>,
    offsets: Vec<usize>,
    polys: Vec<CPoly>,
}

#[derive(Debug, Clone)]
struct CPoly {
    coefs: Vec<Elem>,
    /// Term `t` owns `factors[bounds[t]..bounds[t + 1]]`.
    bounds: Vec<u32>,
    factors: Vec<u32>,
}

/// Per-worker buffer of variable powers.
#[derive(Debug, Clone, Default)]
pub struct Scratch {
    powers: Vec<Elem>,
}

impl CompiledSystem {
    /// Compiles `polys` (all on the same variables) for evaluation over
    /// `field`, which must contain their coefficient field.
    pub fn new(polys: &[Poly], nvars: usize, field: &Field) -> Result<Self, PolyError> {
        let mut max_exp = vec![0u32; nvars];
        for p in polys {
            if p.nvars() != nvars {
                return Err(PolyError::ArityMismatch { expected: nvars, got: p.nvars() });
            }
            if !field.contains(p.field()) {
                return Err(PolyError::FieldMismatch { poly: p.field().to_string(), other: field.to_string() });
            }
            for (o, e) in max_exp.iter_mut().zip(p.max_exponents()) {
                *o = (*o).max(e);
            }
        }
        let mut offsets = Vec::with_capacity(nvars);
        let mut total = 0;
        for &e in &max_exp {
            offsets.push(total);
            total += e as usize + 1;
        }
        let polys = polys
            .iter()
            .map(|p| {
                let mut c = CPoly { coefs: Vec::new(), bounds: vec![0], factors: Vec::new() };
                for (m, coef) in p.terms() {
                    c.coefs.push(coef);
                    for (v, &e) in m.exponents().iter().enumerate() {
                        if e > 0 {
                            c.factors.push((offsets[v] + e as usize) as u32);
                        }
                    }
                    c.bounds.push(c.factors.len() as u32);
                }
                c
            })
            .collect();
        Ok(CompiledSystem { field: field.clone(), nvars, max_exp, offsets, polys })
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Fills the power table for `point`.
    #[inline]
    pub fn load(&self, point: &[Elem], scratch: &mut Scratch) {
        debug_assert_eq!(point.len(), self.nvars);
        let total = self.offsets.last().map_or(0, |&o| o + *self.max_exp.last().unwrap() as usize + 1);
        scratch.powers.resize(total, Elem::ZERO);
        for (v, &x) in point.iter().enumerate() {
            let base = self.offsets[v];
            scratch.powers[base] = Elem::ONE;
            let mut acc = Elem::ONE;
            for k in 1..=self.max_exp[v] as usize {
                acc = self.field.mul(acc, x);
                scratch.powers[base + k] = acc;
            }
        }
    }

    /// Value of polynomial `i` at the point last loaded into `scratch`.
    #[inline]
    pub fn eval(&self, i: usize, scratch: &Scratch) -> Elem {
        let p = &self.polys[i];
        let f = &self.field;
        let mut acc = Elem::ZERO;
        for (t, &c) in p.coefs.iter().enumerate() {
            let mut v = c;
            for &idx in &p.factors[p.bounds[t] as usize..p.bounds[t + 1] as usize] {
                v = f.mul(v, scratch.powers[idx as usize]);
            }
            acc = f.add(acc, v);
        }
        acc
    }
}

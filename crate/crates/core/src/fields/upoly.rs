//! Dense univariate polynomials over a [`Field`], just enough for modulus
//! validation. Coefficients are stored low degree first with no trailing zeros.

use super::{Elem, Field};

pub(crate) type UPoly = Vec<Elem>;

pub(crate) fn trim(mut a: UPoly) -> UPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

pub(crate) fn degree(a: &[Elem]) -> Option<usize> {
    a.iter().rposition(|c| !c.is_zero())
}

fn sub(f: &Field, a: &[Elem], b: &[Elem]) -> UPoly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(Elem::ZERO);
            let y = b.get(i).copied().unwrap_or(Elem::ZERO);
            f.sub(x, y)
        })
        .collect();
    trim(out)
}

/// Remainder of `a` modulo a nonzero `m` (not necessarily monic).
pub(crate) fn rem(f: &Field, a: &[Elem], m: &[Elem]) -> UPoly {
    let dm = degree(m).expect("division by the zero polynomial");
    let lead_inv = f.inv(m[dm]).expect("leading coefficient is nonzero");
    let mut r = trim(a.to_vec());
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let c = f.mul(r[dr], lead_inv);
        let shift = dr - dm;
        for (j, &mj) in m.iter().enumerate().take(dm + 1) {
            r[shift + j] = f.sub(r[shift + j], f.mul(c, mj));
        }
        r = trim(r);
    }
    r
}

pub(crate) fn mul_mod(f: &Field, a: &[Elem], b: &[Elem], m: &[Elem]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![Elem::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = f.add(prod[i + j], f.mul(x, y));
        }
    }
    rem(f, &prod, m)
}

pub(crate) fn pow_mod(f: &Field, base: &[Elem], mut exp: u64, m: &[Elem]) -> UPoly {
    let mut result = vec![Elem::ONE];
    let mut b = rem(f, base, m);
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(f, &result, &b, m);
        }
        b = mul_mod(f, &b, &b, m);
        exp >>= 1;
    }
    rem(f, &result, m)
}

pub(crate) fn gcd(f: &Field, a: &[Elem], b: &[Elem]) -> UPoly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    x
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test for a monic `m` of degree `d` over `f` (size `q`):
/// `T^(q^d) = T mod m`, and `gcd(T^(q^(d/l)) - T, m) = 1` for every prime `l | d`.
pub(crate) fn is_irreducible(f: &Field, m: &[Elem]) -> bool {
    let Some(d) = degree(m) else { return false };
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let q = f.size();
    let t: UPoly = vec![Elem::ZERO, Elem::ONE];
    // frob[i] = T^(q^i) mod m
    let mut frob = Vec::with_capacity(d + 1);
    frob.push(rem(f, &t, m));
    for i in 1..=d {
        let next = pow_mod(f, &frob[i - 1], q, m);
        frob.push(next);
    }
    if !sub(f, &frob[d], &t).is_empty() {
        return false;
    }
    for l in prime_divisors(d as u64) {
        let h = sub(f, &frob[d / l as usize], &t);
        let g = gcd(f, &h, m);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

pub(crate) fn factor_distinct_primes(n: u64) -> Vec<u64> {
    prime_divisors(n)
}

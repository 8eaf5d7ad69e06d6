//! Pseudo-division, multivariate GCD and squarefree decomposition.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use num_bigint::BigInt;

use crate::error::{AlgebraError, Result};
use crate::mpoly::{Exp, MPoly, Monomial};
use crate::rat::Rat;

/// Pseudo-remainder of `a` by `b` in `slot`: `lc(b)^(da-db+1) * a mod b`.
pub fn prem(a: &MPoly, b: &MPoly, slot: usize) -> Result<MPoly> {
    if b.is_zero() {
        return Err(AlgebraError::DivisionByZero);
    }
    let db = b.degree_in(slot);
    let da = a.degree_in(slot);
    if a.is_zero() || da < db {
        return Ok(a.clone());
    }
    let lcb = b.lead_coeff_in(slot);
    let ring = a.ring().clone();
    let mut r = a.clone();
    let mut e = da - db + 1;
    while !r.is_zero() && r.degree_in(slot) >= db {
        let dr = r.degree_in(slot);
        let lr = r.lead_coeff_in(slot);
        let shift = MPoly::slot_power(&ring, slot, (dr - db) as Exp);
        r = &(&lcb * &r) - &(&(&lr * &shift) * b);
        e -= 1;
    }
    if e > 0 {
        r = &r * &lcb.pow(e);
    }
    Ok(r)
}

/// Clears denominators and removes the integer content; leading coefficient positive.
pub fn integer_primitive(p: &MPoly) -> MPoly {
    if p.is_zero() {
        return p.clone();
    }
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for (_, c) in p.terms() {
        den = den.lcm(c.denom());
        num = num.gcd(c.numer());
    }
    let mut factor = Rat::new(den, num);
    if p.leading_coeff().is_negative() {
        factor = -factor;
    }
    p.scale(&factor)
}

/// GCD of the coefficients of `p` viewed as a polynomial in `slot`.
pub fn content_in(p: &MPoly, slot: usize) -> MPoly {
    gcd_list(p.coefficients(slot).iter())
}

/// `p` divided by its content in `slot`.
pub fn primitive_in(p: &MPoly, slot: usize) -> MPoly {
    if p.is_zero() {
        return p.clone();
    }
    let c = content_in(p, slot);
    p.exact_div(&c).expect("content divides polynomial")
}

pub fn gcd_list<'a>(items: impl Iterator<Item = &'a MPoly>) -> MPoly {
    let mut acc: Option<MPoly> = None;
    for p in items {
        if p.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => p.monic(),
            Some(g) => gcd(&g, p),
        });
        if acc.as_ref().map_or(false, |g| g.is_constant()) {
            break;
        }
    }
    acc.unwrap_or_else(|| panic!("gcd_list requires at least one nonzero polynomial"))
}

fn monomial_gcd(m: &Monomial, other: &MPoly) -> MPoly {
    let ring = other.ring();
    let mut g: Monomial = m.clone();
    for (s, e) in g.iter_mut().enumerate() {
        if *e > 0 {
            *e = (*e).min(other.min_degree_in(s) as Exp);
        }
    }
    MPoly::from_terms(ring, [(g, Rat::one())])
}

/// Greatest common divisor, normalized to be monic in lexicographic order.
/// `gcd(0, 0)` is zero.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one(a.ring());
    }
    if a.num_terms() == 1 {
        return monomial_gcd(&a.terms()[0].0, b);
    }
    if b.num_terms() == 1 {
        return monomial_gcd(&b.terms()[0].0, a);
    }
    if a == b {
        return a.monic();
    }
    let arity = a.ring().arity();
    let slot = (0..arity)
        .find(|&s| a.contains(s) || b.contains(s))
        .expect("non-constant polynomial has a symbol");
    if !a.contains(slot) {
        return gcd(a, &content_in(b, slot));
    }
    if !b.contains(slot) {
        return gcd(&content_in(a, slot), b);
    }
    let ca = content_in(a, slot);
    let cb = content_in(b, slot);
    let c = gcd(&ca, &cb);
    let pa = integer_primitive(&a.exact_div(&ca).expect("content divides"));
    let pb = integer_primitive(&b.exact_div(&cb).expect("content divides"));
    let g = primitive_prs_gcd(pa, pb, slot);
    (&c * &g).monic()
}

/// Subresultant PRS on primitive inputs; returns the primitive gcd.
fn primitive_prs_gcd(a: MPoly, b: MPoly, slot: usize) -> MPoly {
    let ring = a.ring().clone();
    let (mut a, mut b) = if a.degree_in(slot) >= b.degree_in(slot) {
        (a, b)
    } else {
        (b, a)
    };
    let mut g = MPoly::one(&ring);
    let mut h = MPoly::one(&ring);
    loop {
        let delta = a.degree_in(slot) - b.degree_in(slot);
        let r = prem(&a, &b, slot).expect("nonzero divisor");
        if r.is_zero() {
            return integer_primitive(&primitive_in(&b, slot));
        }
        if r.degree_in(slot) == 0 {
            return MPoly::one(&ring);
        }
        a = b;
        let divisor = &g * &h.pow(delta);
        b = r.exact_div(&divisor).expect("subresultant division is exact");
        g = a.lead_coeff_in(slot);
        h = if delta == 0 {
            h
        } else {
            g.pow(delta)
                .exact_div(&h.pow(delta - 1))
                .expect("subresultant division is exact")
        };
    }
}

pub fn lcm(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() || b.is_zero() {
        return MPoly::zero(a.ring());
    }
    let g = gcd(a, b);
    (a * &b.exact_div(&g).expect("gcd divides")).monic()
}

/// Squarefree decomposition: returns the rational unit and pairs
/// `(factor, multiplicity)` with pairwise coprime, monic, squarefree factors
/// and distinct multiplicities, such that `p = unit * prod factor^mult`.
pub fn squarefree_decomposition(p: &MPoly) -> (Rat, Vec<(MPoly, u32)>) {
    if p.is_zero() {
        return (Rat::zero(), Vec::new());
    }
    let unit = p.leading_coeff();
    let mut out: Vec<(MPoly, u32)> = Vec::new();
    sqf_rec(&p.monic(), &mut out);
    out.sort_by_key(|(_, m)| *m);
    (unit, out)
}

fn push_factor(out: &mut Vec<(MPoly, u32)>, f: MPoly, m: u32) {
    if f.is_constant() {
        return;
    }
    if let Some(entry) = out.iter_mut().find(|(_, mm)| *mm == m) {
        entry.0 = (&entry.0 * &f).monic();
    } else {
        out.push((f.monic(), m));
    }
}

fn sqf_rec(p: &MPoly, out: &mut Vec<(MPoly, u32)>) {
    if p.is_constant() {
        return;
    }
    let slot = (0..p.ring().arity())
        .find(|&s| p.contains(s))
        .expect("non-constant");
    let c = content_in(p, slot);
    let q = p.exact_div(&c).expect("content divides");
    // Yun's algorithm in `slot`
    let dq = q.diff(slot);
    let a0 = gcd(&q, &dq);
    let mut b = q.exact_div(&a0).expect("gcd divides");
    let cc = dq.exact_div(&a0).expect("gcd divides");
    let mut d = &cc - &b.diff(slot);
    let mut i = 1u32;
    while !b.is_constant() {
        let ai = gcd(&b, &d);
        b = b.exact_div(&ai).expect("gcd divides");
        let ci = d.exact_div(&ai).expect("gcd divides");
        d = &ci - &b.diff(slot);
        push_factor(out, ai, i);
        i += 1;
    }
    let mut sub: Vec<(MPoly, u32)> = Vec::new();
    sqf_rec(&c, &mut sub);
    for (f, m) in sub {
        push_factor(out, f, m);
    }
}

/// True iff `gcd(p, dp/dv)` is free of `v`.
pub fn is_squarefree_in(p: &MPoly, name: &str) -> Result<bool> {
    let slot = p.ring().var(name)?;
    if !p.contains(slot) {
        return Err(AlgebraError::Domain(format!("polynomial is free of `{name}`")));
    }
    Ok(!gcd(p, &p.diff(slot)).contains(slot))
}

/// Product of the distinct irreducible-up-to-squarefree factors, monic.
pub fn squarefree_part(p: &MPoly) -> MPoly {
    if p.is_zero() {
        return p.clone();
    }
    let (_, factors) = squarefree_decomposition(p);
    let mut acc = MPoly::one(p.ring());
    for (f, _) in factors {
        acc = &acc * &f;
    }
    acc.monic()
}

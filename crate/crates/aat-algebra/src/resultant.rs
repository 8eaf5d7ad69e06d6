//! Resultants by subresultant pseudo-remainder sequences, plus an independent
//! Sylvester-determinant route.

use crate::error::{AlgebraError, Result};
use crate::gcd::prem;
use crate::mpoly::MPoly;
use crate::ring::VarRing;

/// Resultant of `a` and `b` with respect to the variable `name`.
/// Both inputs must have positive degree in `name`; a free input is a
/// domain error (the variable is already eliminated).
pub fn resultant(a: &MPoly, b: &MPoly, name: &str) -> Result<MPoly> {
    let slot = a.ring().var(name)?;
    if a.ring() != b.ring() {
        return Err(AlgebraError::RingMismatch);
    }
    if !a.contains(slot) || !b.contains(slot) {
        return Err(AlgebraError::Domain(format!(
            "resultant input is free of `{name}`"
        )));
    }
    Ok(resultant_slot(a, b, slot))
}

/// Resultant in a slot. A slot-free operand `b` of degree 0 gives
/// `b^deg(a)`, the usual convention.
pub fn resultant_slot(a: &MPoly, b: &MPoly, slot: usize) -> MPoly {
    let ring = a.ring().clone();
    if a.is_zero() || b.is_zero() {
        return MPoly::zero(&ring);
    }
    let mut negate = false;
    let (mut a, mut b) = (a.clone(), b.clone());
    if a.degree_in(slot) < b.degree_in(slot) {
        if a.degree_in(slot) % 2 == 1 && b.degree_in(slot) % 2 == 1 {
            negate = true;
        }
        std::mem::swap(&mut a, &mut b);
    }
    let db = b.degree_in(slot);
    if db == 0 {
        let r = b.pow(a.degree_in(slot));
        return if negate { -r } else { r };
    }
    let mut g = MPoly::one(&ring);
    let mut h = MPoly::one(&ring);
    loop {
        let da = a.degree_in(slot);
        let db = b.degree_in(slot);
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            negate = !negate;
        }
        let r = prem(&a, &b, slot).expect("nonzero divisor");
        if r.is_zero() {
            return MPoly::zero(&ring);
        }
        a = b;
        b = r
            .exact_div(&(&g * &h.pow(delta)))
            .expect("subresultant division is exact");
        g = a.lead_coeff_in(slot);
        if delta > 0 {
            h = g
                .pow(delta)
                .exact_div(&h.pow(delta - 1))
                .expect("subresultant division is exact");
        }
        if b.degree_in(slot) == 0 {
            let da = a.degree_in(slot);
            let num = b.pow(da);
            let res = if da == 0 {
                &num * &h
            } else {
                num.exact_div(&h.pow(da - 1))
                    .expect("subresultant division is exact")
            };
            return if negate { -res } else { res };
        }
    }
}

/// Resultant as the determinant of the Sylvester matrix (fraction-free
/// Bareiss elimination). Slower; kept as an independent check.
pub fn sylvester_resultant(a: &MPoly, b: &MPoly, name: &str) -> Result<MPoly> {
    let ring = a.ring().clone();
    let slot = ring.var(name)?;
    if a.is_zero() || b.is_zero() {
        return Ok(MPoly::zero(&ring));
    }
    let m = a.degree_in(slot) as usize;
    let n = b.degree_in(slot) as usize;
    if m == 0 && n == 0 {
        return Ok(MPoly::one(&ring));
    }
    let ca = a.coefficients(slot);
    let cb = b.coefficients(slot);
    let size = m + n;
    let mut mat: Vec<Vec<MPoly>> = vec![vec![MPoly::zero(&ring); size]; size];
    for row in 0..n {
        for (k, c) in ca.iter().enumerate() {
            mat[row][row + m - k] = c.clone();
        }
    }
    for row in 0..m {
        for (k, c) in cb.iter().enumerate() {
            mat[n + row][row + n - k] = c.clone();
        }
    }
    Ok(bareiss_det(mat, &ring))
}

/// Determinant of a square matrix of polynomials.
pub fn bareiss_det(mut mat: Vec<Vec<MPoly>>, ring: &std::sync::Arc<VarRing>) -> MPoly {
    let size = mat.len();
    if size == 0 {
        return MPoly::one(ring);
    }
    let mut sign = false;
    let mut prev = MPoly::one(ring);
    for k in 0..size - 1 {
        if mat[k][k].is_zero() {
            match (k + 1..size).find(|&r| !mat[r][k].is_zero()) {
                Some(r) => {
                    mat.swap(k, r);
                    sign = !sign;
                }
                None => return MPoly::zero(ring),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &(&mat[i][j] * &mat[k][k]) - &(&mat[i][k] * &mat[k][j]);
                mat[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
            mat[i][k] = MPoly::zero(ring);
        }
        prev = mat[k][k].clone();
    }
    let d = mat[size - 1][size - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Discriminant-like quantity `Res(p, dp/dx)` (without the leading-coefficient
/// normalization); vanishes exactly when `p` has a repeated root in `name`.
pub fn discriminant(p: &MPoly, name: &str) -> Result<MPoly> {
    let slot = p.ring().var(name)?;
    let dp = p.diff(slot);
    if dp.is_zero() {
        return Ok(MPoly::zero(p.ring()));
    }
    Ok(resultant_slot(p, &dp, slot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcd::gcd;
    use crate::rat::rat;
    use std::sync::Arc;

    fn ring() -> Arc<VarRing> {
        VarRing::new(["s", "t", "x", "y"], ["g"]).unwrap()
    }

    fn v(r: &Arc<VarRing>, n: &str) -> MPoly {
        MPoly::symbol(r, n).unwrap()
    }

    #[test]
    fn linear_resultant_substitutes() {
        let r = ring();
        let (s, x, y) = (v(&r, "s"), v(&r, "x"), v(&r, "y"));
        // Res_s(s - x, s^2 - y) = x^2 - y
        let res = resultant(&(&s - &x), &(&s.pow(2) - &y), "s").unwrap();
        assert_eq!(res, &x.pow(2) - &y);
    }

    #[test]
    fn agrees_with_sylvester() {
        let r = ring();
        let (s, t, x, g) = (v(&r, "s"), v(&r, "t"), v(&r, "x"), v(&r, "g"));
        let a = &(&s.pow(3) - &(&g * &s)) + &(&t * &x);
        let b = &(&s.pow(2) * &t) + &(&x - &MPoly::from_i64(&r, 2));
        let r1 = resultant(&a, &b, "s").unwrap();
        let r2 = sylvester_resultant(&a, &b, "s").unwrap();
        assert_eq!(r1, r2);
        let r3 = resultant(&b, &a, "s").unwrap();
        let r4 = sylvester_resultant(&b, &a, "s").unwrap();
        assert_eq!(r3, r4);
    }

    #[test]
    fn vanishes_iff_common_factor() {
        let r = ring();
        let (s, x) = (v(&r, "s"), v(&r, "x"));
        let c = &s - &x;
        let a = &c * &(&s + &MPoly::one(&r));
        let b = &c * &(&s.pow(2) + &x);
        assert!(resultant(&a, &b, "s").unwrap().is_zero());
        assert!(!gcd(&a, &b).is_constant());
        let b2 = &s.pow(2) + &x;
        assert!(!resultant(&a, &b2, "s").unwrap().is_zero());
    }

    #[test]
    fn discriminant_of_quadratic() {
        let r = ring();
        let s = v(&r, "s");
        let x = v(&r, "x");
        let p = &(&s.pow(2) + &(&x * &s)) + &MPoly::one(&r);
        // Res(p, p') = -(x^2 - 4) for monic quadratics
        let d = discriminant(&p, "s").unwrap();
        assert_eq!(d, -(&x.pow(2) - &MPoly::constant(&r, rat(4))));
    }

    #[test]
    fn free_input_is_domain_error() {
        let r = ring();
        let (s, x) = (v(&r, "s"), v(&r, "x"));
        assert!(matches!(resultant(&(&s - &x), &x, "s"), Err(AlgebraError::Domain(_))));
        // Res_s(s^2 - 1, s - 2) = 3
        let one = MPoly::one(&r);
        let two = MPoly::from_i64(&r, 2);
        let res = resultant(&(&s.pow(2) - &one), &(&s - &two), "s").unwrap();
        assert_eq!(res, MPoly::from_i64(&r, 3));
        assert!(resultant(&(&s - &x), &(&s - &x), "s").unwrap().is_zero());
    }
}

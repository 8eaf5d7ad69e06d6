//! Exact square roots of polynomials.

use num_traits::Signed;

use crate::mpoly::{MPoly, Monomial};
use crate::rat::{sqrt_exact, Rat};

/// Returns `r` with `r^2 == p` and positive leading coefficient, if such a
/// polynomial exists over the rationals.
pub fn poly_sqrt(p: &MPoly) -> Option<MPoly> {
    let ring = p.ring().clone();
    if p.is_zero() {
        return Some(p.clone());
    }
    let (lm, lc) = p.leading_term()?.clone();
    if lm.iter().any(|e| e % 2 == 1) || lc.is_negative() {
        return None;
    }
    let root_c = sqrt_exact(&lc)?;
    let root_m: Monomial = lm.iter().map(|e| e / 2).collect();
    let lead = MPoly::from_terms(&ring, [(root_m.clone(), root_c.clone())]);
    let mut root = lead;
    let two_lc = &root_c * Rat::from_integer(2.into());
    let mut rem = p - &root.pow(2);
    // each step fixes the next term of the root from the leading term of
    // the remainder
    let mut steps = 0usize;
    while !rem.is_zero() {
        steps += 1;
        if steps > 4 * p.num_terms() + 16 {
            return None;
        }
        let (rm, rc) = rem.leading_term()?.clone();
        if rm.iter().zip(root_m.iter()).any(|(a, b)| a < b) {
            return None;
        }
        let tm: Monomial = rm.iter().zip(root_m.iter()).map(|(a, b)| a - b).collect();
        if tm >= root_m {
            return None;
        }
        let t = MPoly::from_terms(&ring, [(tm, &rc / &two_lc)]);
        let twice_root = root.scale(&Rat::from_integer(2.into()));
        rem = &rem - &(&(&twice_root + &t) * &t);
        root = &root + &t;
    }
    Some(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::VarRing;

    #[test]
    fn recovers_square_roots() {
        let r = VarRing::new(["x", "y"], ["a"]).unwrap();
        let x = MPoly::var(&r, "x").unwrap();
        let y = MPoly::var(&r, "y").unwrap();
        let a = MPoly::symbol(&r, "a").unwrap();
        let f = &(&x.pow(2) - &(&a * &y)) + &MPoly::from_i64(&r, 3);
        let sq = f.pow(2);
        assert_eq!(poly_sqrt(&sq), Some(f.sign_normalized()));
        assert_eq!(poly_sqrt(&(&sq + &x)), None);
        assert_eq!(poly_sqrt(&x), None);
        let g = &x - &y;
        assert_eq!(poly_sqrt(&g.pow(2).scale(&crate::rat::rat_frac(4, 9))), Some(g.scale(&crate::rat::rat_frac(2, 3))));
    }
}

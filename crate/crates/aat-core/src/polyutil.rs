//! Content splitting and factor bookkeeping on top of the kernel.

use aat_algebra::{content_in, gcd_list, poly_sqrt, squarefree_decomposition, MPoly, Monomial, RatFn};
use std::collections::BTreeMap;

/// GCD of the coefficients of `p` viewed as a polynomial in `slots`.
pub fn content_wrt(p: &MPoly, slots: &[usize]) -> MPoly {
    let ring = p.ring();
    let mut groups: BTreeMap<Vec<u16>, Vec<(Monomial, aat_algebra::Rat)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        let key: Vec<u16> = slots.iter().map(|&s| m[s]).collect();
        let mut rest = m.clone();
        for &s in slots {
            rest[s] = 0;
        }
        groups.entry(key).or_default().push((rest, c.clone()));
    }
    let coeffs: Vec<MPoly> = groups.into_values().map(|t| MPoly::from_terms(ring, t)).collect();
    gcd_list(coeffs.iter())
}

/// `p` with its content in `slots` removed.
pub fn primitive_wrt(p: &MPoly, slots: &[usize]) -> MPoly {
    if p.is_zero() {
        return p.clone();
    }
    let c = content_wrt(p, slots);
    p.exact_div(&c).expect("content divides")
}

/// Splits `p` into distinct monic factors, using contents in every variable
/// and squarefree decomposition. The factors are not certified irreducible.
pub fn split_factors(p: &MPoly) -> Vec<MPoly> {
    let mut out: Vec<MPoly> = Vec::new();
    let mut queue = vec![p.monic()];
    while let Some(piece) = queue.pop() {
        if piece.is_constant() {
            continue;
        }
        let mut split = false;
        for slot in piece.support() {
            let c = content_in(&piece, slot);
            if !c.is_constant() {
                let rest = piece.exact_div(&c).expect("content divides");
                queue.push(c.monic());
                queue.push(rest.monic());
                split = true;
                break;
            }
        }
        if split {
            continue;
        }
        let (_, sqf) = squarefree_decomposition(&piece);
        if sqf.len() == 1 && sqf[0].1 == 1 {
            if !out.contains(&piece) {
                out.push(piece);
            }
        } else {
            queue.extend(sqf.into_iter().map(|(f, _)| f));
        }
    }
    out.sort_by(|a, b| a.total_degree().cmp(&b.total_degree()).then_with(|| a.to_string().cmp(&b.to_string())));
    out
}

/// Associate normal form: lex-leading coefficient 1.
pub fn normalize(p: &MPoly) -> MPoly {
    p.monic()
}

/// Square root of a rational function with square numerator and
/// denominator, when one exists over the rationals.
pub fn ratfn_sqrt(r: &RatFn) -> Option<RatFn> {
    if r.is_zero() {
        return Some(r.clone());
    }
    let n = poly_sqrt(r.numer())?;
    let d = poly_sqrt(r.denom())?;
    RatFn::new(n, d).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use aat_algebra::{parse_poly, VarRing};

    #[test]
    fn contents_and_factors() {
        let r = VarRing::new(["z", "w", "x", "y"], Vec::<&str>::new()).unwrap();
        let p = parse_poly("(x - y)^3*(x*y + 1)*(w^2*x - y*z^2)", &r).unwrap();
        let c = content_wrt(&p, &[0, 1]);
        assert_eq!(c, parse_poly("(x - y)^3*(x*y + 1)", &r).unwrap().monic());
        assert_eq!(primitive_wrt(&p, &[0, 1]).monic(), parse_poly("w^2*x - y*z^2", &r).unwrap().monic());
        let f = split_factors(&p);
        assert_eq!(f.len(), 3);
        assert!(f.contains(&parse_poly("x - y", &r).unwrap()));
    }
}

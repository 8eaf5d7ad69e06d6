use std::sync::Arc;

use aat_algebra::{
    gcd, parse_poly, rat, resultant_slot, substitute, sylvester_resultant, MPoly, Monomial, Rat,
    RatFn, VarRing,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn ring() -> Arc<VarRing> {
    VarRing::new(["a", "b", "c", "d"], ["p", "q"]).unwrap()
}

/// Random polynomial: up to `terms` terms, each exponent < `max_e`, over the
/// first `nvars` variables and optionally both parameters.
fn poly_strategy(nvars: usize, max_e: u16, terms: usize, params: bool) -> impl Strategy<Value = MPoly> {
    let arity = 6;
    let mono = proptest::collection::vec(0..max_e, arity).prop_map(move |mut v| {
        for (i, e) in v.iter_mut().enumerate() {
            let used = i < nvars || (params && i >= 4);
            if !used {
                *e = 0;
            }
        }
        v
    });
    let coeff = (-9i64..=9, 1i64..=4);
    proptest::collection::vec((mono, coeff), 0..=terms).prop_map(move |ts| {
        let r = ring();
        MPoly::from_terms(
            &r,
            ts.into_iter()
                .map(|(m, (n, d))| (Monomial::from_vec(m), Rat::new(n.into(), d.into()))),
        )
    })
}

fn small() -> impl Strategy<Value = MPoly> {
    poly_strategy(3, 3, 4, false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in small(), b in small(), c in small()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn gcd_scales_with_common_factor(a in small(), b in small(), c in small()) {
        prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero());
        let lhs = gcd(&(&a * &c), &(&b * &c));
        let rhs = (&c * &gcd(&a, &b)).monic();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gcd_divides_both(a in small(), b in small()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let g = gcd(&a, &b);
        prop_assert!(a.exact_div(&g).is_some());
        prop_assert!(b.exact_div(&g).is_some());
    }

    #[test]
    fn resultant_vanishes_iff_common_factor(a in poly_strategy(2, 3, 3, false), b in poly_strategy(2, 3, 3, false), shared in any::<bool>()) {
        let r = ring();
        let slot = 0;
        let x = MPoly::var(&r, "a").unwrap();
        let y = MPoly::var(&r, "b").unwrap();
        let (a, b) = if shared {
            let f = &x - &y;
            (&a * &f, &b * &f)
        } else {
            (a, b)
        };
        prop_assume!(a.contains(slot) && b.contains(slot));
        let res = resultant_slot(&a, &b, slot);
        let g = gcd(&a, &b);
        prop_assert_eq!(res.is_zero(), g.contains(slot));
    }

    #[test]
    fn resultant_matches_sylvester(a in poly_strategy(2, 4, 4, true), b in poly_strategy(2, 3, 4, true)) {
        prop_assume!(a.contains(0) && b.contains(0));
        let fast = resultant_slot(&a, &b, 0);
        let slow = sylvester_resultant(&a, &b, "a").unwrap();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn derivative_is_linear_and_leibniz(a in small(), b in small(), k in -5i64..5) {
        let d = |p: &MPoly| p.differentiate("a").unwrap();
        let k = rat(k);
        prop_assert_eq!(d(&(&a.scale(&k) + &b)), &d(&a).scale(&k) + &d(&b));
        prop_assert_eq!(d(&(&a * &b)), &(&d(&a) * &b) + &(&a * &d(&b)));
    }

    #[test]
    fn print_parse_roundtrip(p in poly_strategy(4, 7, 8, true)) {
        let r = ring();
        let text = p.to_string();
        let back = parse_poly(&text, &r).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn numeric_substitution_agrees(p in small(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        // substitute a = b/(c + 3) exactly, then evaluate; compare with direct evaluation
        let r = ring();
        let b = MPoly::var(&r, "b").unwrap();
        let c = MPoly::var(&r, "c").unwrap();
        let val = RatFn::new(b, &c + &MPoly::from_i64(&r, 3)).unwrap();
        let exact = substitute(&p, &[(0, val.clone())]).unwrap();
        let pt = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(re, im),
            Complex64::new(im, 0.5),
            Complex64::new(0.3, -re),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let a_val = val.eval_complex(&pt).unwrap();
        let mut direct_pt = pt.clone();
        direct_pt[0] = a_val;
        let (direct, scale) = p.eval_with_scale(&direct_pt);
        let via = exact.eval_complex(&pt).unwrap();
        prop_assert!((direct - via).norm() <= 1e-12 * (1.0 + scale));
    }
}

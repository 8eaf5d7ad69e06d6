use aat_algebra::{parse_poly, rat, MPoly, RatFn};
use aat_core::addition::{lattice_defect, point_add, point_at, Via};
use aat_core::alphabet::standard_ring;
use aat_core::extfield::ExtField;
use aat_core::family::Family;
use aat_core::numeric::backend::MappingBackend;
use aat_core::numeric::period::{integer_coordinates, same_lattice};
use aat_core::numeric::residual::ResidualReport;
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn basis() -> Vec<Vec<C>> {
    vec![vec![C::new(2.622, 0.0)], vec![C::new(0.0, 2.622)]]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integer_combinations_recovered(m in -20i64..20, k in -20i64..20) {
        let b = basis();
        let v = vec![b[0][0] * m as f64 + b[1][0] * k as f64];
        let (coords, d) = integer_coordinates(&v, &b).unwrap();
        prop_assert_eq!(coords, vec![m, k]);
        prop_assert!(d < 1e-9);
        prop_assert!(lattice_defect(v[0], &[b[0][0], b[1][0]]) < 1e-9);
    }

    #[test]
    fn lattice_invariant_under_unimodular_change(a in -3i64..4, b in -3i64..4, c in -3i64..4) {
        // [[1 + b c, b], [c, 1]] has determinant 1 for any b, c; compose with a shear by a
        let (m11, m12, m21, m22) = (1 + b * c, b + a * (1 + b * c), c, 1 + a * c);
        let base = basis();
        let w = |x: i64, y: i64| vec![base[0][0] * x as f64 + base[1][0] * y as f64];
        let other = vec![w(m11, m12), w(m21, m22)];
        prop_assert!(same_lattice(&other, &base, 1e-9));
        let doubled = vec![w(2 * m11, 2 * m12), w(m21, m22)];
        prop_assert!(!same_lattice(&doubled, &base, 1e-9));
    }

    #[test]
    fn residual_statistics_are_ordered(values in prop::collection::vec(0.0f64..1.0, 1..50), tol in 1e-3f64..1.0) {
        let r = ResidualReport::from_values("r", values.clone(), 0, tol);
        prop_assert!(r.p95 <= r.max && r.mean <= r.max);
        let below = values.iter().filter(|v| **v < tol).count() as f64;
        prop_assert_eq!(r.passed(), below >= (0.95 * values.len() as f64).ceil());
    }

    #[test]
    fn normal_form_is_idempotent(c0 in -5i64..5, c1 in -5i64..5, e in 0u32..5) {
        let ring = standard_ring(1, &[]).unwrap();
        let v = parse_poly("theta^2 - 4*x1^3 + 4*x1", &ring).unwrap();
        let field = ExtField::new(&v, ring.var("theta").unwrap());
        let p: MPoly = parse_poly(&format!("({c0})*theta^{e}*x1 + ({c1})*theta^{} + x1^2", e + 1), &ring).unwrap();
        let q: MPoly = parse_poly("x1 - 3", &ring).unwrap();
        let r = RatFn::new(p, q).unwrap();
        let once = field.normal_form(&r);
        prop_assert_eq!(field.normal_form(&once), once.clone());
        prop_assert!(once.numer().degree("theta").unwrap() < 2);
    }

    #[test]
    fn backend_law_commutes(ur in -1.0f64..1.0, ui in -1.0f64..1.0, vr in -1.0f64..1.0, vi in -1.0f64..1.0) {
        let b = MappingBackend::new(Family::Weierstrass { g2: rat(4), g3: rat(0) }).unwrap();
        let alpha = vec![vec![1]];
        let (p, q) = (point_at(&b, &alpha, vec![C::new(ur, ui)]), point_at(&b, &alpha, vec![C::new(vr, vi)]));
        prop_assume!(p.is_finite() && q.is_finite());
        let via = Via::Backend { backend: &b, alpha: &alpha };
        let (pq, qp) = (point_add(&p, &q, &via).unwrap(), point_add(&q, &p, &via).unwrap());
        prop_assume!(pq.is_finite());
        prop_assert!(pq.distance(&qp) < 1e-9);
    }
}

//! First-order relations for the singular families whose derivation by
//! elimination is out of reach at desk scale. Each one is still vetted
//! numerically before use.

use aat_algebra::{parse_poly, AlgebraError, Rat};

use crate::alphabet::standard_ring;
use crate::elimination::FirstOrderRelation;
use crate::family::Family;

/// Transcendental constants of case 5, bound numerically by the backend.
pub const CASE5_CONSTANTS: [&str; 3] = ["wp_a", "wpd_a", "zeta_a"];

fn cubic(g2: &Rat, g3: &Rat) -> String {
    format!("(4*x1^3 - ({g2})*x1 - ({g3}))")
}

/// `Some` for families listed as numeric-only.
pub fn registry_relations(family: &Family) -> Option<Result<Vec<FirstOrderRelation>, AlgebraError>> {
    let (texts, params): (Vec<String>, Vec<String>) = match family {
        Family::Case4 { eps: 1, g2, g3 } => (
            vec![
                format!("z1_1^2 - {}", cubic(g2, g3)),
                "z1_2".into(),
                // d/du1 (u2 - zeta(u1)) = wp(u1)
                "z2_1 - x1".into(),
                "z2_2 - 1".into(),
            ],
            Vec::new(),
        ),
        Family::Case5 { g2, g3, .. } => (
            vec![
                format!("z1_1^2 - {}", cubic(g2, g3)),
                "z1_2".into(),
                // zeta(u - a) - zeta(u) + zeta(a) = (wp'(u) + wp'(a)) / (2 (wp(u) - wp(a)))
                format!("(2*(x1 - wp_a)*(z2_1 + zeta_a*x2) - wpd_a*x2)^2 - x2^2*{}", cubic(g2, g3)),
                "z2_2 - x2".into(),
            ],
            CASE5_CONSTANTS.iter().map(|s| s.to_string()).collect(),
        ),
        _ => return None,
    };
    Some((|| {
        let ring = standard_ring(2, &params)?;
        let idx = [(1, 1), (1, 2), (2, 1), (2, 2)];
        texts
            .iter()
            .zip(idx)
            .map(|(t, (k, p))| {
                Ok(FirstOrderRelation {
                    k,
                    p,
                    poly: parse_poly(t, &ring)?.monic(),
                    source: "registry".into(),
                    residual: None,
                })
            })
            .collect()
    })())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::backend::MappingBackend;
    use crate::numeric::residual::{residual_check, Recipe};
    use crate::numeric::sampling::{SampleBox, Sampler};
    use aat_algebra::{rat, rat_frac};

    #[test]
    fn registry_relations_vanish() {
        for fam in [
            Family::Case4 { eps: 1, g2: rat(4), g3: rat(0) },
            Family::Case5 { a: rat_frac(1, 2), g2: rat(4), g3: rat(0) },
        ] {
            let b = MappingBackend::new(fam.clone()).unwrap();
            let recipe = Recipe::new(b.constants());
            for r in registry_relations(&fam).unwrap().unwrap() {
                let mut s = Sampler::stream(1, "reg", SampleBox::default());
                let rep = residual_check(&r.name(), &r.poly, &recipe, &b, 100, 1e-9, &mut s).unwrap();
                assert!(rep.passed(), "{fam}: {rep:?}");
            }
        }
        assert!(registry_relations(&Family::Case3).is_none());
    }
}

//! Addition-theorem polynomials generated for the built-in families
//! (`G1 = auto` in problem files).

use std::sync::Arc;

use aat_algebra::{parse_poly, resultant, squarefree_part, MPoly, Rat, VarRing};
use thiserror::Error;

use crate::alphabet::{lam, standard_vars, x, y};
use crate::family::Family;
use crate::polyutil::{normalize, primitive_wrt};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("family `{0}` has no built-in addition-theorem generator")]
    Unsupported(String),
    #[error("generator failed: {0}")]
    Algebra(#[from] aat_algebra::AlgebraError),
}

/// Cubic `4 t^3 - g2 t - g3` as text.
fn cubic(t: &str, g2: &Rat, g3: &Rat) -> String {
    format!("(4*{t}^3 - ({g2})*{t} - ({g3}))")
}

/// Auxiliary ring: standard variables plus the two square-root symbols.
fn aux_ring(n: usize) -> Result<Arc<VarRing>, GeneratorError> {
    let mut vars = standard_vars(n);
    vars.push("s".into());
    vars.push("t".into());
    Ok(VarRing::new(vars, Vec::<String>::new())?)
}

/// Eliminates `s = wp'(u)`, `t = wp'(v)` from `rel` (linear in `s - t`),
/// keeps the part that depends on `L{k}` and makes it squarefree.
fn eliminate_roots(
    rel: &str,
    k: usize,
    xk: &str,
    yk: &str,
    g2: &Rat,
    g3: &Rat,
    n: usize,
    target: &Arc<VarRing>,
) -> Result<MPoly, GeneratorError> {
    let aux = aux_ring(n)?;
    let e = parse_poly(rel, &aux)?;
    let qs = parse_poly(&format!("s^2 - {}", cubic(xk, g2, g3)), &aux)?;
    let qt = parse_poly(&format!("t^2 - {}", cubic(yk, g2, g3)), &aux)?;
    let r1 = resultant(&e, &qs, "s")?;
    let r2 = resultant(&r1, &qt, "t")?;
    let l = aux.var(&lam(k))?;
    let prim = primitive_wrt(&r2, &[l]);
    let g = normalize(&squarefree_part(&prim));
    Ok(g.to_ring(target, &[])?)
}

/// Weierstrass addition relation
/// `4 (L + x + y) (x - y)^2 = (s - t)^2` with `s^2, t^2` the cubic at `x, y`.
fn weierstrass(k: usize, g2: &Rat, g3: &Rat, n: usize, target: &Arc<VarRing>) -> Result<MPoly, GeneratorError> {
    let (xk, yk) = (x(k), y(k));
    let rel = format!("4*({} + {xk} + {yk})*({xk} - {yk})^2 - (s - t)^2", lam(k));
    eliminate_roots(&rel, k, &xk, &yk, g2, g3, n, target)
}

/// Generated `G_1..G_n` in the standard ring `target`.
pub fn generate(family: &Family, target: &Arc<VarRing>) -> Result<Vec<MPoly>, GeneratorError> {
    let p = |s: &str| -> Result<MPoly, GeneratorError> { Ok(parse_poly(s, target)?) };
    match family {
        Family::Exp { .. } => Ok(vec![p("L1 - x1*y1")?]),
        Family::Rational { a: _, b } => Ok(vec![p(&format!("L1 - x1 - y1 + ({b})"))?]),
        Family::Weierstrass { g2, g3 } => Ok(vec![weierstrass(1, g2, g3, 1, target)?]),
        Family::Case1 => Ok(vec![p("L1 - x1 - y1")?, p("L2 - x2 - y2")?]),
        Family::Case2 => Ok(vec![p("L1 - x1 - y1")?, p("L2 - x2*y2")?]),
        Family::Case3 => Ok(vec![p("L1 - x1*y1")?, p("L2 - x2*y2")?]),
        Family::Case4 { eps, g2, g3 } => {
            let g1 = weierstrass(1, g2, g3, 2, target)?;
            let g2poly = if *eps == 0 {
                p("L2 - x2 - y2")?
            } else {
                // zeta(u + v) - zeta(u) - zeta(v) = (s - t) / (2 (x1 - y1))
                let rel = "2*(x1 - y1)*(L2 - x2 - y2) + s - t";
                eliminate_roots(rel, 2, "x1", "y1", g2, g3, 2, target)?
            };
            Ok(vec![g1, g2poly])
        }
        Family::Case5 { .. } => Err(GeneratorError::Unsupported(family.id().into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::standard_ring;
    use aat_algebra::rat;

    #[test]
    fn lemniscatic_generator() {
        let r = standard_ring(1, &[]).unwrap();
        let g = generate(&Family::Weierstrass { g2: rat(4), g3: rat(0) }, &r).unwrap();
        let expected = parse_poly(
            "L1^2*(x1 - y1)^2 - 2*L1*(x1^2*y1 + x1*y1^2 - x1 - y1) + (x1*y1 + 1)^2",
            &r,
        )
        .unwrap();
        assert_eq!(g[0], normalize(&expected));
    }

    #[test]
    fn case4_second_generator_has_degree_four() {
        let r = standard_ring(2, &[]).unwrap();
        let fam = Family::Case4 { eps: 1, g2: rat(4), g3: rat(0) };
        let g = generate(&fam, &r).unwrap();
        assert_eq!(g[1].degree("L2").unwrap(), 4);
        assert_eq!(g[0].degree("L1").unwrap(), 2);
    }
}

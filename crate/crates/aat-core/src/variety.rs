//! The addition-theorem variety: a primitive element `theta` for the
//! derivatives, its minimal polynomial `V(theta; x)`, rational expressions of
//! every derivative in `(theta, x)` and the total differential system for
//! the inverse map.

use std::sync::Arc;

use aat_algebra::{
    is_squarefree_in, resultant::bareiss_det, resultant_slot, substitute, AlgebraError, MPoly, RatFn,
    VarRing,
};
use num_complex::Complex64 as C;
use serde::Serialize;
use thiserror::Error;

use crate::alphabet::{standard_ring, x, z, THETA};
use crate::elimination::{select_factor, FirstOrderRelation};
use crate::extfield::{ExtElem, ExtField};
use crate::numeric::backend::MappingBackend;
use crate::numeric::residual::{collect, Bound, Recipe, ResidualError, ResidualReport};
use crate::numeric::sampling::{SampleBox, Sampler};
use crate::polyutil::{normalize, primitive_wrt, ratfn_sqrt};
use crate::problem::Options;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VarietyError {
    #[error("no primitive element found with |alpha| <= 2")]
    NoPrimitiveElement,
    #[error("relation {0} is missing")]
    MissingRelation(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Residual(#[from] ResidualError),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = VarietyError> = std::result::Result<T, E>;

/// `zk_p` written in `(theta, x)`.
#[derive(Debug, Clone, Serialize)]
pub struct DerivativeExpression {
    pub k: usize,
    pub p: usize,
    #[serde(skip)]
    pub expr: RatFn,
    pub text: String,
    pub method: String,
    /// Substituting into `P_kp` gives zero modulo `V`, exactly.
    pub consistent: bool,
}

#[derive(Debug, Clone)]
pub struct VarietySpec {
    pub alpha: Vec<Vec<i64>>,
    pub v: MPoly,
    pub h: u32,
    pub separable: bool,
    pub degree_bound: u32,
    pub expressions: Vec<DerivativeExpression>,
    pub residual: ResidualReport,
    pub candidates_tried: usize,
    pub field: ExtField,
}

impl VarietySpec {
    pub fn expression(&self, k: usize, p: usize) -> Option<&DerivativeExpression> {
        self.expressions.iter().find(|e| e.k == k && e.p == p)
    }
}

/// Candidate coefficient matrices: identity, unit matrices, then the grid
/// `{-2..2}^(n*n)` without the zero matrix, each listed once.
pub fn alpha_candidates(n: usize) -> Vec<Vec<Vec<i64>>> {
    let mut out: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut push = |m: Vec<Vec<i64>>| {
        if !out.contains(&m) {
            out.push(m);
        }
    };
    push((0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect());
    for k in 0..n {
        for p in 0..n {
            push((0..n).map(|i| (0..n).map(|j| ((i, j) == (k, p)) as i64).collect()).collect());
        }
    }
    let cells = n * n;
    let total = 5usize.pow(cells as u32);
    for code in 0..total {
        let mut c = code;
        let mut flat = vec![0i64; cells];
        for e in flat.iter_mut().rev() {
            *e = (c % 5) as i64 - 2;
            c /= 5;
        }
        if flat.iter().all(|&e| e == 0) {
            continue;
        }
        push(flat.chunks(n).map(|r| r.to_vec()).collect());
    }
    out
}

fn relation<'a>(rels: &'a [FirstOrderRelation], k: usize, p: usize) -> Result<&'a FirstOrderRelation> {
    rels.iter()
        .find(|r| r.k == k && r.p == p)
        .ok_or_else(|| VarietyError::MissingRelation(format!("P_{k}{p}")))
}

/// `theta - sum alpha_kp zk_p` with the derivative variables in `skip`
/// kept and all others eliminated against their `P_kp`.
fn chain(
    ring: &Arc<VarRing>,
    rels: &[FirstOrderRelation],
    alpha: &[Vec<i64>],
    skip: Option<(usize, usize)>,
) -> Result<MPoly> {
    let n = alpha.len();
    let mut t = MPoly::var(ring, THETA)?;
    for k in 1..=n {
        for p in 1..=n {
            let a = alpha[k - 1][p - 1];
            if a != 0 {
                t = &t - &MPoly::var(ring, &z(k, p))?.scale(&aat_algebra::rat(a));
            }
        }
    }
    for k in 1..=n {
        for p in 1..=n {
            if Some((k, p)) == skip {
                continue;
            }
            let slot = ring.var(&z(k, p))?;
            if t.contains(slot) {
                t = resultant_slot(&t, &relation(rels, k, p)?.poly, slot);
                if t.is_zero() {
                    return Ok(t);
                }
            }
        }
    }
    Ok(t)
}

fn ext_upoly(field: &ExtField, p: &MPoly, slot: usize) -> Vec<ExtElem> {
    p.coefficients(slot).iter().map(|c| field.from_poly(c)).collect()
}

/// Scaled residual of `zk_p - expr(theta, x)` on backend samples.
fn expression_residual(
    id: &str,
    expr: &RatFn,
    k: usize,
    p: usize,
    recipe: &Recipe,
    backend: &MappingBackend,
    opts: &Options,
) -> Result<ResidualReport> {
    let ring = expr.ring().clone();
    let mut sampler = Sampler::stream(opts.seed, id, SampleBox::default());
    Ok(collect(id, opts.samples, opts.tol, &mut sampler, |s| {
        let Some(b) = Bound::draw(backend, recipe, s, false) else {
            return Ok(None);
        };
        let mut point = vec![C::new(0.0, 0.0); ring.arity()];
        for slot in expr.numer().support().into_iter().chain(expr.denom().support()) {
            point[slot] = b.lookup(recipe, ring.name(slot))?;
        }
        let Ok(val) = expr.eval_complex(&point) else {
            return Ok(None);
        };
        let zk = b.jac_u[k - 1][p - 1];
        Ok(Some((zk - val).norm() / (1.0 + zk.norm())))
    })?)
}

/// Writes `zk_p` rationally in `(theta, x)`.
#[allow(clippy::too_many_arguments)]
pub fn express_derivative(
    field: &ExtField,
    rels: &[FirstOrderRelation],
    alpha: &[Vec<i64>],
    k: usize,
    p: usize,
    recipe: &Recipe,
    backend: &MappingBackend,
    opts: &Options,
) -> Result<Option<DerivativeExpression>> {
    let ring = field.ring.clone();
    let zslot = ring.var(&z(k, p))?;
    let pk = &relation(rels, k, p)?.poly;
    let coeffs = pk.coefficients(zslot);
    let finish = |expr: RatFn, method: &str| -> Result<Option<DerivativeExpression>> {
        let expr = field.normal_form(&expr);
        let back = substitute(pk, &[(zslot, expr.clone())])?;
        let consistent = field.from_poly(back.numer()).is_empty();
        Ok(Some(DerivativeExpression {
            k,
            p,
            text: expr.to_string(),
            expr,
            method: method.into(),
            consistent,
        }))
    };

    if coeffs.len() == 2 {
        let e = RatFn::new(-&coeffs[0], coeffs[1].clone())?;
        return finish(e, "linear relation");
    }
    if alpha[k - 1][p - 1] != 0 {
        let t = chain(&ring, rels, alpha, Some((k, p)))?;
        if t.degree_in(zslot) == 1 {
            let tc = t.coefficients(zslot);
            let den = field.from_poly(&tc[1]);
            if field.inverse(&den).is_some() {
                return finish(RatFn::new(-&tc[0], tc[1].clone())?, "primitive element relation");
            }
        }
        if t.contains(zslot) {
            if let Some(g) = field.gcd(&ext_upoly(field, pk, zslot), &ext_upoly(field, &t, zslot)) {
                if g.len() == 2 {
                    let root = field.to_ratfn(&g[0]);
                    return finish(-&root, "gcd over the extension");
                }
            }
        }
    }
    if coeffs.len() == 3 && field.degree() <= 2 {
        // roots of a Z^2 + b Z + c with the square root of the
        // discriminant taken in K(x) or in K(x) * theta'
        let (c, b, a) = (&coeffs[0], &coeffs[1], &coeffs[2]);
        let disc = &(b * b) - &(a * c).scale(&aat_algebra::rat(4));
        let disc = RatFn::from_poly(disc);
        let two_a = RatFn::from_poly(a.scale(&aat_algebra::rat(2)));
        let minus_b = RatFn::from_poly(-b);
        let mut roots: Vec<RatFn> = Vec::new();
        if let Some(t) = ratfn_sqrt(&disc) {
            roots.push(&(&minus_b + &t) / &two_a);
            roots.push(&(&minus_b - &t) / &two_a);
        }
        if field.degree() == 2 {
            let m = &field.modulus;
            let half_m1 = m[1].scale(&aat_algebra::rat_frac(1, 2));
            let d = &(&half_m1 * &half_m1) - &m[0];
            if !d.is_zero() {
                if let Some(s) = ratfn_sqrt(&(&disc / &d)) {
                    let theta = RatFn::from_poly(MPoly::var(&ring, THETA)?);
                    let shifted = &theta + &half_m1;
                    let st = &s * &shifted;
                    roots.push(&(&minus_b + &st) / &two_a);
                    roots.push(&(&minus_b - &st) / &two_a);
                }
            }
        }
        for (i, r) in roots.iter().enumerate() {
            let rep = expression_residual(&format!("root-{k}{p}-{i}"), r, k, p, recipe, backend, opts)?;
            if rep.passed() {
                return finish(r.clone(), "quadratic root selected numerically");
            }
        }
    }
    Ok(None)
}

/// Searches the coefficient grid for a primitive element and builds `V`.
pub fn find_primitive_element(
    rels: &[FirstOrderRelation],
    backend: &MappingBackend,
    opts: &Options,
) -> Result<VarietySpec> {
    let n = backend.n();
    let ring = rels
        .first()
        .ok_or_else(|| VarietyError::MissingRelation("P_11".into()))?
        .poly
        .ring()
        .clone();
    let theta = ring.var(THETA)?;
    let mut tried = 0;
    for alpha in alpha_candidates(n) {
        tried += 1;
        let r = chain(&ring, rels, &alpha, None)?;
        if r.is_zero() || !r.contains(theta) {
            continue;
        }
        let recipe = Recipe::new(backend.constants()).with_alpha(alpha.clone());
        let prim = primitive_wrt(&r, &[theta]);
        let sel = select_factor("V", &prim, theta, &recipe, backend, opts.samples, opts.tol, opts.seed)
            .map_err(|e| VarietyError::Internal(e.to_string()))?;
        if !sel.residual.passed() {
            continue;
        }
        let v = normalize(&sel.poly);
        if !is_squarefree_in(&v, THETA)? {
            continue;
        }
        let field = ExtField::new(&v, theta);
        let mut expressions = Vec::new();
        let mut complete = true;
        for k in 1..=n {
            for p in 1..=n {
                match express_derivative(&field, rels, &alpha, k, p, &recipe, backend, opts)? {
                    Some(e) => expressions.push(e),
                    None => {
                        complete = false;
                        break;
                    }
                }
            }
            if !complete {
                break;
            }
        }
        if !complete {
            continue;
        }
        let mut degree_bound = 1u32;
        for k in 1..=n {
            for p in 1..=n {
                if alpha[k - 1][p - 1] != 0 {
                    let rel = relation(rels, k, p)?;
                    degree_bound *= rel.poly.degree_in(ring.var(&z(k, p))?).max(1);
                }
            }
        }
        return Ok(VarietySpec {
            h: v.degree_in(theta),
            alpha,
            separable: true,
            degree_bound,
            expressions,
            residual: sel.residual,
            candidates_tried: tried,
            field,
            v,
        });
    }
    Err(VarietyError::NoPrimitiveElement)
}

/// Jacobian determinant of `[z_ij]` and `p_ij = (1/J) dJ/dz_ij`.
#[derive(Debug, Clone)]
pub struct PijMatrix {
    pub n: usize,
    pub j: MPoly,
    pub entries: Vec<Vec<RatFn>>,
}

fn z_matrix(ring: &Arc<VarRing>, n: usize) -> Result<Vec<Vec<MPoly>>> {
    (1..=n)
        .map(|i| (1..=n).map(|j| Ok(MPoly::var(ring, &z(i, j))?)).collect())
        .collect()
}

pub fn build_pij(ring: &Arc<VarRing>, n: usize) -> Result<PijMatrix> {
    let j = bareiss_det(z_matrix(ring, n)?, ring);
    let mut entries = Vec::with_capacity(n);
    for a in 1..=n {
        let mut row = Vec::with_capacity(n);
        for b in 1..=n {
            row.push(RatFn::new(j.differentiate(&z(a, b))?, j.clone())?);
        }
        entries.push(row);
    }
    Ok(PijMatrix { n, j, entries })
}

/// Inverse of `[z_ij]` by Gauss-Jordan elimination over rational functions.
pub fn inverse_matrix(ring: &Arc<VarRing>, n: usize) -> Result<Vec<Vec<RatFn>>> {
    let mut a: Vec<Vec<RatFn>> = z_matrix(ring, n)?
        .into_iter()
        .map(|r| r.into_iter().map(RatFn::from_poly).collect())
        .collect();
    let mut inv: Vec<Vec<RatFn>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { RatFn::one(ring) } else { RatFn::zero(ring) }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| VarietyError::Internal("singular matrix".into()))?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let f = a[col][col].inverse()?;
        for j in 0..n {
            a[col][j] = &a[col][j] * &f;
            inv[col][j] = &inv[col][j] * &f;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let m = a[r][col].clone();
            for j in 0..n {
                a[r][j] = &a[r][j] - &(&m * &a[col][j]);
                inv[r][j] = &inv[r][j] - &(&m * &inv[col][j]);
            }
        }
    }
    Ok(inv)
}

/// `p_ij - (Z^-1)_ji` vanishes for every entry.
pub fn adjugate_identity_holds(n: usize) -> Result<bool> {
    let ring = standard_ring(n, &[])?;
    let pij = build_pij(&ring, n)?;
    let inv = inverse_matrix(&ring, n)?;
    for i in 0..n {
        for j in 0..n {
            if !(&pij.entries[i][j] - &inv[j][i]).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct PainleveSystem {
    pub lines: Vec<String>,
    pub entry_errors: Vec<String>,
}

fn wrap(p: &MPoly) -> String {
    if p.num_terms() > 1 {
        format!("({p})")
    } else {
        p.to_string()
    }
}

fn term(c: &RatFn, d: &str) -> String {
    let (num, den) = (c.numer(), c.denom());
    let neg_one = -&MPoly::one(num.ring());
    let head = if num.is_one() {
        d.to_string()
    } else if *num == neg_one {
        format!("-{d}")
    } else {
        format!("{}*{d}", wrap(num))
    };
    if den.is_one() {
        head
    } else if den.num_terms() == 1 && den.leading_coeff() == aat_algebra::rat(1) {
        format!("{head}/{den}")
    } else {
        format!("{head}/({den})")
    }
}

/// `du_i = sum_j (Z^-1)_ij dx_j` with `(Z^-1)_ij = p_ji` written in
/// `(theta, x)`.
pub fn painleve_system(spec: &VarietySpec, pij: &PijMatrix) -> Result<PainleveSystem> {
    let n = pij.n;
    let ring = spec.v.ring().clone();
    let mut bindings = Vec::new();
    for e in &spec.expressions {
        bindings.push((ring.var(&z(e.k, e.p))?, e.expr.clone()));
    }
    let mut lines = Vec::new();
    let mut errors = Vec::new();
    for i in 1..=n {
        let mut terms = Vec::new();
        for j in 1..=n {
            let entry = &pij.entries[j - 1][i - 1];
            let num = substitute(entry.numer(), &bindings)?;
            let den = substitute(entry.denom(), &bindings)?;
            let den_nf = spec.field.normal_form(&den);
            if spec.field.from_poly(den_nf.numer()).is_empty() {
                errors.push(format!("p_{j}{i}: denominator vanishes modulo V"));
                continue;
            }
            let val = spec.field.normal_form(&(&num / &den));
            if val.is_zero() {
                continue;
            }
            let d = if n == 1 { "dx".to_string() } else { format!("d{}", x(j)) };
            terms.push(term(&val, &d));
        }
        let lhs = if n == 1 { "du".to_string() } else { format!("du{i}") };
        let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ").replace("+ -", "- ") };
        lines.push(format!("{lhs} = {rhs}"));
    }
    Ok(PainleveSystem {
        lines,
        entry_errors: errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::standard_ring;
    use crate::family::Family;
    use aat_algebra::{parse_poly, rat};

    fn rel(k: usize, p: usize, s: &str, ring: &Arc<VarRing>) -> FirstOrderRelation {
        FirstOrderRelation {
            k,
            p,
            poly: parse_poly(s, ring).unwrap(),
            source: "test".into(),
            residual: None,
        }
    }

    #[test]
    fn adjugate_identity() {
        for n in 1..=3 {
            assert!(adjugate_identity_holds(n).unwrap(), "n = {n}");
        }
        let r = standard_ring(2, &[]).unwrap();
        let p = build_pij(&r, 2).unwrap();
        assert_eq!(p.entries[0][0].to_string(), "z2_2/(z1_1*z2_2 - z1_2*z2_1)");
        // numeric 2x2 example: J = -2, p_11 = -2
        let vals = [("z1_1", 1.0), ("z1_2", 2.0), ("z2_1", 3.0), ("z2_2", 4.0)];
        let mut pt = vec![C::new(0.0, 0.0); r.arity()];
        for (name, v) in vals {
            pt[r.var(name).unwrap()] = C::new(v, 0.0);
        }
        assert_eq!(p.j.eval_complex(&pt), C::new(-2.0, 0.0));
        assert_eq!(p.entries[0][0].eval_complex(&pt).unwrap(), C::new(-2.0, 0.0));
    }

    #[test]
    fn exp_and_weierstrass_varieties() {
        let opts = Options::default();
        let r = standard_ring(1, &[]).unwrap();
        let exp = MappingBackend::new(Family::Exp { c: rat(1) }).unwrap();
        let spec = find_primitive_element(&[rel(1, 1, "z1_1 - x1", &r)], &exp, &opts).unwrap();
        assert_eq!(spec.v.to_string(), "theta - x1");
        assert_eq!(spec.expressions[0].text, "x1");
        let pij = build_pij(&r, 1).unwrap();
        assert_eq!(painleve_system(&spec, &pij).unwrap().lines, ["du = dx/x1"]);

        let wp = MappingBackend::new(Family::Weierstrass { g2: rat(4), g3: rat(0) }).unwrap();
        let spec = find_primitive_element(&[rel(1, 1, "z1_1^2 - 4*x1^3 + 4*x1", &r)], &wp, &opts).unwrap();
        assert_eq!(spec.v.to_string(), "theta^2 - 4*x1^3 + 4*x1");
        assert_eq!(spec.h, 2);
        assert_eq!(spec.expressions[0].text, "theta");
        assert!(spec.expressions[0].consistent);
        assert_eq!(painleve_system(&spec, &pij).unwrap().lines, ["du = dx/theta"]);
    }

    #[test]
    fn scaled_primitive_element() {
        let r = standard_ring(1, &[]).unwrap();
        let wp = MappingBackend::new(Family::Weierstrass { g2: rat(4), g3: rat(0) }).unwrap();
        let f = ExtField::new(&parse_poly("theta^2 - 16*x1^3 + 16*x1", &r).unwrap(), 0);
        let rels = [rel(1, 1, "z1_1^2 - 4*x1^3 + 4*x1", &r)];
        let recipe = Recipe::new(vec![]).with_alpha(vec![vec![2]]);
        let e = express_derivative(&f, &rels, &[vec![2]], 1, 1, &recipe, &wp, &Options::default())
            .unwrap()
            .unwrap();
        assert_eq!(e.text, "1/2*theta");
        assert!(e.consistent);
    }

    #[test]
    fn separable_pair() {
        let r = standard_ring(2, &[]).unwrap();
        let b = MappingBackend::new(Family::Case3).unwrap();
        let rels = [
            rel(1, 1, "z1_1 - x1", &r),
            rel(1, 2, "z1_2", &r),
            rel(2, 1, "z2_1", &r),
            rel(2, 2, "z2_2 - x2", &r),
        ];
        let spec = find_primitive_element(&rels, &b, &Options::default()).unwrap();
        assert_eq!(spec.v.to_string(), "theta - x1 - x2");
        let pij = build_pij(&r, 2).unwrap();
        assert_eq!(painleve_system(&spec, &pij).unwrap().lines, ["du1 = dx1/x1", "du2 = dx2/x2"]);
    }
}

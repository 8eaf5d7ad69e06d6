//! Rational form of the addition theorem for one variable, negation
//! relations and the group law on points of the variety.

use std::sync::Arc;

use aat_algebra::{rat, squarefree_part, AlgebraError, MPoly, RatFn, VarRing};
use num_complex::Complex64 as C;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::alphabet::{formula_ring, lam, y, THETA};
use crate::elimination::{eliminate_to, select_factor, AatSystem};
use crate::extfield::ExtField;
use crate::numeric::backend::{MappingBackend, OriginValue};
use crate::numeric::residual::{collect, residual_check, Bound, Recipe, ResidualError, ResidualReport};
use crate::numeric::sampling::{SampleBox, Sampler};
use crate::polyutil::{normalize, ratfn_sqrt};
use crate::problem::Options;
use crate::variety::VarietySpec;

pub const UNRESOLVED: &str = "unresolved: extension degree > 1 ansatz insufficient";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdditionError {
    #[error("{UNRESOLVED}")]
    Unresolved,
    #[error("symbolic resolution unsupported: {0}")]
    Unsupported(String),
    #[error("negation relation for component {k}: {reason}")]
    Negation { k: usize, reason: String },
    #[error("divisor degeneracy")]
    DivisorDegeneracy,
    #[error("{0}")]
    Point(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Residual(#[from] ResidualError),
    #[error("{0}")]
    Elimination(String),
}

pub type Result<T, E = AdditionError> = std::result::Result<T, E>;

#[derive(Debug, Clone)]
pub struct NegationRelation {
    pub d: Vec<MPoly>,
    pub e: Vec<MPoly>,
    /// How each `D_k` was obtained.
    pub modes: Vec<String>,
    pub residuals: Vec<ResidualReport>,
}

/// `D_k` from `G_k` at `u + v = 0`: the value `phi_k(0)` substituted for
/// `L_k`, or the leading coefficient in `L_k` when `phi_k(0)` is a pole.
/// `E_k` keeps only `y_k` among the `y` variables.
pub fn derive_negation(sys: &AatSystem, backend: &MappingBackend, opts: &Options) -> Result<NegationRelation> {
    let n = sys.n;
    let ring = &sys.ring;
    let origin = backend.origin_values();
    let mut d = Vec::with_capacity(n);
    let mut modes = Vec::with_capacity(n);
    for k in 1..=n {
        let g = &sys.polys[k - 1];
        let l = ring.var(&lam(k))?;
        let dk = match &origin[k - 1] {
            OriginValue::Finite(c) => {
                modes.push(format!("L{k} = {c}"));
                g.eval_partial(&[(l, c.clone())])
            }
            OriginValue::Infinite => {
                modes.push(format!("L{k} at infinity: leading coefficient"));
                g.lead_coeff_in(l)
            }
        };
        if dk.is_zero() || dk.is_constant() {
            return Err(AdditionError::Negation {
                k,
                reason: format!("D{k} is constant"),
            });
        }
        d.push(normalize(&dk));
    }
    let recipe = Recipe::new(backend.constants()).negated();
    let y_slots: Vec<usize> = (1..=n).map(|k| ring.var(&y(k))).collect::<Result<_, _>>()?;
    let mut e = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for k in 1..=n {
        let target = y_slots[k - 1];
        let others: Vec<usize> = y_slots.iter().copied().filter(|&s| s != target).collect();
        let polys = match eliminate_to(&d, target, &others) {
            Ok((p, _)) => p,
            Err(_) => {
                return Err(AdditionError::Negation {
                    k,
                    reason: "elimination of the other y variables collapsed".into(),
                })
            }
        };
        let id = format!("E{k}");
        let mut best: Option<(MPoly, ResidualReport)> = None;
        for p in polys.iter().filter(|p| p.contains(target)) {
            let sel = select_factor(&id, p, target, &recipe, backend, opts.samples, opts.tol, opts.seed)
                .map_err(|e| AdditionError::Elimination(e.to_string()))?;
            let better = match &best {
                None => true,
                Some((_, r)) => sel.residual.passed() && !r.passed(),
            };
            if better {
                best = Some((sel.poly, sel.residual));
            }
        }
        let (ek, rep) = best.ok_or_else(|| AdditionError::Negation {
            k,
            reason: format!("no relation involves y{k}"),
        })?;
        e.push(ek);
        residuals.push(rep);
    }
    Ok(NegationRelation { d, e, modes, residuals })
}

/// `R_0, R_1` over `(x0, x1; y0, y1)`.
#[derive(Debug, Clone)]
pub struct AdditionFormula {
    pub ring: Arc<VarRing>,
    pub r: Vec<RatFn>,
    pub degree: u32,
    pub excluded: String,
    pub branch: String,
    /// Total degrees of numerator and denominator of each `R_k`.
    pub degree_bounds: Vec<(u32, u32)>,
    pub residuals: Vec<ResidualReport>,
    pub alpha: i64,
}

impl AdditionFormula {
    pub fn verified(&self) -> bool {
        self.residuals.iter().all(|r| r.passed())
    }
}

/// `V` written over the formula ring on the `x` and on the `y` side.
fn sided_v(v: &MPoly, ring: &Arc<VarRing>) -> Result<(MPoly, MPoly)> {
    let vx = v.to_ring(ring, &[(THETA, "x0")])?;
    let vy = v.to_ring(ring, &[(THETA, "y0"), ("x1", "y1")])?;
    Ok((vx, vy))
}

struct BiField {
    fx: ExtField,
    fy: ExtField,
}

impl BiField {
    fn new(v: &MPoly, ring: &Arc<VarRing>) -> Result<Self> {
        let (vx, vy) = sided_v(v, ring)?;
        Ok(BiField {
            fx: ExtField::new(&vx, ring.var("x0")?),
            fy: ExtField::new(&vy, ring.var("y0")?),
        })
    }

    fn normal_form(&self, r: &RatFn) -> RatFn {
        self.fy.normal_form(&self.fx.normal_form(r))
    }
}

/// Square roots of the discriminant of the form `s x0 y0 + t`, with `s, t`
/// rational in `(x1, y1)`, modulo `V(x0; x1)` and `V(y0; y1)`.
pub fn discriminant_roots(g: &MPoly, v: &MPoly) -> Result<Vec<RatFn>> {
    let params: Vec<String> = g.ring().params().to_vec();
    let ring = formula_ring(1, &params)?;
    let l = g.ring().var(&lam(1))?;
    let c: Vec<RatFn> = g
        .coefficients(l)
        .iter()
        .map(|p| Ok(RatFn::from_poly(p.to_ring(&ring, &[])?)))
        .collect::<Result<_>>()?;
    if c.len() != 3 {
        return Err(AdditionError::Unsupported(format!("degree {} in L1", c.len().saturating_sub(1))));
    }
    let disc = &(&c[1] * &c[1]) - &(&c[0] * &c[2]).scale(&rat(4));
    let bi = BiField::new(v, &ring)?;
    let mut roots = Vec::new();
    if let Some(t) = ratfn_sqrt(&disc) {
        roots.push(t);
    }
    if bi.fx.degree() == 2 && bi.fy.degree() == 2 {
        // x0^2 = a x0 + b, y0^2 = c y0 + d
        let (mx, my) = (&bi.fx.modulus, &bi.fy.modulus);
        let (a, b) = (-&mx[1], -&mx[0]);
        let (cc, d) = (-&my[1], -&my[0]);
        let half = aat_algebra::rat_frac(1, 2);
        if (&a * &d).is_zero() && (&b * &cc).is_zero() {
            let ac = &a * &cc;
            let den = &(&b * &d) + &(&ac * &ac).scale(&aat_algebra::rat_frac(1, 4));
            if !den.is_zero() {
                if let Some(s) = ratfn_sqrt(&(&disc / &den)) {
                    let t = -&(&s * &ac).scale(&half);
                    let x0y0 = RatFn::from_poly(&MPoly::var(&ring, "x0")? * &MPoly::var(&ring, "y0")?);
                    roots.push(&(&s * &x0y0) + &t);
                }
            }
        }
    }
    if roots.is_empty() {
        return Err(AdditionError::Unresolved);
    }
    Ok(roots)
}

/// Candidate `R_1` values: the solved root for degree 1, both quadratic
/// roots per ansatz solution for degree 2.
pub fn candidate_roots(g: &MPoly, v: &MPoly) -> Result<Vec<RatFn>> {
    let params: Vec<String> = g.ring().params().to_vec();
    let ring = formula_ring(1, &params)?;
    let l = g.ring().var(&lam(1))?;
    let c: Vec<MPoly> = g
        .coefficients(l)
        .iter()
        .map(|p| p.to_ring(&ring, &[]))
        .collect::<Result<_, _>>()?;
    match c.len() {
        2 => Ok(vec![RatFn::new(-&c[0], c[1].clone())?]),
        3 => {
            let two_a = RatFn::from_poly(c[2].scale(&rat(2)));
            let minus_b = RatFn::from_poly(-&c[1]);
            let mut out = Vec::new();
            for r in discriminant_roots(g, v)? {
                out.push(&(&minus_b + &r) / &two_a);
                out.push(&(&minus_b - &r) / &two_a);
            }
            Ok(out)
        }
        d => Err(AdditionError::Unsupported(format!("degree {} in L1", d.saturating_sub(1)))),
    }
}

fn eval_formula(r: &RatFn, b: &Bound, recipe: &Recipe) -> Result<Option<C>, ResidualError> {
    let ring = r.ring();
    let mut pt = vec![C::zero(); ring.arity()];
    let mut scale: f64 = 1.0;
    for slot in r.numer().support().into_iter().chain(r.denom().support()) {
        let v = b.lookup(recipe, ring.name(slot))?;
        scale = scale.max(v.norm());
        pt[slot] = v;
    }
    let den = r.denom().eval_complex(&pt);
    if den.norm() < 1e-10 * scale.powi(r.denom().total_degree() as i32) {
        return Ok(None);
    }
    Ok(Some(r.numer().eval_complex(&pt) / den))
}

/// `|a - b| / (1 + |b|)`.
pub fn rel_err(a: C, b: C) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

/// `theta(u + v)` and `phi(u + v)` from the backend at one sample.
fn sum_values(backend: &MappingBackend, alpha: i64, b: &Bound) -> Option<(C, C)> {
    let s: Vec<C> = b.u.iter().zip(&b.v).map(|(p, q)| p + q).collect();
    let phi = backend.values(&s).ok()?;
    let jac = backend.jacobian(&s).ok()?;
    Some((jac[0][0] * alpha as f64, phi[0]))
}

fn agreement(
    id: &str,
    r: &RatFn,
    slot: usize,
    alpha: i64,
    backend: &MappingBackend,
    recipe: &Recipe,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<ResidualReport> {
    let mut sampler = Sampler::stream(seed, id, SampleBox::default());
    Ok(collect(id, samples, tol, &mut sampler, |s| {
        let Some(b) = Bound::draw(backend, recipe, s, true) else {
            return Ok(None);
        };
        let Some(sum) = sum_values(backend, alpha, &b) else {
            return Ok(None);
        };
        let want = if slot == 0 { sum.0 } else { sum.1 };
        Ok(eval_formula(r, &b, recipe)?.map(|got| rel_err(got, want)))
    })?)
}

/// Relative tolerance for formula/backend agreement.
pub const AGREEMENT_TOL: f64 = 1e-8;

/// Symbolic rational addition formula for `n = 1`.
pub fn resolve_addition(
    sys: &AatSystem,
    spec: &VarietySpec,
    backend: &MappingBackend,
    opts: &Options,
) -> Result<AdditionFormula> {
    if sys.n != 1 {
        return Err(AdditionError::Unsupported(format!("n = {}", sys.n)));
    }
    let g = &sys.polys[0];
    let degree = g.degree_in(sys.ring.var(&lam(1))?);
    if !(1..=2).contains(&degree) {
        return Err(AdditionError::Unsupported(format!("degree {degree} in L1")));
    }
    let alpha = spec.alpha[0][0];
    let recipe = Recipe::new(backend.constants()).with_alpha(spec.alpha.clone());
    let candidates = candidate_roots(g, &spec.v)?;
    let ring = candidates[0].ring().clone();
    let bi = BiField::new(&spec.v, &ring)?;

    // branch: the candidate closest to phi(u + v) at one sample
    let mut sampler = Sampler::stream(opts.seed, "branch", SampleBox::default());
    let mut chosen = None;
    for _ in 0..64 {
        let Some(b) = Bound::draw(backend, &recipe, &mut sampler, true) else {
            continue;
        };
        let Some((_, want)) = sum_values(backend, alpha, &b) else {
            continue;
        };
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in candidates.iter().enumerate() {
            if let Some(got) = eval_formula(c, &b, &recipe)? {
                let e = rel_err(got, want);
                if best.map_or(true, |(_, be)| e < be) {
                    best = Some((i, e));
                }
            }
        }
        if let Some((i, _)) = best {
            chosen = Some(i);
            break;
        }
    }
    let idx = chosen.ok_or_else(|| AdditionError::Point("no usable sample for the branch choice".into()))?;
    let r1 = bi.normal_form(&candidates[idx]);
    let branch = if candidates.len() == 1 {
        "unique root".to_string()
    } else {
        format!("root {} of {} fixed by one backend sample", idx + 1, candidates.len())
    };

    // R_0 = alpha d/du R_1, with x1' = z and x0' = -V_x z / V_theta
    let (vx, _) = sided_v(&spec.v, &ring)?;
    let e = spec
        .expression(1, 1)
        .ok_or_else(|| AdditionError::Point("missing derivative expression".into()))?
        .expr
        .to_ring(&ring, &[(THETA, "x0")])?;
    let (sx0, sx1) = (ring.var("x0")?, ring.var("x1")?);
    let theta_dot = &(&RatFn::from_poly(-&vx.diff(sx1)) * &e) / &RatFn::from_poly(vx.diff(sx0));
    let du = &(&r1.diff(sx0) * &theta_dot) + &(&r1.diff(sx1) * &e);
    let r0 = bi.normal_form(&du.scale(&rat(alpha)));

    let lead = g.lead_coeff_in(sys.ring.var(&lam(1))?);
    let excluded = if lead.is_constant() {
        "none".to_string()
    } else {
        format!("{} = 0", normalize(&squarefree_part(&lead)))
    };
    let mut residuals = Vec::new();
    for (slot, r) in [(0usize, &r0), (1, &r1)] {
        residuals.push(agreement(
            &format!("R{slot}"),
            r,
            slot,
            alpha,
            backend,
            &recipe,
            opts.samples,
            AGREEMENT_TOL,
            opts.seed,
        )?);
    }
    let degree_bounds = [&r0, &r1]
        .iter()
        .map(|r| (r.numer().total_degree(), r.denom().total_degree()))
        .collect();
    Ok(AdditionFormula {
        ring,
        r: vec![r0, r1],
        degree,
        excluded,
        branch,
        degree_bounds,
        residuals,
        alpha,
    })
}

/// `(theta; x_1..x_n)`, `None` marking infinity, with the parameter value
/// when known.
#[derive(Debug, Clone, PartialEq)]
pub struct VarietyPoint {
    pub theta: Option<C>,
    pub x: Vec<Option<C>>,
    pub u: Option<Vec<C>>,
}

impl VarietyPoint {
    pub fn is_finite(&self) -> bool {
        self.theta.is_some() && self.x.iter().all(|c| c.is_some())
    }

    /// Largest scaled coordinate difference; infinite markers match each
    /// other only.
    pub fn distance(&self, other: &VarietyPoint) -> f64 {
        let coord = |a: &Option<C>, b: &Option<C>| match (a, b) {
            (Some(a), Some(b)) => (a - b).norm() / (1.0 + a.norm().max(b.norm())),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        let mut d = coord(&self.theta, &other.theta);
        for (a, b) in self.x.iter().zip(&other.x) {
            d = d.max(coord(a, b));
        }
        d
    }
}

/// The point `(theta(u); Phi(u))`, with infinity markers at a pole.
pub fn point_at(backend: &MappingBackend, alpha: &[Vec<i64>], u: Vec<C>) -> VarietyPoint {
    let n = backend.n();
    match (backend.values(&u), backend.jacobian(&u)) {
        (Ok(phi), Ok(jac)) => {
            let mut t = C::zero();
            for k in 0..n {
                for p in 0..n {
                    t += jac[k][p] * alpha[k][p] as f64;
                }
            }
            VarietyPoint {
                theta: Some(t),
                x: phi.into_iter().map(Some).collect(),
                u: Some(u),
            }
        }
        _ => VarietyPoint {
            theta: None,
            x: vec![None; n],
            u: Some(u),
        },
    }
}

pub enum Via<'a> {
    Backend {
        backend: &'a MappingBackend,
        alpha: &'a [Vec<i64>],
    },
    Formula {
        formula: &'a AdditionFormula,
        params: &'a [(String, C)],
    },
}

fn params_of(p: &VarietyPoint) -> Result<&Vec<C>> {
    p.u.as_ref().ok_or_else(|| AdditionError::Point("backend mode needs parameter values".into()))
}

pub fn point_add(p1: &VarietyPoint, p2: &VarietyPoint, via: &Via) -> Result<VarietyPoint> {
    match via {
        Via::Backend { backend, alpha } => {
            let u: Vec<C> = params_of(p1)?.iter().zip(params_of(p2)?).map(|(a, b)| a + b).collect();
            Ok(point_at(backend, alpha, u))
        }
        Via::Formula { formula, params } => {
            if !p1.is_finite() || !p2.is_finite() || p1.x.len() != 1 {
                return Err(AdditionError::Point("formula mode needs finite points with n = 1".into()));
            }
            let ring = &formula.ring;
            let mut pt = vec![C::zero(); ring.arity()];
            let coords = [
                ("x0", p1.theta),
                ("x1", p1.x[0]),
                ("y0", p2.theta),
                ("y1", p2.x[0]),
            ];
            for (name, c) in coords {
                pt[ring.var(name)?] = c.expect("finite");
            }
            for (name, c) in params.iter() {
                if let Some(s) = ring.symbol(name) {
                    pt[s] = *c;
                }
            }
            let mut out = Vec::new();
            for r in &formula.r {
                let den = r.denom().eval_complex(&pt);
                let scale = 1.0 + pt.iter().map(|c| c.norm()).fold(0.0, f64::max);
                if den.norm() < 1e-12 * scale.powi(r.denom().total_degree() as i32) {
                    return Err(AdditionError::DivisorDegeneracy);
                }
                out.push(r.numer().eval_complex(&pt) / den);
            }
            Ok(VarietyPoint {
                theta: Some(out[0]),
                x: vec![Some(out[1])],
                u: None,
            })
        }
    }
}

pub fn point_sub(p1: &VarietyPoint, p2: &VarietyPoint, backend: &MappingBackend, alpha: &[Vec<i64>]) -> Result<VarietyPoint> {
    let u: Vec<C> = params_of(p1)?.iter().zip(params_of(p2)?).map(|(a, b)| a - b).collect();
    Ok(point_at(backend, alpha, u))
}

/// Scaled `|V(theta; x)|` at a finite point.
pub fn variety_residual(v: &MPoly, p: &VarietyPoint, params: &[(String, C)]) -> Option<f64> {
    let ring = v.ring();
    let mut pt = vec![C::zero(); ring.arity()];
    for slot in v.support() {
        let name = ring.name(slot);
        pt[slot] = if name == THETA {
            p.theta?
        } else if let Some(k) = name.strip_prefix('x').and_then(|k| k.parse::<usize>().ok()) {
            p.x.get(k.checked_sub(1)?).copied()??
        } else {
            params.iter().find(|(n, _)| n == name)?.1
        };
    }
    let (val, scale) = v.eval_with_scale(&pt);
    Some(val.norm() / (1.0 + scale))
}

/// Group axioms of the backend-mode law on random triples.
pub fn group_law_checks(
    backend: &MappingBackend,
    alpha: &[Vec<i64>],
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<Vec<ResidualReport>> {
    let n = backend.n();
    let via = Via::Backend { backend, alpha };
    let zero = point_at(backend, alpha, vec![C::zero(); n]);
    type Law<'a> = Box<dyn Fn(&[VarietyPoint; 3]) -> Result<f64> + 'a>;
    let laws: Vec<(&str, Law)> = vec![
        (
            "commutativity",
            Box::new(|p: &[VarietyPoint; 3]| Ok(point_add(&p[0], &p[1], &via)?.distance(&point_add(&p[1], &p[0], &via)?))),
        ),
        (
            "associativity",
            Box::new(|p: &[VarietyPoint; 3]| {
                let l = point_add(&point_add(&p[0], &p[1], &via)?, &p[2], &via)?;
                let r = point_add(&p[0], &point_add(&p[1], &p[2], &via)?, &via)?;
                Ok(l.distance(&r))
            }),
        ),
        (
            "identity",
            Box::new(|p: &[VarietyPoint; 3]| Ok(point_add(&p[0], &zero, &via)?.distance(&p[0]))),
        ),
        (
            "inverse",
            Box::new(|p: &[VarietyPoint; 3]| Ok(point_sub(&p[0], &p[0], backend, alpha)?.distance(&zero))),
        ),
        (
            "subtraction round trip",
            Box::new(|p: &[VarietyPoint; 3]| {
                let d = point_sub(&p[0], &p[1], backend, alpha)?;
                Ok(point_add(&d, &p[1], &via)?.distance(&p[0]))
            }),
        ),
    ];
    let mut out = Vec::new();
    for (name, law) in laws {
        let mut sampler = Sampler::stream(seed, name, SampleBox::default());
        let mut err = None;
        let rep = collect(name, samples, tol, &mut sampler, |s| {
            let pts: Vec<VarietyPoint> = (0..3).map(|_| point_at(backend, alpha, s.point(n))).collect();
            if pts.iter().any(|p| !p.is_finite()) {
                return Ok(None);
            }
            let pts: [VarietyPoint; 3] = pts.try_into().expect("three points");
            match law(&pts) {
                Ok(d) if d.is_finite() => Ok(Some(d)),
                Ok(_) => Ok(None),
                Err(e) => {
                    err = Some(e);
                    Ok(None)
                }
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        out.push(rep);
    }
    Ok(out)
}

/// Formula mode against backend mode, and closure of formula outputs on `V`.
pub fn formula_checks(
    formula: &AdditionFormula,
    spec: &VarietySpec,
    backend: &MappingBackend,
    samples: usize,
    seed: u64,
) -> Result<Vec<ResidualReport>> {
    let alpha = &spec.alpha;
    let params = backend.constants();
    let via_f = Via::Formula {
        formula,
        params: &params,
    };
    let via_b = Via::Backend { backend, alpha };
    let mut agree = Vec::new();
    let mut closure = Vec::new();
    let mut skipped = 0;
    let mut sampler = Sampler::stream(seed, "formula-vs-backend", SampleBox::default());
    while agree.len() < samples {
        if skipped > 10 * samples {
            return Err(ResidualError::PoleDominated {
                skipped,
                wanted: samples,
            }
            .into());
        }
        let p1 = point_at(backend, alpha, sampler.point(1));
        let p2 = point_at(backend, alpha, sampler.point(1));
        let b = point_add(&p1, &p2, &via_b)?;
        if !p1.is_finite() || !p2.is_finite() || !b.is_finite() {
            skipped += 1;
            continue;
        }
        let f = match point_add(&p1, &p2, &via_f) {
            Ok(f) => f,
            Err(AdditionError::DivisorDegeneracy) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let d = rel_err(f.theta.expect("finite"), b.theta.expect("finite"))
            .max(rel_err(f.x[0].expect("finite"), b.x[0].expect("finite")));
        agree.push(d);
        closure.push(variety_residual(&spec.v, &f, &params).unwrap_or(f64::INFINITY));
    }
    Ok(vec![
        ResidualReport::from_values("formula vs backend", agree, skipped, AGREEMENT_TOL),
        ResidualReport::from_values("closure on V", closure, skipped, AGREEMENT_TOL),
    ])
}

/// Residual of `E_k` on `(Phi(-u); Phi(u))`, drawn afresh.
pub fn negation_residuals(
    neg: &NegationRelation,
    backend: &MappingBackend,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<Vec<ResidualReport>> {
    let recipe = Recipe::new(backend.constants()).negated();
    let mut out = Vec::new();
    for (k, e) in neg.e.iter().enumerate() {
        let id = format!("negation E{}", k + 1);
        let mut sampler = Sampler::stream(seed, &id, SampleBox::default());
        out.push(residual_check(&id, e, &recipe, backend, samples, tol, &mut sampler)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub pairs: usize,
    /// Largest distance of `u2 - u1` from an integer combination of the
    /// supplied periods.
    pub lattice_defect: f64,
    pub shift_residual: ResidualReport,
    pub verdict: String,
}

/// Newton solve of `phi(u) = target` from `start`, for `n = 1`.
fn newton_1d(backend: &MappingBackend, target: C, start: C) -> Option<C> {
    let mut u = start;
    for _ in 0..80 {
        let f = backend.values(&[u]).ok()?[0] - target;
        let d = backend.jacobian(&[u]).ok()?[0][0];
        if d.norm() < 1e-300 {
            return None;
        }
        let mut step = f / d;
        if step.norm() > 0.5 {
            step *= 0.5 / step.norm();
        }
        u -= step;
        if step.norm() < 1e-15 * (1.0 + u.norm()) {
            return Some(u);
        }
    }
    let f = backend.values(&[u]).ok()?[0] - target;
    (f.norm() < 1e-10 * (1.0 + target.norm())).then_some(u)
}

/// Integer coordinates of `d` in the span of one or two complex periods;
/// returns the distance to the nearest lattice vector.
pub fn lattice_defect(d: C, periods: &[C]) -> f64 {
    match periods {
        [] => d.norm(),
        [p] => {
            let m = (d / p).re.round();
            (d - p * m).norm()
        }
        [p, q, ..] => {
            // real 2x2 solve d = a p + b q
            let det = p.re * q.im - p.im * q.re;
            if det.abs() < 1e-300 {
                return d.norm();
            }
            let a = ((d.re * q.im - d.im * q.re) / det).round();
            let b = ((p.re * d.im - p.im * d.re) / det).round();
            (d - p * a - q * b).norm()
        }
    }
}

/// Two pre-images with the same `(theta, x)` differ by a period, and the
/// mapping agrees after any common shift.
pub fn uniqueness_witness(
    backend: &MappingBackend,
    alpha: &[Vec<i64>],
    periods: &[C],
    pairs: usize,
    tol: f64,
    seed: u64,
) -> Result<WitnessReport> {
    if backend.n() != 1 {
        return Err(AdditionError::Unsupported(format!("n = {}", backend.n())));
    }
    let mut sampler = Sampler::stream(seed, "uniqueness", SampleBox::default());
    let mut far = Sampler::stream(seed, "uniqueness-start", SampleBox { half_width: 4.0 });
    let mut defect: f64 = 0.0;
    let mut found = 0;
    let mut shift = Vec::new();
    let mut attempts = 0;
    while found < pairs && attempts < 50 * pairs {
        attempts += 1;
        let p1 = point_at(backend, alpha, sampler.point(1));
        let (Some(t1), Some(x1)) = (p1.theta, p1.x[0]) else {
            continue;
        };
        let u1 = p1.u.as_ref().expect("backend point")[0];
        let Some(mut u2) = newton_1d(backend, x1, far.complex()) else {
            continue;
        };
        let mut p2 = point_at(backend, alpha, vec![u2]);
        if let Some(t2) = p2.theta {
            if (t2 + t1).norm() < (t2 - t1).norm() {
                u2 = -u2;
                p2 = point_at(backend, alpha, vec![u2]);
            }
        }
        if p2.distance(&p1) > 1e-9 || (u2 - u1).norm() < 1e-6 {
            continue;
        }
        found += 1;
        defect = defect.max(lattice_defect(u2 - u1, periods));
        for _ in 0..5 {
            let b = sampler.complex();
            let (Ok(a), Ok(c)) = (backend.values(&[u1 + b]), backend.values(&[u2 + b])) else {
                continue;
            };
            shift.push(rel_err(a[0], c[0]));
        }
    }
    let shift_residual = ResidualReport::from_values("phi(u1 + b) - phi(u2 + b)", shift, 0, tol);
    // an injective mapping has no distinct pre-images to compare
    let vacuous = periods.is_empty() && found == 0;
    let ok = vacuous || (found == pairs && defect < 1e-6 && shift_residual.passed());
    Ok(WitnessReport {
        pairs: found,
        lattice_defect: defect,
        shift_residual,
        verdict: match (ok, vacuous) {
            (true, true) => "pass (no distinct pre-images)",
            (true, false) => "pass",
            _ => "fail",
        }
        .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::standard_ring;
    use crate::family::Family;
    use crate::variety::find_primitive_element;
    use crate::elimination::FirstOrderRelation;
    use aat_algebra::parse_poly;

    fn setup(family: Family, g: &str, p: &str) -> (AatSystem, VarietySpec, MappingBackend) {
        let r = standard_ring(1, &[]).unwrap();
        let sys = AatSystem::new(vec![normalize(&parse_poly(g, &r).unwrap())]).unwrap();
        let backend = MappingBackend::new(family).unwrap();
        let rel = FirstOrderRelation {
            k: 1,
            p: 1,
            poly: parse_poly(p, &r).unwrap(),
            source: "test".into(),
            residual: None,
        };
        let spec = find_primitive_element(&[rel], &backend, &Options::default()).unwrap();
        (sys, spec, backend)
    }

    const WP_G: &str = "L1^2*(x1 - y1)^2 - 2*L1*(x1^2*y1 + x1*y1^2 - x1 - y1) + (x1*y1 + 1)^2";

    #[test]
    fn exp_formula_and_negation() {
        let (sys, spec, b) = setup(Family::Exp { c: rat(1) }, "L1 - x1*y1", "z1_1 - x1");
        let f = resolve_addition(&sys, &spec, &b, &Options::default()).unwrap();
        assert_eq!(f.r[1].to_string(), "x1*y1");
        assert_eq!(f.r[0].to_string(), "x1*y1");
        assert!(f.verified());
        let neg = derive_negation(&sys, &b, &Options::default()).unwrap();
        assert_eq!(neg.d[0].to_string(), "x1*y1 - 1");
        assert_eq!(neg.e[0].to_string(), "x1*y1 - 1");
        assert!(neg.residuals[0].passed());
        // (x=2) + (x=3) -> x=6
        let via = Via::Backend {
            backend: &b,
            alpha: &spec.alpha,
        };
        let p2 = point_at(&b, &spec.alpha, vec![C::new(2f64.ln(), 0.0)]);
        let p3 = point_at(&b, &spec.alpha, vec![C::new(3f64.ln(), 0.0)]);
        let s = point_add(&p2, &p3, &via).unwrap();
        assert!((s.x[0].unwrap() - C::new(6.0, 0.0)).norm() < 1e-12);
        let back = point_sub(&s, &p3, &b, &spec.alpha).unwrap();
        assert!((back.x[0].unwrap() - C::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn weierstrass_formula_matches_classical() {
        let fam = Family::Weierstrass { g2: rat(4), g3: rat(0) };
        let (sys, spec, b) = setup(fam, WP_G, "z1_1^2 - 4*x1^3 + 4*x1");
        let f = resolve_addition(&sys, &spec, &b, &Options::default()).unwrap();
        assert!(f.verified(), "{:?}", f.residuals);
        assert_eq!(f.excluded, "x1 - y1 = 0");
        // oracle: (1/4) ((x0 - y0)/(x1 - y1))^2 - x1 - y1
        let classical = aat_algebra::parse_ratfn("(x0 - y0)^2/(4*(x1 - y1)^2) - x1 - y1", &f.ring).unwrap();
        let bi = BiField::new(&spec.v, &f.ring).unwrap();
        let diff = bi.normal_form(&(&classical - &f.r[1]));
        assert!(diff.is_zero(), "{diff}");
        // chain rule: R_0 is wp'(u + v)
        assert!(f.residuals[0].passed());
        let checks = formula_checks(&f, &spec, &b, 100, 7).unwrap();
        assert!(checks.iter().all(|r| r.passed()), "{checks:?}");
        let laws = group_law_checks(&b, &spec.alpha, 50, 1e-8, 3).unwrap();
        assert!(laws.iter().all(|r| r.passed()), "{laws:?}");
        let neg = derive_negation(&sys, &b, &Options::default()).unwrap();
        assert_eq!(neg.e[0].to_string(), "x1 - y1");
        let periods = b.reference_periods().into_iter().map(|p| p[0]).collect::<Vec<_>>();
        let w = uniqueness_witness(&b, &spec.alpha, &periods, 5, 1e-8, 1).unwrap();
        assert_eq!(w.verdict, "pass", "{w:?}");
    }

    #[test]
    fn non_square_discriminant_is_unresolved() {
        let r = standard_ring(1, &[]).unwrap();
        let g = parse_poly("L1^2 - x1 - y1", &r).unwrap();
        let v = parse_poly("theta^2 - 4*x1^3 + 4*x1", &r).unwrap();
        let err = candidate_roots(&g, &v).unwrap_err();
        assert_eq!(err.to_string(), UNRESOLVED);
    }

    #[test]
    fn lattice_coordinates() {
        let p = [C::new(2.0, 0.0), C::new(0.0, 2.0)];
        assert!(lattice_defect(C::new(4.0, -2.0), &p) < 1e-12);
        assert!(lattice_defect(C::new(1.0, 0.0), &p) > 0.5);
    }
}

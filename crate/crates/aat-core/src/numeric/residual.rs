//! Residual statistics of symbolic relations evaluated on backend samples.

use aat_algebra::MPoly;
use num_complex::Complex64 as C;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use super::backend::{Jacobian, MappingBackend};
use super::sampling::Sampler;

/// Distance from the pole set below which a sample is redrawn.
pub const POLE_RADIUS: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResidualError {
    #[error("pole-dominated sampling region: {skipped} samples skipped for {wanted} requested")]
    PoleDominated { skipped: usize, wanted: usize },
    #[error("no numeric binding for `{0}`")]
    Unbound(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub relation: String,
    pub count: usize,
    pub skipped: usize,
    pub max: f64,
    pub mean: f64,
    pub p95: f64,
    pub tol: f64,
    pub verdict: String,
}

impl ResidualReport {
    pub fn from_values(relation: &str, mut values: Vec<f64>, skipped: usize, tol: f64) -> Self {
        values.sort_by(|a, b| a.total_cmp(b));
        let count = values.len();
        let (max, mean, p95) = if count == 0 {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            let idx = ((0.95 * count as f64).ceil() as usize).clamp(1, count) - 1;
            (
                values[count - 1],
                values.iter().sum::<f64>() / count as f64,
                values[idx],
            )
        };
        let pass = count > 0 && p95 < tol;
        ResidualReport {
            relation: relation.to_string(),
            count,
            skipped,
            max,
            mean,
            p95,
            tol,
            verdict: if pass { "pass" } else { "fail" }.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

/// Draws samples until `wanted` residuals are collected. `f` returns `None`
/// for a sample that must be redrawn (pole, excluded divisor).
pub fn collect<F>(
    relation: &str,
    wanted: usize,
    tol: f64,
    sampler: &mut Sampler,
    mut f: F,
) -> Result<ResidualReport, ResidualError>
where
    F: FnMut(&mut Sampler) -> Result<Option<f64>, ResidualError>,
{
    let mut values = Vec::with_capacity(wanted);
    let mut skipped = 0;
    while values.len() < wanted {
        match f(sampler)? {
            Some(r) => values.push(r),
            None => {
                skipped += 1;
                if skipped > 10 * wanted.max(1) {
                    return Err(ResidualError::PoleDominated { skipped, wanted });
                }
            }
        }
    }
    Ok(ResidualReport::from_values(relation, values, skipped, tol))
}

/// How the `v` side of a sample is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VSide {
    Independent,
    /// `v = -u`, for negation relations.
    Negated,
}

/// Binds every alphabet symbol to a backend quantity:
/// `x_k -> phi_k(u)`, `y_k -> phi_k(v)`, `L_k -> phi_k(u+v)`,
/// `zk_p`, `wk_p` to first derivatives at `u`, `v`, `theta` and the `x0`/`y0`
/// slots to the primitive element at `u`/`v`, parameters to fixed values.
#[derive(Debug, Clone)]
pub struct Recipe {
    pub alpha: Option<Vec<Vec<i64>>>,
    pub v_side: VSide,
    pub params: Vec<(String, C)>,
}

impl Recipe {
    pub fn new(params: Vec<(String, C)>) -> Self {
        Recipe {
            alpha: None,
            v_side: VSide::Independent,
            params,
        }
    }

    pub fn with_alpha(mut self, alpha: Vec<Vec<i64>>) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn negated(mut self) -> Self {
        self.v_side = VSide::Negated;
        self
    }
}

/// Backend quantities at one sample.
#[derive(Debug, Clone)]
pub struct Bound {
    pub u: Vec<C>,
    pub v: Vec<C>,
    pub phi_u: Vec<C>,
    pub jac_u: Jacobian,
    pub phi_v: Vec<C>,
    pub jac_v: Jacobian,
    pub phi_sum: Option<Vec<C>>,
}

fn theta_of(alpha: &[Vec<i64>], jac: &Jacobian) -> C {
    let mut t = C::zero();
    for (k, row) in alpha.iter().enumerate() {
        for (p, a) in row.iter().enumerate() {
            t += jac[k][p] * *a as f64;
        }
    }
    t
}

fn index(s: &str) -> Option<usize> {
    s.parse().ok()
}

impl Bound {
    /// Evaluates the backend at `(u, v)`; `None` near a pole.
    pub fn at(backend: &MappingBackend, u: Vec<C>, v: Vec<C>, need_sum: bool) -> Option<Bound> {
        if backend.near_pole(&u, POLE_RADIUS) || backend.near_pole(&v, POLE_RADIUS) {
            return None;
        }
        let phi_sum = if need_sum {
            let s: Vec<C> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
            if backend.near_pole(&s, POLE_RADIUS) {
                return None;
            }
            Some(backend.values(&s).ok()?)
        } else {
            None
        };
        Some(Bound {
            phi_u: backend.values(&u).ok()?,
            jac_u: backend.jacobian(&u).ok()?,
            phi_v: backend.values(&v).ok()?,
            jac_v: backend.jacobian(&v).ok()?,
            u,
            v,
            phi_sum,
        })
    }

    pub fn draw(backend: &MappingBackend, recipe: &Recipe, sampler: &mut Sampler, need_sum: bool) -> Option<Bound> {
        let n = backend.n();
        let u = sampler.point(n);
        let v = match recipe.v_side {
            VSide::Independent => sampler.point(n),
            VSide::Negated => u.iter().map(|z| -z).collect(),
        };
        Bound::at(backend, u, v, need_sum)
    }

    /// Numeric value of an alphabet symbol or parameter.
    pub fn lookup(&self, recipe: &Recipe, name: &str) -> Result<C, ResidualError> {
        let unbound = || ResidualError::Unbound(name.to_string());
        let n = self.phi_u.len();
        let theta = |jac: &Jacobian| recipe.alpha.as_ref().map(|a| theta_of(a, jac)).ok_or_else(unbound);
        if name == "theta" {
            return theta(&self.jac_u);
        }
        if let Some((k, p)) = name.strip_prefix('z').and_then(|r| r.split_once('_')) {
            if let (Some(k), Some(p)) = (index(k), index(p)) {
                if (1..=n).contains(&k) && (1..=n).contains(&p) {
                    return Ok(self.jac_u[k - 1][p - 1]);
                }
            }
        }
        if let Some((k, p)) = name.strip_prefix('w').and_then(|r| r.split_once('_')) {
            if let (Some(k), Some(p)) = (index(k), index(p)) {
                if (1..=n).contains(&k) && (1..=n).contains(&p) {
                    return Ok(self.jac_v[k - 1][p - 1]);
                }
            }
        }
        let side = |rest: &str, phi: &[C], jac: &Jacobian| -> Option<Result<C, ResidualError>> {
            let k = index(rest)?;
            match k {
                0 => Some(theta(jac)),
                k if k <= n => Some(Ok(phi[k - 1])),
                _ => None,
            }
        };
        if let Some(rest) = name.strip_prefix('x') {
            if let Some(r) = side(rest, &self.phi_u, &self.jac_u) {
                return r;
            }
        }
        if let Some(rest) = name.strip_prefix('y') {
            if let Some(r) = side(rest, &self.phi_v, &self.jac_v) {
                return r;
            }
        }
        if let Some(k) = name.strip_prefix('L').and_then(index) {
            if (1..=n).contains(&k) {
                return self.phi_sum.as_ref().map(|s| s[k - 1]).ok_or_else(unbound);
            }
        }
        recipe
            .params
            .iter()
            .find(|(p, _)| p == name)
            .map(|(_, c)| *c)
            .ok_or_else(unbound)
    }

    /// `(value, largest term magnitude)` of `rel` at this sample.
    pub fn eval(&self, recipe: &Recipe, rel: &MPoly) -> Result<(C, f64), ResidualError> {
        let ring = rel.ring();
        let mut point = vec![C::zero(); ring.arity()];
        for slot in rel.support() {
            point[slot] = self.lookup(recipe, ring.name(slot))?;
        }
        Ok(rel.eval_with_scale(&point))
    }
}

/// Scaled residual `|r| / (1 + max |term|)`.
pub fn scaled(value: C, scale: f64) -> f64 {
    value.norm() / (1.0 + scale)
}

pub fn needs_sum(rel: &MPoly) -> bool {
    rel.variables().iter().any(|v| v.starts_with('L'))
}

/// Residual statistics of a polynomial relation under a binding recipe.
pub fn residual_check(
    relation_id: &str,
    rel: &MPoly,
    recipe: &Recipe,
    backend: &MappingBackend,
    samples: usize,
    tol: f64,
    sampler: &mut Sampler,
) -> Result<ResidualReport, ResidualError> {
    let need_sum = needs_sum(rel);
    collect(relation_id, samples, tol, sampler, |s| {
        let Some(b) = Bound::draw(backend, recipe, s, need_sum) else {
            return Ok(None);
        };
        let (val, scale) = b.eval(recipe, rel)?;
        if !val.is_finite() {
            return Ok(None);
        }
        Ok(Some(scaled(val, scale)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::standard_ring;
    use crate::family::Family;
    use crate::numeric::sampling::SampleBox;
    use aat_algebra::{parse_poly, rat};

    fn wp() -> MappingBackend {
        MappingBackend::new(Family::Weierstrass { g2: rat(4), g3: rat(0) }).unwrap()
    }

    #[test]
    fn percentile_and_verdict() {
        let vals: Vec<f64> = (1..=100).map(|i| i as f64 * 1e-12).collect();
        let r = ResidualReport::from_values("t", vals, 0, 1e-9);
        assert_eq!(r.p95, 95e-12);
        assert!(r.passed());
        let mut vals = vec![0.0; 94];
        vals.extend([1.0; 6]);
        assert!(!ResidualReport::from_values("t", vals, 0, 1e-9).passed());
    }

    #[test]
    fn exp_functional_equation() {
        let b = MappingBackend::new(Family::Exp { c: rat(1) }).unwrap();
        let ring = standard_ring(1, &[]).unwrap();
        let g = parse_poly("L1 - x1*y1", &ring).unwrap();
        let mut s = Sampler::new(1, SampleBox::default());
        let r = residual_check("G1", &g, &Recipe::new(vec![]), &b, 100, 1e-12, &mut s).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn weierstrass_variety_and_negative_control() {
        let b = wp();
        let ring = standard_ring(1, &[]).unwrap();
        let recipe = Recipe::new(vec![]).with_alpha(vec![vec![1]]);
        let v = parse_poly("theta^2 - 4*x1^3 + 4*x1", &ring).unwrap();
        let bad = parse_poly("theta^2 - 4*x1^3 - 4*x1", &ring).unwrap();
        let mut s = Sampler::new(3, SampleBox::default());
        assert!(residual_check("V", &v, &recipe, &b, 100, 1e-9, &mut s).unwrap().passed());
        assert!(!residual_check("V", &bad, &recipe, &b, 100, 1e-9, &mut s).unwrap().passed());
    }

    #[test]
    fn unbound_symbol_reported() {
        let b = wp();
        let ring = standard_ring(1, &[]).unwrap();
        let v = parse_poly("theta - x1", &ring).unwrap();
        let mut s = Sampler::new(3, SampleBox::default());
        let err = residual_check("V", &v, &Recipe::new(vec![]), &b, 5, 1e-9, &mut s).unwrap_err();
        assert_eq!(err, ResidualError::Unbound("theta".into()));
    }
}

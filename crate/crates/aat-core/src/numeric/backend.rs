//! Numeric evaluation of the concrete mappings: values, Jacobians and
//! Hessians, pole bookkeeping and exactly known special points.

use aat_algebra::{rat, reconstruct_rational, to_f64, Rat};
use num_complex::Complex64 as C;
use num_traits::Zero;
use thiserror::Error;

use crate::family::Family;
use crate::numeric::weierstrass::{Lattice, LatticeError};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("pole of the mapping")]
pub struct Pole;

/// A parameter point where the mapping and its Jacobian take exact rational values.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPoint {
    pub label: String,
    pub u: Vec<C>,
    pub values: Vec<Rat>,
    /// `jacobian[k][p]` is the derivative of component `k` in `u_p`.
    pub jacobian: Vec<Vec<Rat>>,
}

/// Exact knowledge of a component at the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum OriginValue {
    Finite(Rat),
    Infinite,
}

pub type Jacobian = Vec<Vec<C>>;
pub type Hessian = Vec<Vec<Vec<C>>>;

#[derive(Debug, Clone)]
pub struct MappingBackend {
    family: Family,
    lattice: Option<Lattice>,
}

fn cf(r: &Rat) -> C {
    C::new(to_f64(r), 0.0)
}

fn zeros(n: usize) -> Jacobian {
    vec![vec![C::zero(); n]; n]
}

fn zeros3(n: usize) -> Hessian {
    vec![zeros(n); n]
}

impl MappingBackend {
    pub fn new(family: Family) -> Result<Self, LatticeError> {
        let lattice = match family.invariants() {
            Some((g2, g3)) => Some(Lattice::real(to_f64(g2), to_f64(g3))?),
            None => None,
        };
        if let (Family::Case5 { a, .. }, Some(l)) = (&family, &lattice) {
            if l.reduce(cf(a)).0.norm() < 1e-6 {
                return Err(LatticeError::ShiftOnLattice);
            }
        }
        Ok(MappingBackend { family, lattice })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn n(&self) -> usize {
        self.family.n()
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    fn lat(&self) -> &Lattice {
        self.lattice.as_ref().expect("family has a lattice")
    }

    fn wp(&self, u: C) -> Result<C, Pole> {
        self.lat().wp(u).map_err(|_| Pole)
    }

    fn wp1(&self, u: C) -> Result<C, Pole> {
        self.lat().wp_prime(u).map_err(|_| Pole)
    }

    fn wp2(&self, u: C) -> Result<C, Pole> {
        self.lat().wp_second(u).map_err(|_| Pole)
    }

    fn zeta(&self, u: C) -> Result<C, Pole> {
        self.lat().zeta(u).map_err(|_| Pole)
    }

    fn case5_ratio(&self, a: &Rat, u1: C) -> Result<C, Pole> {
        let s = self.lat().sigma(u1);
        if s.norm() < 1e-14 {
            return Err(Pole);
        }
        Ok(self.lat().sigma(u1 - cf(a)) / s)
    }

    /// `Phi(u)`.
    pub fn values(&self, u: &[C]) -> Result<Vec<C>, Pole> {
        Ok(match &self.family {
            Family::Exp { c } => vec![(cf(c) * u[0]).exp()],
            Family::Rational { a, b } => vec![cf(a) * u[0] + cf(b)],
            Family::Weierstrass { .. } => vec![self.wp(u[0])?],
            Family::Case1 => vec![u[0], u[1]],
            Family::Case2 => vec![u[0], u[1].exp()],
            Family::Case3 => vec![u[0].exp(), u[1].exp()],
            Family::Case4 { eps, .. } => {
                let second = if *eps == 0 {
                    u[1]
                } else {
                    u[1] - self.zeta(u[0])?
                };
                vec![self.wp(u[0])?, second]
            }
            Family::Case5 { a, .. } => vec![self.wp(u[0])?, u[1].exp() * self.case5_ratio(a, u[0])?],
        })
    }

    /// `jac[k][p] = d phi_k / d u_p`.
    pub fn jacobian(&self, u: &[C]) -> Result<Jacobian, Pole> {
        let n = self.n();
        let mut j = zeros(n);
        match &self.family {
            Family::Exp { c } => j[0][0] = cf(c) * (cf(c) * u[0]).exp(),
            Family::Rational { a, .. } => j[0][0] = cf(a),
            Family::Weierstrass { .. } => j[0][0] = self.wp1(u[0])?,
            Family::Case1 => {
                j[0][0] = C::new(1.0, 0.0);
                j[1][1] = C::new(1.0, 0.0);
            }
            Family::Case2 => {
                j[0][0] = C::new(1.0, 0.0);
                j[1][1] = u[1].exp();
            }
            Family::Case3 => {
                j[0][0] = u[0].exp();
                j[1][1] = u[1].exp();
            }
            Family::Case4 { eps, .. } => {
                j[0][0] = self.wp1(u[0])?;
                j[1][0] = if *eps == 0 { C::zero() } else { self.wp(u[0])? };
                j[1][1] = C::new(1.0, 0.0);
            }
            Family::Case5 { a, .. } => {
                j[0][0] = self.wp1(u[0])?;
                let f = u[1].exp() * self.case5_ratio(a, u[0])?;
                let q = self.zeta(u[0] - cf(a))? - self.zeta(u[0])?;
                j[1][0] = f * q;
                j[1][1] = f;
            }
        }
        Ok(j)
    }

    /// `hess[k][p][q] = d^2 phi_k / d u_p d u_q`, from closed forms.
    pub fn hessian(&self, u: &[C]) -> Result<Hessian, Pole> {
        let n = self.n();
        let mut h = zeros3(n);
        match &self.family {
            Family::Exp { c } => h[0][0][0] = cf(c) * cf(c) * (cf(c) * u[0]).exp(),
            Family::Rational { .. } | Family::Case1 => {}
            Family::Weierstrass { .. } => h[0][0][0] = self.wp2(u[0])?,
            Family::Case2 => h[1][1][1] = u[1].exp(),
            Family::Case3 => {
                h[0][0][0] = u[0].exp();
                h[1][1][1] = u[1].exp();
            }
            Family::Case4 { eps, .. } => {
                h[0][0][0] = self.wp2(u[0])?;
                if *eps == 1 {
                    h[1][0][0] = self.wp1(u[0])?;
                }
            }
            Family::Case5 { a, .. } => {
                h[0][0][0] = self.wp2(u[0])?;
                let f = u[1].exp() * self.case5_ratio(a, u[0])?;
                let q = self.zeta(u[0] - cf(a))? - self.zeta(u[0])?;
                let dq = self.wp(u[0])? - self.wp(u[0] - cf(a))?;
                h[1][0][0] = f * (q * q + dq);
                h[1][0][1] = f * q;
                h[1][1][0] = f * q;
                h[1][1][1] = f;
            }
        }
        Ok(h)
    }

    /// True when `u` lies within `radius` of the pole set (or of a point
    /// where the closed forms lose accuracy).
    pub fn near_pole(&self, u: &[C], radius: f64) -> bool {
        let Some(lat) = &self.lattice else {
            return false;
        };
        let close = |t: C| lat.reduce(t).0.norm() < radius;
        match &self.family {
            Family::Case5 { a, .. } => close(u[0]) || close(u[0] - cf(a)),
            _ => close(u[0]),
        }
    }

    /// Candidate points for exact specialization, in preference order.
    pub fn exact_points(&self) -> Vec<ExactPoint> {
        let one = rat(1);
        let zero = rat(0);
        let origin = |values: Vec<Rat>, jac: Vec<Vec<Rat>>| ExactPoint {
            label: "origin".into(),
            u: vec![C::zero(); values.len()],
            values,
            jacobian: jac,
        };
        match &self.family {
            Family::Exp { c } => vec![origin(vec![one], vec![vec![c.clone()]])],
            Family::Rational { a, b } => vec![origin(vec![b.clone()], vec![vec![a.clone()]])],
            Family::Case1 => vec![origin(
                vec![zero.clone(), zero.clone()],
                vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]],
            )],
            Family::Case2 => vec![origin(
                vec![zero.clone(), one.clone()],
                vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]],
            )],
            Family::Case3 => vec![origin(
                vec![one.clone(), one.clone()],
                vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]],
            )],
            Family::Weierstrass { .. } => self
                .half_period_points()
                .into_iter()
                .map(|(label, om, e)| ExactPoint {
                    label,
                    u: vec![om],
                    values: vec![e],
                    jacobian: vec![vec![zero.clone()]],
                })
                .collect(),
            Family::Case4 { eps: 0, .. } => self
                .half_period_points()
                .into_iter()
                .map(|(label, om, e)| ExactPoint {
                    label,
                    u: vec![om, C::zero()],
                    values: vec![e, zero.clone()],
                    jacobian: vec![vec![zero.clone(), zero.clone()], vec![zero.clone(), one.clone()]],
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Half-periods at which `wp` takes a rational value.
    fn half_period_points(&self) -> Vec<(String, C, Rat)> {
        let Some((g2, g3)) = self.family.invariants() else {
            return Vec::new();
        };
        let lat = self.lat();
        let names = ["omega1", "omega2", "omega1+omega2"];
        let points = [lat.omega1, lat.omega2, lat.omega1 + lat.omega2];
        let mut out = Vec::new();
        for i in 0..3 {
            let e = lat.e[i];
            if e.im.abs() > 1e-9 {
                continue;
            }
            let Some(r) = reconstruct_rational(e.re, 1_000_000, 1e-9) else {
                continue;
            };
            // exact check: 4 r^3 - g2 r - g3 == 0
            let val = rat(4) * &r * &r * &r - g2 * &r - g3;
            if val == rat(0) {
                out.push((format!("half-period {}", names[i]), points[i], r));
            }
        }
        out
    }

    /// Exact value of each component at `u = 0`.
    pub fn origin_values(&self) -> Vec<OriginValue> {
        use OriginValue::*;
        match &self.family {
            Family::Exp { .. } => vec![Finite(rat(1))],
            Family::Rational { b, .. } => vec![Finite(b.clone())],
            Family::Weierstrass { .. } => vec![Infinite],
            Family::Case1 => vec![Finite(rat(0)), Finite(rat(0))],
            Family::Case2 => vec![Finite(rat(0)), Finite(rat(1))],
            Family::Case3 => vec![Finite(rat(1)), Finite(rat(1))],
            Family::Case4 { eps: 0, .. } => vec![Infinite, Finite(rat(0))],
            Family::Case4 { .. } | Family::Case5 { .. } => vec![Infinite, Infinite],
        }
    }

    /// Transcendental constants of the family, bound numerically wherever a
    /// relation mentions them by name.
    pub fn constants(&self) -> Vec<(String, C)> {
        match &self.family {
            Family::Case5 { a, .. } => {
                let a = cf(a);
                let l = self.lat();
                vec![
                    ("wp_a".into(), l.wp(a).expect("shift off the lattice")),
                    ("wpd_a".into(), l.wp_prime(a).expect("shift off the lattice")),
                    ("zeta_a".into(), l.zeta(a).expect("shift off the lattice")),
                ]
            }
            _ => Vec::new(),
        }
    }

    /// Reference generators of the period group, when known in closed form.
    pub fn reference_periods(&self) -> Vec<Vec<C>> {
        let two_pi_i = C::new(0.0, 2.0 * std::f64::consts::PI);
        match &self.family {
            Family::Exp { c } => vec![vec![two_pi_i / cf(c)]],
            Family::Rational { .. } | Family::Case1 => Vec::new(),
            Family::Weierstrass { .. } => {
                let l = self.lat();
                vec![vec![2.0 * l.omega1], vec![2.0 * l.omega2]]
            }
            Family::Case2 => vec![vec![C::zero(), two_pi_i]],
            Family::Case3 => vec![vec![two_pi_i, C::zero()], vec![C::zero(), two_pi_i]],
            Family::Case4 { eps, .. } => {
                let l = self.lat();
                let e = *eps as f64;
                vec![
                    vec![2.0 * l.omega1, 2.0 * l.eta1 * e],
                    vec![2.0 * l.omega2, 2.0 * l.eta2 * e],
                ]
            }
            Family::Case5 { .. } => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn backend(id: &str) -> MappingBackend {
        MappingBackend::new(Family::from_id(id, &BTreeMap::new()).unwrap().unwrap()).unwrap()
    }

    fn wp_backend() -> MappingBackend {
        MappingBackend::new(Family::Weierstrass { g2: rat(4), g3: rat(0) }).unwrap()
    }

    #[test]
    fn exp_values() {
        let b = backend("exp");
        let u = [C::new(0.5, 0.0)];
        assert!((b.values(&u).unwrap()[0] - 0.5f64.exp()).norm() < 1e-15);
        assert!((b.jacobian(&u).unwrap()[0][0] - 0.5f64.exp()).norm() < 1e-15);
    }

    #[test]
    fn weierstrass_half_period() {
        let b = wp_backend();
        let om = b.lattice().unwrap().omega1;
        assert!((b.values(&[om]).unwrap()[0] - 1.0).norm() < 1e-10);
        assert!(b.jacobian(&[om]).unwrap()[0][0].norm() < 1e-9);
        let pts = b.exact_points();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0].values[0], rat(1));
        assert!(b.values(&[C::zero()]).is_err());
    }

    #[test]
    fn case4_periods() {
        let b = backend("singular2-case4");
        let u = [C::new(0.3, 0.2), C::new(-0.4, 0.1)];
        let base = b.values(&u).unwrap();
        for p in b.reference_periods() {
            let shifted = b.values(&[u[0] + p[0], u[1] + p[1]]).unwrap();
            for k in 0..2 {
                assert!((shifted[k] - base[k]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn jacobians_match_differences() {
        for id in ["exp", "singular2-case3", "singular2-case4", "singular2-case5"] {
            let b = backend(id);
            let n = b.n();
            let u: Vec<C> = (0..n).map(|i| C::new(0.35 - 0.2 * i as f64, 0.25)).collect();
            let jac = b.jacobian(&u).unwrap();
            let hess = b.hessian(&u).unwrap();
            let h = 1e-5;
            for p in 0..n {
                let mut up = u.clone();
                let mut um = u.clone();
                up[p] += h;
                um[p] -= h;
                let vp = b.values(&up).unwrap();
                let vm = b.values(&um).unwrap();
                let jp = b.jacobian(&up).unwrap();
                let jm = b.jacobian(&um).unwrap();
                for k in 0..n {
                    let fd = (vp[k] - vm[k]) / (2.0 * h);
                    assert!((fd - jac[k][p]).norm() < 1e-6 * (1.0 + fd.norm()), "{id} {k} {p}");
                    for q in 0..n {
                        let fd2 = (jp[k][q] - jm[k][q]) / (2.0 * h);
                        assert!(
                            (fd2 - hess[k][q][p]).norm() < 1e-6 * (1.0 + fd2.norm()),
                            "{id} {k} {p} {q}"
                        );
                    }
                }
            }
        }
    }
}

//! Higher derivatives of the mapping from its first-order relations:
//! differentiating `P_kp(zk_p; x) = 0` in `u_q` gives
//! `d zk_p / d u_q = -(sum_i dP/dx_i zi_q) / (dP/dzk_p)`, and so on.

use std::collections::BTreeMap;

use aat_algebra::{AlgebraError, MPoly, RatFn};
use num_complex::Complex64 as C;
use num_traits::Zero;
use serde::Serialize;

use crate::alphabet::{x, z};
use crate::elimination::FirstOrderRelation;
use crate::numeric::backend::MappingBackend;
use crate::numeric::residual::ResidualReport;
use crate::numeric::sampling::{SampleBox, Sampler};

/// `second[(k, p, q)]` as rational functions in `z` and `x`. Third
/// derivatives are evaluated numerically by the chain rule from the
/// partials of each second-derivative quotient; the symbolic total
/// derivative is available through `third_symbolic` but can be very large.
#[derive(Debug, Clone)]
pub struct Recursion {
    pub n: usize,
    pub second: BTreeMap<(usize, usize, usize), RatFn>,
    partials: BTreeMap<(usize, usize, usize), Partials>,
}

/// Numerator, denominator and their partials in every `x_i` and `zj_p`.
#[derive(Debug, Clone)]
struct Partials {
    num: MPoly,
    den: MPoly,
    /// `(slot, d num, d den)` for `x_i`.
    dx: Vec<(usize, MPoly, MPoly)>,
    /// `((j, p), d num, d den)` for `zj_p`.
    dz: Vec<((usize, usize), MPoly, MPoly)>,
}

fn find(rels: &[FirstOrderRelation], k: usize, p: usize) -> Result<&MPoly, AlgebraError> {
    rels.iter()
        .find(|r| r.k == k && r.p == p)
        .map(|r| &r.poly)
        .ok_or_else(|| AlgebraError::UnknownIdentifier(format!("P_{k}{p}")))
}

/// `d/du_q` of a rational function in `(z, x)`, given the second
/// derivative table.
fn total_derivative(
    f: &RatFn,
    q: usize,
    n: usize,
    second: &BTreeMap<(usize, usize, usize), RatFn>,
) -> Result<RatFn, AlgebraError> {
    let ring = f.ring().clone();
    let mut acc = RatFn::zero(&ring);
    for i in 1..=n {
        let xi = ring.var(&x(i))?;
        let zi = RatFn::from_poly(MPoly::var(&ring, &z(i, q))?);
        acc = &acc + &(&f.diff(xi) * &zi);
        for p in 1..=n {
            let s = ring.var(&z(i, p))?;
            let df = f.diff(s);
            if !df.is_zero() {
                acc = &acc + &(&df * &second[&(i, p, q)]);
            }
        }
    }
    Ok(acc)
}

impl Recursion {
    pub fn build(rels: &[FirstOrderRelation], n: usize) -> Result<Self, AlgebraError> {
        let mut second = BTreeMap::new();
        for k in 1..=n {
            for p in 1..=n {
                let pk = find(rels, k, p)?;
                let ring = pk.ring().clone();
                let p0 = pk.diff(ring.var(&z(k, p))?);
                for q in 1..=n {
                    let mut num = MPoly::zero(&ring);
                    for i in 1..=n {
                        let xi = ring.var(&x(i))?;
                        num = &num + &(&pk.diff(xi) * &MPoly::var(&ring, &z(i, q))?);
                    }
                    second.insert((k, p, q), RatFn::new(-&num, p0.clone())?);
                }
            }
        }
        let mut partials = BTreeMap::new();
        for (&key, s) in &second {
            let ring = s.ring().clone();
            let (num, den) = (s.numer(), s.denom());
            let mut dx = Vec::new();
            let mut dz = Vec::new();
            for i in 1..=n {
                let xi = ring.var(&x(i))?;
                dx.push((i, num.diff(xi), den.diff(xi)));
                for p in 1..=n {
                    let sl = ring.var(&z(i, p))?;
                    let (a, b) = (num.diff(sl), den.diff(sl));
                    if !a.is_zero() || !b.is_zero() {
                        dz.push(((i, p), a, b));
                    }
                }
            }
            partials.insert(
                key,
                Partials {
                    num: num.clone(),
                    den: den.clone(),
                    dx,
                    dz,
                },
            );
        }
        Ok(Recursion { n, second, partials })
    }

    /// Symbolic `d^3 x_k / du_p du_q du_r`.
    pub fn third_symbolic(&self, k: usize, p: usize, q: usize, r: usize) -> Result<RatFn, AlgebraError> {
        let s = self
            .second
            .get(&(k, p, q))
            .ok_or_else(|| AlgebraError::UnknownIdentifier(format!("second derivative ({k},{p},{q})")))?;
        total_derivative(s, r, self.n, &self.second)
    }

    /// All third-derivative index tuples.
    pub fn third_indices(&self) -> Vec<(usize, usize, usize, usize)> {
        self.second
            .keys()
            .flat_map(|&(k, p, q)| (1..=self.n).map(move |r| (k, p, q, r)))
            .collect()
    }
}

/// `f = a / b` at `pt`, or `None` when `b` is below `1e-12` of the point scale.
fn quotient(a: &MPoly, b: &MPoly, pt: &[C]) -> Option<(C, C)> {
    let scale = 1.0 + pt.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let den = b.eval_complex(pt);
    if den.norm() < 1e-12 * scale.powi(b.total_degree() as i32) {
        return None;
    }
    Some((a.eval_complex(pt), den))
}

/// Numeric `d^3 x_k / du_p du_q du_r` at `u`.
pub fn third_derivative(rec: &Recursion, backend: &MappingBackend, k: usize, p: usize, q: usize, r: usize, u: &[C]) -> Option<C> {
    let parts = rec.partials.get(&(k, p, q))?;
    let ring = parts.num.ring();
    let phi = backend.values(u).ok()?;
    let jac = backend.jacobian(u).ok()?;
    let pt = point(ring, &phi, &jac, &backend.constants());
    let (a, b) = quotient(&parts.num, &parts.den, &pt)?;
    // d(a/b)/ds = (a_s b - a b_s) / b^2
    let d = |da: &MPoly, db: &MPoly| (da.eval_complex(&pt) * b - a * db.eval_complex(&pt)) / (b * b);
    let mut acc = C::zero();
    for (i, da, db) in &parts.dx {
        acc += d(da, db) * jac[i - 1][r - 1];
    }
    for ((j, pp), da, db) in &parts.dz {
        let s = &rec.partials[&(*j, *pp, r)];
        let (sa, sb) = quotient(&s.num, &s.den, &pt)?;
        acc += d(da, db) * (sa / sb);
    }
    Some(acc)
}

/// Numeric point `(z, x, params)` for evaluating recursion entries.
fn point(
    ring: &aat_algebra::VarRing,
    phi: &[C],
    jac: &[Vec<C>],
    params: &[(String, C)],
) -> Vec<C> {
    let mut pt = vec![C::zero(); ring.arity()];
    for (k, v) in phi.iter().enumerate() {
        if let Some(s) = ring.symbol(&x(k + 1)) {
            pt[s] = *v;
        }
        for (p, d) in jac[k].iter().enumerate() {
            if let Some(s) = ring.symbol(&z(k + 1, p + 1)) {
                pt[s] = *d;
            }
        }
    }
    for (name, c) in params {
        if let Some(s) = ring.symbol(name) {
            pt[s] = *c;
        }
    }
    pt
}

/// Evaluates a recursion entry; `None` when the denominator
/// `dP/dzk_p` is below `1e-12` of the point scale.
pub fn eval_entry(f: &RatFn, backend: &MappingBackend, u: &[C]) -> Option<C> {
    let phi = backend.values(u).ok()?;
    let jac = backend.jacobian(u).ok()?;
    let pt = point(f.ring(), &phi, &jac, &backend.constants());
    let scale = 1.0 + pt.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let den = f.denom().eval_complex(&pt);
    if den.norm() < 1e-12 * scale.powi(f.denom().total_degree() as i32) {
        return None;
    }
    Some(f.numer().eval_complex(&pt) / den)
}

pub fn higher_derivative(rec: &Recursion, backend: &MappingBackend, k: usize, p: usize, q: usize, u: &[C]) -> Option<C> {
    eval_entry(rec.second.get(&(k, p, q))?, backend, u)
}

pub const FD_STEP: f64 = 1e-5;

fn shifted(u: &[C], r: usize, h: f64) -> Vec<C> {
    let mut v = u.to_vec();
    v[r - 1] += h;
    v
}

/// Central differences of the backend Jacobian and Hessian.
fn fd_second(backend: &MappingBackend, u: &[C], k: usize, p: usize, q: usize) -> Option<C> {
    let a = backend.jacobian(&shifted(u, q, FD_STEP)).ok()?;
    let b = backend.jacobian(&shifted(u, q, -FD_STEP)).ok()?;
    Some((a[k - 1][p - 1] - b[k - 1][p - 1]) / (2.0 * FD_STEP))
}

fn fd_third(backend: &MappingBackend, u: &[C], k: usize, p: usize, q: usize, r: usize) -> Option<C> {
    let a = backend.hessian(&shifted(u, r, FD_STEP)).ok()?;
    let b = backend.hessian(&shifted(u, r, -FD_STEP)).ok()?;
    Some((a[k - 1][p - 1][q - 1] - b[k - 1][p - 1][q - 1]) / (2.0 * FD_STEP))
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct RecursionCheck {
    pub second: ResidualReport,
    pub third: ResidualReport,
    pub singular_skips: usize,
}

impl RecursionCheck {
    pub fn passed(&self) -> bool {
        self.second.passed() && self.third.passed()
    }
}

/// Recursion against finite differences at `points` pole-free samples, all
/// index combinations, orders 2 and 3. Values are compared relative to
/// `max(1, |fd|)`.
pub fn finite_difference_check(
    rec: &Recursion,
    backend: &MappingBackend,
    points: usize,
    tol: f64,
    seed: u64,
) -> RecursionCheck {
    let n = rec.n;
    let mut sampler = Sampler::stream(seed, "recursion", SampleBox::default());
    let (mut s2, mut s3) = (Vec::new(), Vec::new());
    let mut used = 0;
    let mut skips = 0;
    while used < points && skips < 10 * points {
        let u = sampler.point(n);
        if backend.near_pole(&u, 0.05) {
            skips += 1;
            continue;
        }
        let mut row2 = Vec::new();
        let mut row3 = Vec::new();
        let mut ok = true;
        'outer: for (&(k, p, q), f) in &rec.second {
            let (Some(a), Some(b)) = (eval_entry(f, backend, &u), fd_second(backend, &u, k, p, q)) else {
                ok = false;
                break 'outer;
            };
            row2.push(rel(a, b));
            for r in 1..=n {
                let (Some(a), Some(b)) = (third_derivative(rec, backend, k, p, q, r, &u), fd_third(backend, &u, k, p, q, r)) else {
                    ok = false;
                    break 'outer;
                };
                row3.push(rel(a, b));
            }
        }
        if !ok {
            skips += 1;
            continue;
        }
        used += 1;
        s2.push(row2.into_iter().fold(0.0, f64::max));
        s3.push(row3.into_iter().fold(0.0, f64::max));
    }
    RecursionCheck {
        second: ResidualReport::from_values("second derivatives vs finite differences", s2, skips, tol),
        third: ResidualReport::from_values("third derivatives vs finite differences", s3, skips, tol),
        singular_skips: skips,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", content = "detail", rename_all = "kebab-case")]
pub enum TaylorMatch {
    Match(bool),
    /// `Phi` or `Phi'` differ at the two points.
    NotApplicable(String),
    /// The recursion is singular at a witness point.
    Indeterminate(String),
}

/// Compares the recursion-generated derivatives through `order` (2 or 3)
/// at two points that share values and first derivatives.
pub fn taylor_match_check(rec: &Recursion, backend: &MappingBackend, a: &[C], b: &[C], order: usize, tol: f64) -> TaylorMatch {
    let (Ok(pa), Ok(pb), Ok(ja), Ok(jb)) = (backend.values(a), backend.values(b), backend.jacobian(a), backend.jacobian(b))
    else {
        return TaylorMatch::NotApplicable("pole at a witness point".into());
    };
    let close = |x: C, y: C| (x - y).norm() <= tol * (1.0 + x.norm().max(y.norm()));
    if !pa.iter().zip(&pb).all(|(x, y)| close(*x, *y)) {
        return TaylorMatch::NotApplicable("values differ".into());
    }
    if !ja.iter().flatten().zip(jb.iter().flatten()).all(|(x, y)| close(*x, *y)) {
        return TaylorMatch::NotApplicable("first derivatives differ".into());
    }
    let mut pairs: Vec<(Option<C>, Option<C>)> =
        rec.second.values().map(|f| (eval_entry(f, backend, a), eval_entry(f, backend, b))).collect();
    if order >= 3 {
        for (k, p, q, r) in rec.third_indices() {
            pairs.push((
                third_derivative(rec, backend, k, p, q, r, a),
                third_derivative(rec, backend, k, p, q, r, b),
            ));
        }
    }
    for pair in pairs {
        match pair {
            (Some(x), Some(y)) => {
                if !close(x, y) {
                    return TaylorMatch::Match(false);
                }
            }
            _ => return TaylorMatch::Indeterminate("recursion singular at a witness point".into()),
        }
    }
    TaylorMatch::Match(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::standard_ring;
    use crate::family::Family;
    use aat_algebra::{parse_poly, rat};

    fn rels(n: usize, polys: &[(usize, usize, &str)]) -> Vec<FirstOrderRelation> {
        let r = standard_ring(n, &[]).unwrap();
        polys
            .iter()
            .map(|&(k, p, s)| FirstOrderRelation {
                k,
                p,
                poly: parse_poly(s, &r).unwrap(),
                source: "test".into(),
                residual: None,
            })
            .collect()
    }

    #[test]
    fn weierstrass_second_derivative() {
        let rec = Recursion::build(&rels(1, &[(1, 1, "z1_1^2 - 4*x1^3 + 4*x1")]), 1).unwrap();
        assert_eq!(rec.second[&(1, 1, 1)].to_string(), "6*x1^2 - 2");
        assert_eq!(rec.third_symbolic(1, 1, 1, 1).unwrap().to_string(), "12*z1_1*x1");
        let b = MappingBackend::new(Family::Weierstrass { g2: rat(4), g3: rat(0) }).unwrap();
        let chk = finite_difference_check(&rec, &b, 20, 1e-6, 5);
        assert!(chk.passed(), "{chk:?}");
    }

    #[test]
    fn exp_and_additive() {
        let rec = Recursion::build(&rels(1, &[(1, 1, "z1_1 - x1")]), 1).unwrap();
        assert_eq!(rec.second[&(1, 1, 1)].to_string(), "z1_1");
        let rec = Recursion::build(&rels(1, &[(1, 1, "z1_1 - 1")]), 1).unwrap();
        assert!(rec.second[&(1, 1, 1)].is_zero());
    }

    #[test]
    fn singular_case4_recursion() {
        let r = rels(
            2,
            &[(1, 1, "z1_1^2 - 4*x1^3 + 4*x1"), (1, 2, "z1_2"), (2, 1, "z2_1 - x1"), (2, 2, "z2_2 - 1")],
        );
        let rec = Recursion::build(&r, 2).unwrap();
        let b = MappingBackend::new(Family::Case4 { eps: 1, g2: rat(4), g3: rat(0) }).unwrap();
        let chk = finite_difference_check(&rec, &b, 20, 1e-6, 9);
        assert!(chk.passed(), "{chk:?}");
    }

    #[test]
    fn taylor_identity_at_period_pairs() {
        let b = MappingBackend::new(Family::Weierstrass { g2: rat(4), g3: rat(0) }).unwrap();
        let rec = Recursion::build(&rels(1, &[(1, 1, "z1_1^2 - 4*x1^3 + 4*x1")]), 1).unwrap();
        let a = C::new(0.3, 0.4);
        let w1 = b.lattice().unwrap().omega1;
        assert_eq!(taylor_match_check(&rec, &b, &[a], &[a + 2.0 * w1], 3, 1e-8), TaylorMatch::Match(true));
        assert!(matches!(
            taylor_match_check(&rec, &b, &[a], &[-a], 3, 1e-8),
            TaylorMatch::NotApplicable(_)
        ));
        let e = MappingBackend::new(Family::Exp { c: rat(1) }).unwrap();
        let rec = Recursion::build(&rels(1, &[(1, 1, "z1_1 - x1")]), 1).unwrap();
        let shift = C::new(0.0, 2.0 * std::f64::consts::PI);
        assert_eq!(taylor_match_check(&rec, &e, &[a], &[a + shift], 3, 1e-8), TaylorMatch::Match(true));
    }
}

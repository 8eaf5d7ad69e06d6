//! Period detection: pairs `a, b` with `Phi(a) = Phi(b)` and
//! `Phi'(a) = Phi'(b)` give candidate periods `a - b`, each verified by
//! direct shifting and reduced against the ones already found.

use num_complex::Complex64 as C;
use num_traits::Zero;

use crate::numeric::backend::MappingBackend;
use crate::numeric::recursion::{taylor_match_check, Recursion, TaylorMatch};
use crate::numeric::residual::ResidualReport;
use crate::numeric::sampling::{SampleBox, Sampler};
use crate::numeric::weierstrass::Lattice;

pub const VERIFY_SAMPLES: usize = 50;

#[derive(Debug, Clone)]
pub struct PeriodCandidate {
    pub p: Vec<C>,
    pub a: Vec<C>,
    pub b: Vec<C>,
    /// Max scaled `|Phi(u + p) - Phi(u)|` over the verification samples.
    pub residual: f64,
    pub taylor: Option<TaylorMatch>,
    pub note: String,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct PeriodSearch {
    pub half_width: f64,
    pub grid: usize,
    pub starts: usize,
    pub candidates: Vec<PeriodCandidate>,
    /// Reduced generators of the group spanned by the verified candidates.
    pub basis: Vec<Vec<C>>,
}

/// Solves the complex `n x n` system `m x = r` by Gaussian elimination
/// with partial pivoting.
fn solve(mut m: Vec<Vec<C>>, mut r: Vec<C>) -> Option<Vec<C>> {
    let n = r.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))?;
        if m[piv][col].norm() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for j in col..n {
                let t = m[col][j];
                m[row][j] -= f * t;
            }
            let t = r[col];
            r[row] -= f * t;
        }
    }
    let mut x = vec![C::zero(); n];
    for i in (0..n).rev() {
        let mut s = r[i];
        for j in i + 1..n {
            s -= m[i][j] * x[j];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

fn norm(v: &[C]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Damped Newton iteration for `Phi(b) = target`.
fn newton(backend: &MappingBackend, target: &[C], start: Vec<C>) -> Option<Vec<C>> {
    let mut b = start;
    let scale = 1.0 + norm(target);
    for _ in 0..60 {
        let f: Vec<C> = backend.values(&b).ok()?.iter().zip(target).map(|(p, t)| p - t).collect();
        if norm(&f) < 1e-13 * scale {
            return Some(b);
        }
        let step = solve(backend.jacobian(&b).ok()?, f)?;
        let len = norm(&step);
        let damp = if len > 1.0 { 1.0 / len } else { 1.0 };
        for (bi, s) in b.iter_mut().zip(&step) {
            *bi -= s * damp;
        }
        if !b.iter().all(|c| c.is_finite()) {
            return None;
        }
    }
    None
}

fn close(x: C, y: C, tol: f64) -> bool {
    (x - y).norm() <= tol * (1.0 + x.norm().max(y.norm()))
}

/// Max scaled shift residual of `p` at random pole-free points.
pub fn shift_residual(backend: &MappingBackend, p: &[C], samples: usize, seed: u64) -> f64 {
    let n = backend.n();
    let mut sampler = Sampler::stream(seed, "period-verify", SampleBox::default());
    let mut worst: f64 = 0.0;
    let mut got = 0;
    let mut tries = 0;
    while got < samples && tries < 10 * samples {
        tries += 1;
        let u = sampler.point(n);
        let up: Vec<C> = u.iter().zip(p).map(|(a, b)| a + b).collect();
        if backend.near_pole(&u, 0.05) || backend.near_pole(&up, 0.05) {
            continue;
        }
        let (Ok(a), Ok(b)) = (backend.values(&u), backend.values(&up)) else {
            continue;
        };
        got += 1;
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).norm() / (1.0 + x.norm()));
        }
    }
    if got < samples {
        return f64::INFINITY;
    }
    worst
}

fn to_real(v: &[C]) -> Vec<f64> {
    v.iter().flat_map(|c| [c.re, c.im]).collect()
}

/// Real least-squares coordinates of `v` in the span of `basis`.
fn real_coordinates(v: &[C], basis: &[Vec<C>]) -> Option<Vec<f64>> {
    let cols: Vec<Vec<f64>> = basis.iter().map(|b| to_real(b)).collect();
    let rhs = to_real(v);
    let k = cols.len();
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let gram = nalgebra::DMatrix::<f64>::from_fn(k, k, |i, j| dot(&cols[i], &cols[j]));
    let proj = nalgebra::DVector::<f64>::from_fn(k, |i, _| dot(&cols[i], &rhs));
    gram.lu().solve(&proj).map(|c| c.iter().copied().collect())
}

fn combination_defect(v: &[C], basis: &[Vec<C>], coef: &[f64]) -> f64 {
    let mut rest = v.to_vec();
    for (b, m) in basis.iter().zip(coef) {
        for (r, c) in rest.iter_mut().zip(b) {
            *r -= c * *m;
        }
    }
    norm(&rest)
}

/// Least-squares integer coordinates of `v` in `basis`; returns the
/// coefficients and the distance of `v` from that integer combination.
pub fn integer_coordinates(v: &[C], basis: &[Vec<C>]) -> Option<(Vec<i64>, f64)> {
    if basis.is_empty() {
        return Some((Vec::new(), norm(v)));
    }
    let coef = real_coordinates(v, basis)?;
    let ints: Vec<i64> = coef.iter().map(|c| c.round() as i64).collect();
    let rounded: Vec<f64> = ints.iter().map(|&m| m as f64).collect();
    Some((ints, combination_defect(v, basis, &rounded)))
}

/// Distance of `v` from the real span of `basis`.
fn span_defect(v: &[C], basis: &[Vec<C>]) -> f64 {
    if basis.is_empty() {
        return norm(v);
    }
    match real_coordinates(v, basis) {
        Some(coef) => combination_defect(v, basis, &coef),
        None => norm(v),
    }
}

/// Pairwise size reduction until no vector shortens; drops vectors that
/// reduce to (numerically) zero.
fn reduce_basis(mut basis: Vec<Vec<C>>) -> Vec<Vec<C>> {
    let dot = |a: &[C], b: &[C]| a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum::<f64>();
    let mut changed = true;
    let mut rounds = 0;
    while changed && rounds < 1000 {
        rounds += 1;
        changed = false;
        basis.sort_by(|a, b| norm(a).total_cmp(&norm(b)));
        let scale = basis.iter().map(|b| norm(b)).fold(0.0, f64::max).max(1.0);
        basis.retain(|b| norm(b) > 1e-7 * scale);
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i == j {
                    continue;
                }
                let bj = basis[j].clone();
                let mu = (dot(&basis[i], &bj) / dot(&bj, &bj)).round();
                if mu != 0.0 {
                    let cand: Vec<C> = basis[i].iter().zip(&bj).map(|(a, b)| a - b * mu).collect();
                    if norm(&cand) < norm(&basis[i]) - 1e-12 * norm(&basis[i]) {
                        basis[i] = cand;
                        changed = true;
                    }
                }
            }
        }
    }
    basis.sort_by(|a, b| norm(a).total_cmp(&norm(b)));
    // a canonical sign: first nonnegligible real part positive
    for b in basis.iter_mut() {
        let lead = to_real(b).into_iter().find(|x| x.abs() > 1e-9).unwrap_or(0.0);
        if lead < 0.0 {
            for c in b.iter_mut() {
                *c = -*c;
            }
        }
    }
    basis
}

fn grid_points(n: usize, half_width: f64, grid: usize) -> Vec<Vec<C>> {
    let axis: Vec<f64> = (0..grid)
        .map(|i| -half_width + 2.0 * half_width * i as f64 / (grid.max(2) - 1) as f64)
        .collect();
    let plane: Vec<C> = axis.iter().flat_map(|&re| axis.iter().map(move |&im| C::new(re, im))).collect();
    let mut out: Vec<Vec<C>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                plane.iter().map(move |c| {
                    let mut v = prefix.clone();
                    v.push(*c);
                    v
                })
            })
            .collect();
    }
    out
}

/// Grid size per complex coordinate.
pub fn default_grid(n: usize) -> usize {
    if n == 1 {
        29
    } else {
        9
    }
}

fn describe(p: &[C], reference: &[Vec<C>]) -> String {
    if reference.is_empty() {
        return "no reference periods".into();
    }
    match integer_coordinates(p, reference) {
        Some((m, d)) if d < 1e-6 * (1.0 + norm(p)) => {
            let parts: Vec<String> = m.iter().enumerate().map(|(i, c)| format!("{c}*ref{}", i + 1)).collect();
            format!("= {}", parts.join(" + "))
        }
        _ => "not an integer combination of the reference periods".into(),
    }
}

/// Scans starting points on a grid in `[-half_width, half_width]^2` per
/// coordinate, solves `Phi(b) = Phi(a)` by Newton iteration and keeps
/// `p = b - a` when the first derivatives also agree and the shift verifies.
pub fn detect_period(
    backend: &MappingBackend,
    half_width: f64,
    grid: usize,
    tol: f64,
    seed: u64,
    rec: Option<&Recursion>,
) -> PeriodSearch {
    let n = backend.n();
    let mut sampler = Sampler::stream(seed, "period-anchor", SampleBox { half_width: 0.5 });
    let a = loop {
        let a = sampler.point(n);
        if !backend.near_pole(&a, 0.2) && backend.values(&a).is_ok() {
            break a;
        }
    };
    let target = backend.values(&a).expect("anchor off the poles");
    let ja = backend.jacobian(&a).expect("anchor off the poles");
    let starts = grid_points(n, half_width, grid);
    let reference = backend.reference_periods();
    let mut raw: Vec<(Vec<C>, Vec<C>)> = Vec::new();
    for s in &starts {
        let Some(b) = newton(backend, &target, s.clone()) else {
            continue;
        };
        let p: Vec<C> = b.iter().zip(&a).map(|(x, y)| x - y).collect();
        if norm(&p) < 1e-6 || p.iter().any(|c| c.re.abs() > 2.0 * half_width || c.im.abs() > 2.0 * half_width) {
            continue;
        }
        let Ok(jb) = backend.jacobian(&b) else {
            continue;
        };
        if !ja.iter().flatten().zip(jb.iter().flatten()).all(|(x, y)| close(*x, *y, 1e-7)) {
            continue;
        }
        if raw.iter().any(|(q, _)| norm(&q.iter().zip(&p).map(|(x, y)| x - y).collect::<Vec<_>>()) < 1e-6) {
            continue;
        }
        raw.push((p, b));
    }
    raw.sort_by(|x, y| norm(&x.0).total_cmp(&norm(&y.0)));
    let mut candidates = Vec::new();
    let mut generators: Vec<Vec<C>> = Vec::new();
    for (p, b) in raw {
        let residual = shift_residual(backend, &p, VERIFY_SAMPLES, seed);
        let passed = residual < tol;
        let taylor = rec.map(|r| taylor_match_check(r, backend, &a, &b, 3, 1e-7));
        if passed {
            let scale = 1.0 + norm(&p);
            let in_lattice = matches!(integer_coordinates(&p, &generators), Some((_, d)) if d < 1e-6 * scale);
            if !in_lattice {
                if span_defect(&p, &generators) > 1e-6 * scale {
                    generators.push(p.clone());
                } else {
                    generators.push(p.clone());
                    generators = reduce_basis(generators);
                }
            }
        }
        candidates.push(PeriodCandidate {
            note: describe(&p, &reference),
            p,
            a: a.clone(),
            b,
            residual,
            taylor,
            passed,
        });
    }
    PeriodSearch {
        half_width,
        grid,
        starts: starts.len(),
        candidates,
        basis: reduce_basis(generators),
    }
}

/// True when the two sets generate the same group: each vector of one is an
/// integer combination of the other.
pub fn same_lattice(found: &[Vec<C>], reference: &[Vec<C>], tol: f64) -> bool {
    let covers = |xs: &[Vec<C>], ys: &[Vec<C>]| {
        xs.iter()
            .all(|x| matches!(integer_coordinates(x, ys), Some((_, d)) if d < tol * (1.0 + norm(x))))
    };
    found.len() == reference.len() && covers(found, reference) && covers(reference, found)
}

/// `zeta(u + 2 omega_i) - zeta(u) - 2 eta_i` and the sigma shift law, as
/// scaled residuals at random points.
pub fn quasi_periodicity(lat: &Lattice, samples: usize, tol: f64, seed: u64) -> Vec<ResidualReport> {
    let mut sampler = Sampler::stream(seed, "quasi-periodicity", SampleBox::default());
    let (mut z, mut s) = (Vec::new(), Vec::new());
    while z.len() < samples {
        let u = sampler.complex();
        if lat.reduce(u).0.norm() < 0.05 {
            continue;
        }
        let mut zr: f64 = 0.0;
        let mut sr: f64 = 0.0;
        for (om, eta) in [(lat.omega1, lat.eta1), (lat.omega2, lat.eta2)] {
            let (Ok(a), Ok(b)) = (lat.zeta(u + 2.0 * om), lat.zeta(u)) else {
                continue;
            };
            zr = zr.max((a - b - 2.0 * eta).norm());
            let expect = -lat.sigma(u) * (2.0 * eta * (u + om)).exp();
            sr = sr.max((lat.sigma(u + 2.0 * om) - expect).norm() / expect.norm().max(1e-300));
        }
        z.push(zr);
        s.push(sr);
    }
    vec![
        ResidualReport::from_values("zeta(u + 2 omega_i) - zeta(u) - 2 eta_i", z, 0, tol),
        ResidualReport::from_values("sigma shift law (relative)", s, 0, 1e-8),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Family;
    use aat_algebra::rat;

    #[test]
    fn weierstrass_lattice_recovered() {
        let b = MappingBackend::new(Family::Weierstrass { g2: rat(4), g3: rat(0) }).unwrap();
        let s = detect_period(&b, 7.0, default_grid(1), 1e-9, 42, None);
        assert_eq!(s.basis.len(), 2, "{:?}", s.basis);
        assert!(same_lattice(&s.basis, &b.reference_periods(), 1e-6));
        for p in &s.basis {
            let neg: Vec<C> = p.iter().map(|c| -c).collect();
            assert!(shift_residual(&b, &neg, 50, 1) < 1e-9);
        }
        let sum: Vec<C> = vec![s.basis[0][0] + s.basis[1][0]];
        assert!(shift_residual(&b, &sum, 50, 1) < 1e-9);
    }

    #[test]
    fn rational_family_has_no_period() {
        let b = MappingBackend::new(Family::Rational { a: rat(1), b: rat(0) }).unwrap();
        let s = detect_period(&b, 7.0, default_grid(1), 1e-9, 42, None);
        assert!(s.candidates.is_empty());
        assert!(s.basis.is_empty());
    }

    #[test]
    fn singular_case4_periods() {
        let b = MappingBackend::new(Family::Case4 { eps: 1, g2: rat(4), g3: rat(0) }).unwrap();
        let reps = quasi_periodicity(b.lattice().unwrap(), 50, 1e-9, 3);
        assert!(reps.iter().all(|r| r.max < r.tol), "{reps:?}");
        let s = detect_period(&b, 7.0, default_grid(2), 1e-9, 42, None);
        assert!(same_lattice(&s.basis, &b.reference_periods(), 1e-6), "{:?}", s.basis);
    }

    #[test]
    fn lattice_helpers() {
        let basis = vec![vec![C::new(2.0, 0.0)], vec![C::new(0.0, 2.0)]];
        let (m, d) = integer_coordinates(&[C::new(4.0, -6.0)], &basis).unwrap();
        assert_eq!(m, vec![2, -3]);
        assert!(d < 1e-12);
        let red = reduce_basis(vec![vec![C::new(2.0, 0.0)], vec![C::new(2.0, 2.0)], vec![C::new(4.0, 2.0)]]);
        assert_eq!(red.len(), 2);
    }
}

//! Weierstrass elliptic functions by argument reduction plus Laurent series.
//!
//! The lattice is recovered from the invariants `g2, g3`: the roots of
//! `4t^3 - g2 t - g3` feed complex AGM evaluations of the complete integrals,
//! every candidate half-period is checked against the series, and the
//! resulting basis is Gauss-reduced. Values are then computed at the point of
//! the reduced cell nearest the origin, where the series converges.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use thiserror::Error;

const MAX_COEFFS: usize = 600;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("degenerate lattice: discriminant g2^3 - 27 g3^2 vanishes")]
    Degenerate,
    #[error("lattice out of numeric range")]
    OutOfRange,
    #[error("could not determine the period lattice")]
    NoPeriods,
    #[error("shift parameter lies on the period lattice")]
    ShiftOnLattice,
}

/// Evaluation hit (or came within 1e-12 of) a lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("pole of the Weierstrass function")]
pub struct LatticePole;

#[derive(Debug, Clone)]
pub struct Lattice {
    pub g2: C,
    pub g3: C,
    /// Half-periods of a reduced basis, `Im(omega2 / omega1) > 0`.
    pub omega1: C,
    pub omega2: C,
    pub eta1: C,
    pub eta2: C,
    /// `wp` at `omega1`, `omega2` and `omega1 + omega2`.
    pub e: [C; 3],
    coeffs: Vec<C>,
}

fn cubic_roots(g2: C, g3: C) -> [C; 3] {
    // Durand-Kerner on the monic cubic t^3 - g2/4 t - g3/4
    let f = |t: C| t * t * t - g2 / 4.0 * t - g3 / 4.0;
    let df = |t: C| 3.0 * t * t - g2 / 4.0;
    let seed = C::new(0.4, 0.9);
    let mut r = [seed, seed * seed, seed * seed * seed];
    let scale = 1.0 + g2.norm().sqrt() + g3.norm().cbrt();
    for z in r.iter_mut() {
        *z *= scale;
    }
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..3 {
            let mut den = C::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= r[i] - r[j];
                }
            }
            let step = f(r[i]) / den;
            r[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-16 * scale {
            break;
        }
    }
    for z in r.iter_mut() {
        for _ in 0..3 {
            let d = df(*z);
            if d.norm() > 1e-300 {
                *z -= f(*z) / d;
            }
        }
    }
    r
}

fn agm(mut a: C, mut b: C) -> C {
    for _ in 0..100 {
        let a1 = (a + b) / 2.0;
        let mut b1 = (a * b).sqrt();
        if (a1 - b1).norm() > (a1 + b1).norm() {
            b1 = -b1;
        }
        a = a1;
        b = b1;
        if (a - b).norm() <= 1e-16 * a.norm() {
            break;
        }
    }
    a
}

fn series_coeffs(g2: C, g3: C) -> Result<Vec<C>, LatticeError> {
    // c[k] multiplies u^(2k-2) in wp; c[0], c[1] unused
    let mut c = vec![C::new(0.0, 0.0); MAX_COEFFS];
    c[2] = g2 / 20.0;
    c[3] = g3 / 28.0;
    for k in 4..MAX_COEFFS {
        let mut s = C::new(0.0, 0.0);
        for m in 2..=k - 2 {
            s += c[m] * c[k - m];
        }
        c[k] = s * (3.0 / (((2 * k + 1) * (k - 3)) as f64));
        if !c[k].re.is_finite() || !c[k].im.is_finite() {
            return Err(LatticeError::OutOfRange);
        }
    }
    Ok(c)
}

/// Sum of a power series in `u^2`, stopping once two consecutive terms fall
/// below `1e-16` relative to the partial sum.
fn sum_series(coeffs: &[C], mut term_of: impl FnMut(usize, &C) -> C, init: C) -> C {
    let mut sum = init;
    let mut small = 0;
    for (k, c) in coeffs.iter().enumerate().skip(2) {
        let t = term_of(k, c);
        sum += t;
        if t.norm() < 1e-16 * sum.norm() {
            small += 1;
            if small >= 2 && k > 6 {
                break;
            }
        } else {
            small = 0;
        }
    }
    sum
}

impl Lattice {
    pub fn new(g2: C, g3: C) -> Result<Self, LatticeError> {
        let disc = g2 * g2 * g2 - 27.0 * g3 * g3;
        let size = g2.norm().powi(3) + 27.0 * g3.norm().powi(2);
        if disc.norm() <= 1e-12 * size.max(1e-300) || size == 0.0 {
            return Err(LatticeError::Degenerate);
        }
        let coeffs = series_coeffs(g2, g3)?;
        let roots = cubic_roots(g2, g3);
        let mut lat = Lattice {
            g2,
            g3,
            omega1: C::new(0.0, 0.0),
            omega2: C::new(0.0, 0.0),
            eta1: C::new(0.0, 0.0),
            eta2: C::new(0.0, 0.0),
            e: roots,
            coeffs,
        };
        let tol = 1e-8 * (1.0 + roots.iter().map(|r| r.norm()).fold(0.0, f64::max));
        let mut candidates: Vec<(C, usize)> = Vec::new();
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for [a, b, c] in perms {
            let (ea, eb, ec) = (roots[a], roots[b], roots[c]);
            let m1 = agm((ea - ec).sqrt(), (ea - eb).sqrt());
            let m2 = agm((ea - ec).sqrt(), (eb - ec).sqrt());
            for om in [PI / (2.0 * m1), C::i() * PI / (2.0 * m2)] {
                if !om.re.is_finite() || !om.im.is_finite() || om.norm() == 0.0 {
                    continue;
                }
                // series evaluated directly (no reduction yet); only trusted when it agrees
                let val = lat.wp_series(om);
                let der = lat.wpp_series(om);
                if let Some(i) = (0..3).find(|&i| (val - roots[i]).norm() < tol) {
                    if der.norm() < 1e-6 * (1.0 + val.norm()) {
                        candidates.push((om, i));
                    }
                }
            }
        }
        // pick two half-periods belonging to different roots with independent directions
        let mut basis = None;
        'outer: for (i, &(o1, r1)) in candidates.iter().enumerate() {
            for &(o2, r2) in candidates.iter().skip(i + 1) {
                if r1 != r2 && (o2 / o1).im.abs() > 1e-6 {
                    basis = Some((o1, o2));
                    break 'outer;
                }
            }
        }
        let (o1, o2) = basis.ok_or(LatticeError::NoPeriods)?;
        let (b1, b2) = gauss_reduce(2.0 * o1, 2.0 * o2);
        let (mut w1, mut w2) = (b1 / 2.0, b2 / 2.0);
        // shortest first; ties broken toward the positive real axis
        let close = (w1.norm() - w2.norm()).abs() <= 1e-10 * w1.norm();
        if w2.norm() < w1.norm() && !close {
            std::mem::swap(&mut w1, &mut w2);
        }
        if close {
            let arg = |w: C| w.arg().abs().min((-w).arg().abs());
            if arg(w2) < arg(w1) - 1e-12 {
                std::mem::swap(&mut w1, &mut w2);
            }
        }
        if w1.re < 0.0 || (w1.re == 0.0 && w1.im < 0.0) {
            w1 = -w1;
        }
        if (w2 / w1).im < 0.0 {
            w2 = -w2;
        }
        lat.omega1 = w1;
        lat.omega2 = w2;
        lat.eta1 = lat.zeta_series(w1);
        lat.eta2 = lat.zeta_series(w2);
        let e1 = lat.wp(w1).map_err(|_| LatticeError::NoPeriods)?;
        let e2 = lat.wp(w2).map_err(|_| LatticeError::NoPeriods)?;
        let e3 = lat.wp(w1 + w2).map_err(|_| LatticeError::NoPeriods)?;
        lat.e = [e1, e2, e3];
        Ok(lat)
    }

    pub fn real(g2: f64, g3: f64) -> Result<Self, LatticeError> {
        Self::new(C::new(g2, 0.0), C::new(g3, 0.0))
    }

    /// Roots of `4t^3 - g2 t - g3` computed directly from the polynomial.
    pub fn cubic_roots(&self) -> [C; 3] {
        cubic_roots(self.g2, self.g3)
    }

    /// Splits `u` into a cell representative and lattice coordinates `(m, n)`
    /// with `u = r + 2m omega1 + 2n omega2`.
    pub fn reduce(&self, u: C) -> (C, i64, i64) {
        let (p1, p2) = (2.0 * self.omega1, 2.0 * self.omega2);
        let det = p1.re * p2.im - p1.im * p2.re;
        let a = (u.re * p2.im - u.im * p2.re) / det;
        let b = (p1.re * u.im - p1.im * u.re) / det;
        let (m0, n0) = (a.round() as i64, b.round() as i64);
        let mut best = (u - p1 * m0 as f64 - p2 * n0 as f64, m0, n0);
        for dm in -1..=1 {
            for dn in -1..=1 {
                let (m, n) = (m0 + dm, n0 + dn);
                let r = u - p1 * m as f64 - p2 * n as f64;
                if r.norm() < best.0.norm() - 1e-15 {
                    best = (r, m, n);
                }
            }
        }
        best
    }

    fn check_pole(r: C) -> Result<(), LatticePole> {
        if r.norm() < 1e-12 {
            Err(LatticePole)
        } else {
            Ok(())
        }
    }

    fn wp_series(&self, u: C) -> C {
        let u2 = u * u;
        let mut pw = C::new(1.0, 0.0);
        sum_series(
            &self.coeffs,
            |_, c| {
                pw *= u2;
                c * pw
            },
            1.0 / u2,
        )
    }

    fn wpp_series(&self, u: C) -> C {
        let u2 = u * u;
        let mut pw = 1.0 / u;
        sum_series(
            &self.coeffs,
            |k, c| {
                pw *= u2;
                c * pw * ((2 * k - 2) as f64)
            },
            -2.0 / (u2 * u),
        )
    }

    fn zeta_series(&self, u: C) -> C {
        let u2 = u * u;
        let mut pw = u;
        sum_series(
            &self.coeffs,
            |k, c| {
                pw *= u2;
                -c * pw / ((2 * k - 1) as f64)
            },
            1.0 / u,
        )
    }

    fn log_sigma_ratio(&self, u: C) -> C {
        // log(sigma(u)/u)
        let u2 = u * u;
        let mut pw = u2;
        sum_series(
            &self.coeffs,
            |k, c| {
                pw *= u2;
                -c * pw / (((2 * k - 1) * (2 * k)) as f64)
            },
            C::new(0.0, 0.0),
        )
    }

    pub fn wp(&self, u: C) -> Result<C, LatticePole> {
        let (r, _, _) = self.reduce(u);
        Self::check_pole(r)?;
        Ok(self.wp_series(r))
    }

    pub fn wp_prime(&self, u: C) -> Result<C, LatticePole> {
        let (r, _, _) = self.reduce(u);
        Self::check_pole(r)?;
        Ok(self.wpp_series(r))
    }

    /// Second derivative from the differential equation `wp'' = 6 wp^2 - g2/2`.
    pub fn wp_second(&self, u: C) -> Result<C, LatticePole> {
        let p = self.wp(u)?;
        Ok(6.0 * p * p - self.g2 / 2.0)
    }

    pub fn zeta(&self, u: C) -> Result<C, LatticePole> {
        let (r, m, n) = self.reduce(u);
        Self::check_pole(r)?;
        Ok(self.zeta_series(r) + 2.0 * (self.eta1 * m as f64 + self.eta2 * n as f64))
    }

    pub fn sigma(&self, u: C) -> C {
        let (r, m, n) = self.reduce(u);
        let base = if r.norm() == 0.0 {
            C::new(0.0, 0.0)
        } else {
            r * self.log_sigma_ratio(r).exp()
        };
        if m == 0 && n == 0 {
            return base;
        }
        let p = 2.0 * (self.omega1 * m as f64 + self.omega2 * n as f64);
        let eta = 2.0 * (self.eta1 * m as f64 + self.eta2 * n as f64);
        let sign = if (m + n + m * n) % 2 == 0 { 1.0 } else { -1.0 };
        base * sign * (eta * (r + p / 2.0)).exp()
    }

    /// Generators `2 omega1`, `2 omega2` of the period lattice.
    pub fn periods(&self) -> [C; 2] {
        [2.0 * self.omega1, 2.0 * self.omega2]
    }
}

/// Gauss (Lagrange) reduction of a basis of a plane lattice.
pub fn gauss_reduce(mut a: C, mut b: C) -> (C, C) {
    if b.norm() < a.norm() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let mu = (b * a.conj()).re / a.norm_sqr();
        let k = mu.round();
        b -= a * k;
        if b.norm() >= a.norm() - 1e-15 * a.norm() {
            return (a, b);
        }
        std::mem::swap(&mut a, &mut b);
    }
}

//! Arithmetic in `K(x)[theta] / V`, with `K(x)` the rational functions in
//! the remaining symbols. Elements are coefficient vectors in `theta` of
//! length `h = deg_theta V`.

use std::sync::Arc;

use aat_algebra::{MPoly, RatFn, VarRing};

/// Dense univariate polynomial with rational-function coefficients,
/// ascending powers, no trailing zeros.
pub type UPoly = Vec<RatFn>;

pub fn trim(mut p: UPoly) -> UPoly {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn udeg(p: &UPoly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn uadd(a: &UPoly, b: &UPoly, ring: &Arc<VarRing>) -> UPoly {
    let n = a.len().max(b.len());
    let zero = RatFn::zero(ring);
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

pub fn uneg(a: &UPoly) -> UPoly {
    a.iter().map(|c| -c).collect()
}

pub fn usub(a: &UPoly, b: &UPoly, ring: &Arc<VarRing>) -> UPoly {
    uadd(a, &uneg(b), ring)
}

pub fn umul(a: &UPoly, b: &UPoly, ring: &Arc<VarRing>) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![RatFn::zero(ring); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(out)
}

pub fn uscale(a: &UPoly, c: &RatFn) -> UPoly {
    trim(a.iter().map(|x| x * c).collect())
}

/// Division with remainder over the coefficient field.
pub fn udivrem(a: &UPoly, b: &UPoly, ring: &Arc<VarRing>) -> (UPoly, UPoly) {
    let db = udeg(b).expect("division by zero polynomial");
    let lb = b[db].inverse().expect("nonzero leading coefficient");
    let mut r = a.clone();
    let mut q = vec![RatFn::zero(ring); a.len().saturating_sub(db).max(1)];
    while let Some(dr) = udeg(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] * &lb;
        q[dr - db] = c.clone();
        for (i, bc) in b.iter().enumerate() {
            r[dr - db + i] = &r[dr - db + i] - &(&c * bc);
        }
        r = trim(r);
    }
    (trim(q), r)
}

/// Extended Euclid: `(g, s)` with `s a = g (mod b)` and `g` monic.
pub fn uext_gcd(a: &UPoly, b: &UPoly, ring: &Arc<VarRing>) -> (UPoly, UPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1): (UPoly, UPoly) = (vec![RatFn::one(ring)], Vec::new());
    while !r1.is_empty() {
        let (q, r) = udivrem(&r0, &r1, ring);
        let s2 = usub(&s0, &umul(&q, &s1, ring), ring);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if let Some(d) = udeg(&r0) {
        let inv = r0[d].inverse().expect("nonzero");
        r0 = uscale(&r0, &inv);
        s0 = uscale(&s0, &inv);
    }
    (r0, s0)
}

/// Coefficients of `p` in `slot`, as rational functions.
pub fn to_upoly(p: &MPoly, slot: usize) -> UPoly {
    trim(p.coefficients(slot).into_iter().map(RatFn::from_poly).collect())
}

/// `sum c_i t^i` as a single rational function, `t` the variable in `slot`.
pub fn from_upoly(p: &UPoly, slot: usize, ring: &Arc<VarRing>) -> RatFn {
    let t = RatFn::from_poly(MPoly::slot_power(ring, slot, 1));
    let mut acc = RatFn::zero(ring);
    for c in p.iter().rev() {
        acc = &(&acc * &t) + c;
    }
    acc
}

#[derive(Debug, Clone)]
pub struct ExtField {
    pub ring: Arc<VarRing>,
    pub theta: usize,
    /// Minimal polynomial made monic over the coefficient field.
    pub modulus: UPoly,
}

pub type ExtElem = UPoly;

impl ExtField {
    pub fn new(v: &MPoly, theta: usize) -> Self {
        let ring = v.ring().clone();
        let up = to_upoly(v, theta);
        let lc = up.last().expect("nonzero").inverse().expect("nonzero");
        ExtField {
            modulus: uscale(&up, &lc),
            ring,
            theta,
        }
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn reduce(&self, p: &UPoly) -> ExtElem {
        udivrem(p, &self.modulus, &self.ring).1
    }

    pub fn from_poly(&self, p: &MPoly) -> ExtElem {
        self.reduce(&to_upoly(p, self.theta))
    }

    /// Reduces a rational function in `theta` whose denominator is
    /// invertible modulo `V`.
    pub fn from_ratfn(&self, r: &RatFn) -> Option<ExtElem> {
        let num = self.from_poly(r.numer());
        let den = self.from_poly(r.denom());
        Some(self.mul(&num, &self.inverse(&den)?))
    }

    pub fn constant(&self, c: RatFn) -> ExtElem {
        trim(vec![c])
    }

    pub fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        uadd(a, b, &self.ring)
    }

    pub fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        usub(a, b, &self.ring)
    }

    pub fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        self.reduce(&umul(a, b, &self.ring))
    }

    /// Inverse by extended Euclid against `V`; `None` for zero divisors.
    pub fn inverse(&self, a: &ExtElem) -> Option<ExtElem> {
        if a.is_empty() {
            return None;
        }
        let (g, s) = uext_gcd(a, &self.modulus, &self.ring);
        if udeg(&g) != Some(0) {
            return None;
        }
        Some(self.reduce(&s))
    }

    pub fn to_ratfn(&self, a: &ExtElem) -> RatFn {
        from_upoly(a, self.theta, &self.ring)
    }

    /// Writes `num/den` with both parts reduced modulo `V` over the
    /// coefficient field, without inverting the denominator.
    pub fn normal_form(&self, r: &RatFn) -> RatFn {
        let n = self.to_ratfn(&self.from_poly(r.numer()));
        let d = self.to_ratfn(&self.from_poly(r.denom()));
        if d.is_zero() {
            return r.clone();
        }
        &n / &d
    }

    /// Evaluates a polynomial in `slot` with coefficients in `K(x)[theta]`
    /// at an element, modulo `V`.
    pub fn eval_upoly(&self, p: &[ExtElem], at: &ExtElem) -> ExtElem {
        let mut acc: ExtElem = Vec::new();
        for c in p.iter().rev() {
            acc = self.add(&self.mul(&acc, at), c);
        }
        acc
    }

    /// GCD of polynomials whose coefficients live in the extension; `None`
    /// when a zero divisor shows up.
    pub fn gcd(&self, a: &[ExtElem], b: &[ExtElem]) -> Option<Vec<ExtElem>> {
        let trim_e = |mut p: Vec<ExtElem>| {
            while p.last().map_or(false, |c| c.is_empty()) {
                p.pop();
            }
            p
        };
        let (mut r0, mut r1) = (trim_e(a.to_vec()), trim_e(b.to_vec()));
        while !r1.is_empty() {
            let inv = self.inverse(r1.last().expect("nonempty"))?;
            let db = r1.len() - 1;
            while r0.len() > db {
                let dr = r0.len() - 1;
                let c = self.mul(&r0[dr], &inv);
                for (i, bc) in r1.iter().enumerate() {
                    r0[dr - db + i] = self.sub(&r0[dr - db + i], &self.mul(&c, bc));
                }
                r0 = trim_e(r0);
                if r0.is_empty() {
                    break;
                }
            }
            std::mem::swap(&mut r0, &mut r1);
        }
        let inv = self.inverse(r0.last()?)?;
        Some(r0.iter().map(|c| self.mul(c, &inv)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use aat_algebra::parse_poly;

    #[test]
    fn inverse_in_quadratic_extension() {
        let r = VarRing::new(["theta", "x1"], Vec::<&str>::new()).unwrap();
        let v = parse_poly("theta^2 - 4*x1^3 + 4*x1", &r).unwrap();
        let f = ExtField::new(&v, 0);
        assert_eq!(f.degree(), 2);
        let t = f.from_poly(&parse_poly("theta + x1", &r).unwrap());
        let inv = f.inverse(&t).unwrap();
        let one = f.mul(&t, &inv);
        assert_eq!(one, vec![RatFn::one(&r)]);
        // theta^2 reduces to the cubic
        let sq = f.from_poly(&parse_poly("theta^2", &r).unwrap());
        assert_eq!(f.to_ratfn(&sq).to_string(), "4*x1^3 - 4*x1");
        // 1/theta keeps its shape in normal form
        let nf = f.normal_form(&RatFn::new(MPoly::one(&r), parse_poly("theta", &r).unwrap()).unwrap());
        assert_eq!(nf.to_string(), "1/theta");
    }

    #[test]
    fn gcd_over_extension() {
        let r = VarRing::new(["theta", "z", "x1"], Vec::<&str>::new()).unwrap();
        let f = ExtField::new(&parse_poly("theta^2 - x1", &r).unwrap(), 0);
        // z^2 - x1 and z - theta share the root z = theta
        let a: Vec<ExtElem> = vec![f.constant(RatFn::from_poly(parse_poly("-x1", &r).unwrap())), Vec::new(), f.constant(RatFn::one(&r))];
        let b: Vec<ExtElem> = vec![f.from_poly(&parse_poly("-theta", &r).unwrap()), f.constant(RatFn::one(&r))];
        let g = f.gcd(&a, &b).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(f.to_ratfn(&g[0]).to_string(), "-theta");
    }
}

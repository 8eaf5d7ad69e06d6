//! Sparse multivariate polynomials over big rationals.
//!
//! Terms are kept in strictly descending lexicographic order of their
//! exponent vectors, using the ring's declaration order (variables first,
//! then parameters). That order is also the print order, so equal
//! polynomials always serialize to the same text.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{AlgebraError, Result};
use crate::rat::{to_f64, Rat};
use crate::ring::{same_ring, VarRing};

pub type Exp = u16;
pub type Monomial = SmallVec<[Exp; 16]>;

#[derive(Clone)]
pub struct MPoly {
    ring: Arc<VarRing>,
    terms: Vec<(Monomial, Rat)>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}

fn mono_divides(d: &Monomial, m: &Monomial) -> bool {
    d.iter().zip(m.iter()).all(|(x, y)| x <= y)
}

fn mono_div(m: &Monomial, d: &Monomial) -> Monomial {
    m.iter().zip(d.iter()).map(|(x, y)| x - y).collect()
}

impl MPoly {
    pub fn zero(ring: &Arc<VarRing>) -> Self {
        MPoly {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(ring: &Arc<VarRing>) -> Self {
        Self::constant(ring, Rat::one())
    }

    pub fn constant(ring: &Arc<VarRing>, c: Rat) -> Self {
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.push((SmallVec::from_elem(0, ring.arity()), c));
        }
        p
    }

    pub fn from_i64(ring: &Arc<VarRing>, c: i64) -> Self {
        Self::constant(ring, crate::rat::rat(c))
    }

    /// The polynomial consisting of a single symbol (variable or parameter).
    pub fn symbol(ring: &Arc<VarRing>, name: &str) -> Result<Self> {
        let slot = ring
            .symbol(name)
            .ok_or_else(|| AlgebraError::UnknownIdentifier(name.to_string()))?;
        Ok(Self::slot_power(ring, slot, 1))
    }

    /// A ring variable (parameters are rejected).
    pub fn var(ring: &Arc<VarRing>, name: &str) -> Result<Self> {
        let slot = ring.var(name)?;
        Ok(Self::slot_power(ring, slot, 1))
    }

    pub fn slot_power(ring: &Arc<VarRing>, slot: usize, e: Exp) -> Self {
        let mut m: Monomial = SmallVec::from_elem(0, ring.arity());
        m[slot] = e;
        MPoly {
            ring: ring.clone(),
            terms: vec![(m, Rat::one())],
        }
    }

    /// Builds a canonical polynomial from arbitrary (possibly repeated or zero) terms.
    pub fn from_terms(ring: &Arc<VarRing>, terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut acc: BTreeMap<Monomial, Rat> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.len(), ring.arity(), "exponent vector length mismatch");
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&m) {
                Some(v) => *v += c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Self::from_btree(ring, acc)
    }

    fn from_btree(ring: &Arc<VarRing>, acc: BTreeMap<Monomial, Rat>) -> Self {
        let terms = acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        MPoly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Arc<VarRing> {
        &self.ring
    }

    /// Terms in descending lexicographic order.
    pub fn terms(&self) -> &[(Monomial, Rat)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.iter().all(|&e| e == 0))
    }

    pub fn constant_value(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        self.is_constant().then(|| self.terms[0].1.clone())
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map_or(false, |c| c.is_one())
    }

    pub fn leading_term(&self) -> Option<&(Monomial, Rat)> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> Rat {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(Rat::zero)
    }

    pub fn degree_in(&self, slot: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m[slot] as u32).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, slot: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m[slot] as u32).min().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.iter().map(|&e| e as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn contains(&self, slot: usize) -> bool {
        self.terms.iter().any(|(m, _)| m[slot] > 0)
    }

    /// Slots with a nonzero exponent somewhere, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.ring.arity()).filter(|&s| self.contains(s)).collect()
    }

    /// Names of the ring variables (not parameters) this polynomial depends on.
    pub fn variables(&self) -> Vec<String> {
        self.support()
            .into_iter()
            .filter(|&s| !self.ring.is_param(s))
            .map(|s| self.ring.name(s).to_string())
            .collect()
    }

    /// Degree in the named variable.
    pub fn degree(&self, name: &str) -> Result<u32> {
        Ok(self.degree_in(self.ring.var(name)?))
    }

    fn check_ring(&self, other: &MPoly) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(AlgebraError::RingMismatch)
        }
    }

    pub fn checked_add(&self, other: &MPoly) -> Result<MPoly> {
        self.check_ring(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &MPoly) -> Result<MPoly> {
        self.check_ring(other)?;
        Ok(self.merge(other, true))
    }

    pub fn checked_mul(&self, other: &MPoly) -> Result<MPoly> {
        self.check_ring(other)?;
        Ok(self.mul_impl(other))
    }

    fn merge(&self, other: &MPoly, negate: bool) -> MPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (None, None) => unreachable!(),
            };
            match ord {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        MPoly {
            ring: self.ring.clone(),
            terms: out,
        }
    }

    fn mul_impl(&self, other: &MPoly) -> MPoly {
        if self.is_zero() || other.is_zero() {
            return MPoly::zero(&self.ring);
        }
        if other.terms.len() == 1 {
            return self.mul_term(&other.terms[0].0, &other.terms[0].1);
        }
        if self.terms.len() == 1 {
            return other.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        let mut acc: HashMap<Monomial, Rat> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = mono_mul(ma, mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let mut terms: Vec<(Monomial, Rat)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|x, y| y.0.cmp(&x.0));
        MPoly {
            ring: self.ring.clone(),
            terms,
        }
    }

    /// Multiplies by the single term `c * m`.
    pub fn mul_term(&self, m: &Monomial, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(&self.ring);
        }
        // multiplying by a monomial preserves lexicographic order
        let terms = self
            .terms
            .iter()
            .map(|(mm, cc)| (mono_mul(mm, m), cc * c))
            .collect();
        MPoly {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(&self.ring);
        }
        MPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, cc)| (m.clone(), cc * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut result = MPoly::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_impl(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_impl(&base);
            }
        }
        result
    }

    /// Power with a signed exponent; negative exponents are a domain error.
    pub fn try_pow(&self, e: i64) -> Result<MPoly> {
        if e < 0 {
            return Err(AlgebraError::Domain(format!(
                "negative exponent {e} in polynomial power"
            )));
        }
        let e = u32::try_from(e).map_err(|_| AlgebraError::Domain("exponent too large".into()))?;
        Ok(self.pow(e))
    }

    /// Formal partial derivative with respect to a ring variable.
    pub fn differentiate(&self, name: &str) -> Result<MPoly> {
        Ok(self.diff(self.ring.var(name)?))
    }

    pub fn diff(&self, slot: usize) -> MPoly {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let e = m[slot];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[slot] = e - 1;
            terms.push((m2, c * Rat::from_integer(e.into())));
        }
        // lowering one exponent can reorder terms, so re-canonicalize
        MPoly::from_terms(&self.ring, terms)
    }

    /// Divides by the leading coefficient so that the leading term is monic.
    pub fn monic(&self) -> MPoly {
        match self.terms.first() {
            None => self.clone(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
        }
    }

    /// Makes the leading coefficient positive without rescaling otherwise.
    pub fn sign_normalized(&self) -> MPoly {
        if self.leading_coeff().is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Coefficients as a polynomial in `slot`: entry `i` multiplies `slot^i`.
    pub fn coefficients(&self, slot: usize) -> Vec<MPoly> {
        let deg = self.degree_in(slot) as usize;
        let mut buckets: Vec<Vec<(Monomial, Rat)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let e = m[slot] as usize;
            let mut m2 = m.clone();
            m2[slot] = 0;
            buckets[e].push((m2, c.clone()));
        }
        buckets
            .into_iter()
            .map(|ts| {
                // removing one slot from a lex-sorted sequence keeps it sorted
                // within a fixed power of that slot
                let mut p = MPoly {
                    ring: self.ring.clone(),
                    terms: ts,
                };
                p.terms.sort_unstable_by(|x, y| y.0.cmp(&x.0));
                p
            })
            .collect()
    }

    pub fn from_coefficients(ring: &Arc<VarRing>, slot: usize, coeffs: &[MPoly]) -> MPoly {
        let mut terms = Vec::new();
        for (i, c) in coeffs.iter().enumerate() {
            for (m, cc) in &c.terms {
                let mut m2 = m.clone();
                m2[slot] += i as Exp;
                terms.push((m2, cc.clone()));
            }
        }
        MPoly::from_terms(ring, terms)
    }

    /// Leading coefficient as a polynomial in `slot`.
    pub fn lead_coeff_in(&self, slot: usize) -> MPoly {
        self.coefficients(slot).pop().unwrap_or_else(|| MPoly::zero(&self.ring))
    }

    /// Exact division. Returns `None` when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &MPoly) -> Option<MPoly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(MPoly::zero(&self.ring));
        }
        let (lm, lc) = divisor.terms[0].clone();
        if divisor.terms.len() == 1 {
            let inv = lc.recip();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                if !mono_divides(&lm, m) {
                    return None;
                }
                terms.push((mono_div(m, &lm), c * &inv));
            }
            return Some(MPoly {
                ring: self.ring.clone(),
                terms,
            });
        }
        let inv = lc.recip();
        let mut rem: BTreeMap<Monomial, Rat> = self.terms.iter().cloned().collect();
        let mut quot: Vec<(Monomial, Rat)> = Vec::new();
        while let Some((m, c)) = rem.pop_last() {
            if !mono_divides(&lm, &m) {
                return None;
            }
            let qm = mono_div(&m, &lm);
            let qc = &c * &inv;
            for (dm, dc) in divisor.terms.iter().skip(1) {
                let pm = mono_mul(&qm, dm);
                let pc = &qc * dc;
                match rem.get_mut(&pm) {
                    Some(v) => {
                        *v -= pc;
                        if v.is_zero() {
                            rem.remove(&pm);
                        }
                    }
                    None => {
                        rem.insert(pm, -pc);
                    }
                }
            }
            quot.push((qm, qc));
        }
        // quotient terms were produced in descending order
        Some(MPoly {
            ring: self.ring.clone(),
            terms: quot,
        })
    }

    /// Substitutes exact rational values for some slots.
    pub fn eval_partial(&self, values: &[(usize, Rat)]) -> MPoly {
        let mut powers: HashMap<(usize, Exp), Rat> = HashMap::new();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let mut c2 = c.clone();
            for (slot, v) in values {
                let e = m[*slot];
                if e == 0 {
                    continue;
                }
                m2[*slot] = 0;
                let p = powers
                    .entry((*slot, e))
                    .or_insert_with(|| num_traits::pow(v.clone(), e as usize));
                c2 *= &*p;
            }
            terms.push((m2, c2));
        }
        MPoly::from_terms(&self.ring, terms)
    }

    /// Replaces a slot by a polynomial (composition).
    pub fn compose(&self, slot: usize, value: &MPoly) -> MPoly {
        let coeffs = self.coefficients(slot);
        // Horner in the substituted slot
        let mut acc = MPoly::zero(&self.ring);
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    /// Moves the polynomial into `target`, renaming symbols through `rename`
    /// (names not listed keep their own name).
    pub fn to_ring(&self, target: &Arc<VarRing>, rename: &[(&str, &str)]) -> Result<MPoly> {
        let arity = self.ring.arity();
        let mut slot_map = Vec::with_capacity(arity);
        for s in 0..arity {
            if !self.contains(s) {
                slot_map.push(None);
                continue;
            }
            let name = self.ring.name(s);
            let new_name = rename
                .iter()
                .find(|(from, _)| *from == name)
                .map(|(_, to)| *to)
                .unwrap_or(name);
            let t = target
                .symbol(new_name)
                .ok_or_else(|| AlgebraError::UnknownIdentifier(new_name.to_string()))?;
            slot_map.push(Some(t));
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut m2: Monomial = SmallVec::from_elem(0, target.arity());
            for (s, &e) in m.iter().enumerate() {
                if e > 0 {
                    m2[slot_map[s].expect("slot present")] += e;
                }
            }
            (m2, c.clone())
        });
        Ok(MPoly::from_terms(target, terms))
    }

    /// Numeric evaluation; `values` is indexed by slot and must cover the
    /// whole ring (unused slots may hold anything).
    pub fn eval_complex(&self, values: &[Complex64]) -> Complex64 {
        self.eval_with_scale(values).0
    }

    /// Value together with the largest magnitude of an individual term.
    pub fn eval_with_scale(&self, values: &[Complex64]) -> (Complex64, f64) {
        let mut sum = Complex64::zero();
        let mut scale = 0.0f64;
        let mut cache: HashMap<(usize, Exp), Complex64> = HashMap::new();
        for (m, c) in &self.terms {
            let mut t = Complex64::new(to_f64(c), 0.0);
            for (s, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = *cache.entry((s, e)).or_insert_with(|| values[s].powi(e as i32));
                t *= p;
            }
            scale = scale.max(t.norm());
            sum += t;
        }
        (sum, scale)
    }

    /// Numeric evaluation with named bindings; every symbol the polynomial
    /// depends on must be bound.
    pub fn eval_named(&self, lookup: impl Fn(&str) -> Option<Complex64>) -> Result<Complex64> {
        let mut values = vec![Complex64::zero(); self.ring.arity()];
        for s in self.support() {
            let name = self.ring.name(s);
            values[s] = lookup(name).ok_or_else(|| {
                if self.ring.is_param(s) {
                    AlgebraError::UnboundParameter(name.to_string())
                } else {
                    AlgebraError::UnboundVariable(name.to_string())
                }
            })?;
        }
        Ok(self.eval_complex(&values))
    }

    /// Splits off the largest power of `slot` dividing every term.
    pub fn strip_power(&self, slot: usize) -> (u32, MPoly) {
        let k = self.min_degree_in(slot);
        if k == 0 || self.is_zero() {
            return (0, self.clone());
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut m2 = m.clone();
            m2[slot] -= k as Exp;
            (m2, c.clone())
        });
        (k, MPoly::from_terms(&self.ring, terms))
    }

    pub(crate) fn format_with(&self, f: &mut dyn fmt::Write) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let ring = &self.ring;
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else if negative {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            // parameters first: they play the role of coefficients
            let order = (ring.num_vars()..ring.arity()).chain(0..ring.num_vars());
            for s in order {
                let e = m[s];
                if e == 0 {
                    continue;
                }
                if e == 1 {
                    factors.push(ring.name(s).to_string());
                } else {
                    factors.push(format!("{}^{}", ring.name(s), e));
                }
            }
            let coeff_text = abs.to_string();
            if factors.is_empty() {
                f.write_str(&coeff_text)?;
            } else {
                if !abs.is_one() {
                    f.write_str(&coeff_text)?;
                    f.write_str("*")?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for MPoly {}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.format_with(f)
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}

// Operator forms panic on ring mismatch; the `checked_*` methods report it.
macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&MPoly> for &MPoly {
            type Output = MPoly;
            fn $method(self, rhs: &MPoly) -> MPoly {
                self.$checked(rhs).expect("polynomial ring mismatch")
            }
        }
        impl $trait<MPoly> for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: MPoly) -> MPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&MPoly> for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: &MPoly) -> MPoly {
                (&self).$method(rhs)
            }
        }
        impl $trait<MPoly> for &MPoly {
            type Output = MPoly;
            fn $method(self, rhs: MPoly) -> MPoly {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn ring() -> Arc<VarRing> {
        VarRing::new(["theta", "x1", "y1"], ["g2", "g3"]).unwrap()
    }

    fn v(r: &Arc<VarRing>, n: &str) -> MPoly {
        MPoly::symbol(r, n).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let r = ring();
        let x = v(&r, "x1");
        let one = MPoly::one(&r);
        let p = (&x + &one) * (&x - &one);
        assert_eq!(p.to_string(), "x1^2 - 1");
    }

    #[test]
    fn additive_identity_and_binomial() {
        let r = ring();
        let x = v(&r, "x1");
        let y = v(&r, "y1");
        let p = &x + &y;
        assert_eq!(&p + &MPoly::zero(&r), p);
        assert_eq!(p.pow(2).to_string(), "x1^2 + 2*x1*y1 + y1^2");
    }

    #[test]
    fn negative_power_is_domain_error() {
        let r = ring();
        assert!(matches!(v(&r, "x1").try_pow(-1), Err(AlgebraError::Domain(_))));
    }

    #[test]
    fn ring_mismatch_is_structural_error() {
        let a = v(&ring(), "x1");
        let other = VarRing::new(["x1"], []).unwrap();
        let b = MPoly::var(&other, "x1").unwrap();
        assert_eq!(a.checked_add(&b), Err(AlgebraError::RingMismatch));
    }

    #[test]
    fn derivatives() {
        let r = ring();
        let x = v(&r, "x1");
        assert_eq!(x.pow(3).differentiate("x1").unwrap().to_string(), "3*x1^2");
        assert!(v(&r, "y1").pow(2).differentiate("x1").unwrap().is_zero());
        let t = v(&r, "theta");
        let p = t.pow(2) - x.pow(3).scale(&rat(4)) + v(&r, "g2") * &x + v(&r, "g3");
        assert_eq!(p.to_string(), "theta^2 - 4*x1^3 + g2*x1 + g3");
        assert_eq!(p.differentiate("theta").unwrap().to_string(), "2*theta");
        assert!(matches!(p.differentiate("g2"), Err(AlgebraError::UnknownVariable(_))));
        assert!(matches!(p.differentiate("q"), Err(AlgebraError::UnknownVariable(_))));
    }

    #[test]
    fn coefficient_roundtrip() {
        let r = ring();
        let x = v(&r, "x1");
        let y = v(&r, "y1");
        let p = x.pow(2) * &y + &x * y.pow(3) - MPoly::from_i64(&r, 5);
        let slot = r.var("x1").unwrap();
        let cs = p.coefficients(slot);
        assert_eq!(cs.len(), 3);
        assert_eq!(MPoly::from_coefficients(&r, slot, &cs), p);
    }

    #[test]
    fn exact_division() {
        let r = ring();
        let x = v(&r, "x1");
        let y = v(&r, "y1");
        let a = &x + &y;
        let b = &x - &y.pow(2);
        let p = &a * &b;
        assert_eq!(p.exact_div(&a), Some(b.clone()));
        assert_eq!(p.exact_div(&b), Some(a));
        assert_eq!((&p + &MPoly::one(&r)).exact_div(&b), None);
    }

    #[test]
    fn partial_evaluation_and_rename() {
        let r = ring();
        let x = v(&r, "x1");
        let y = v(&r, "y1");
        let p = &x * &y;
        let s = r.var("y1").unwrap();
        assert_eq!(p.eval_partial(&[(s, rat(1))]), x);
        let swapped = p.to_ring(&r, &[("x1", "y1"), ("y1", "x1")]).unwrap();
        assert_eq!(swapped, p);
        let q = x.pow(2) + &y;
        assert_eq!(q.to_ring(&r, &[("x1", "y1"), ("y1", "x1")]).unwrap(), y.pow(2) + &x);
    }
}

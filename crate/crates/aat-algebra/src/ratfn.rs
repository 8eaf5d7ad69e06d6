//! Rational functions: reduced quotients of polynomials with monic denominator.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::One;

use crate::error::{AlgebraError, Result};
use crate::gcd::gcd;
use crate::mpoly::MPoly;
use crate::rat::Rat;
use crate::ring::VarRing;

/// Denominators smaller than this are reported as poles during evaluation.
pub const POLE_THRESHOLD: f64 = 1e-300;

#[derive(Clone, PartialEq, Eq)]
pub struct RatFn {
    num: MPoly,
    den: MPoly,
}

impl RatFn {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if num.ring() != den.ring() {
            return Err(AlgebraError::RingMismatch);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: MPoly, den: MPoly) -> Self {
        if num.is_zero() {
            let ring = den.ring().clone();
            return RatFn {
                num,
                den: MPoly::one(&ring),
            };
        }
        let g = gcd(&num, &den);
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coeff();
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFn { num, den }
    }

    pub fn from_poly(p: MPoly) -> Self {
        let ring = p.ring().clone();
        RatFn {
            num: p,
            den: MPoly::one(&ring),
        }
    }

    pub fn zero(ring: &Arc<VarRing>) -> Self {
        Self::from_poly(MPoly::zero(ring))
    }

    pub fn one(ring: &Arc<VarRing>) -> Self {
        Self::from_poly(MPoly::one(ring))
    }

    pub fn constant(ring: &Arc<VarRing>, c: Rat) -> Self {
        Self::from_poly(MPoly::constant(ring, c))
    }

    pub fn ring(&self) -> &Arc<VarRing> {
        self.num.ring()
    }

    pub fn numer(&self) -> &MPoly {
        &self.num
    }

    pub fn denom(&self) -> &MPoly {
        &self.den
    }

    pub fn into_parts(self) -> (MPoly, MPoly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_polynomial(&self) -> Option<&MPoly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn checked_add(&self, o: &RatFn) -> Result<RatFn> {
        if self.den == o.den {
            return RatFn::new(self.num.checked_add(&o.num)?, self.den.clone());
        }
        let num = self.num.checked_mul(&o.den)?.checked_add(&o.num.checked_mul(&self.den)?)?;
        RatFn::new(num, self.den.checked_mul(&o.den)?)
    }

    pub fn checked_sub(&self, o: &RatFn) -> Result<RatFn> {
        self.checked_add(&-o)
    }

    pub fn checked_mul(&self, o: &RatFn) -> Result<RatFn> {
        RatFn::new(self.num.checked_mul(&o.num)?, self.den.checked_mul(&o.den)?)
    }

    pub fn checked_div(&self, o: &RatFn) -> Result<RatFn> {
        if o.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        RatFn::new(self.num.checked_mul(&o.den)?, self.den.checked_mul(&o.num)?)
    }

    pub fn inverse(&self) -> Result<RatFn> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        RatFn::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &Rat) -> RatFn {
        RatFn {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: i64) -> Result<RatFn> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Ok(RatFn {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    /// Quotient-rule derivative with respect to a ring variable.
    pub fn differentiate(&self, name: &str) -> Result<RatFn> {
        let slot = self.ring().var(name)?;
        Ok(self.diff(slot))
    }

    pub fn diff(&self, slot: usize) -> RatFn {
        let dn = self.num.diff(slot);
        if self.den.is_constant() {
            return RatFn::reduce(dn, self.den.clone());
        }
        let dd = self.den.diff(slot);
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        RatFn::reduce(num, self.den.pow(2))
    }

    /// Numeric evaluation; fails with [`AlgebraError::Pole`] when the
    /// denominator is (numerically) zero.
    pub fn eval_complex(&self, values: &[Complex64]) -> Result<Complex64> {
        let d = self.den.eval_complex(values);
        if d.norm() < POLE_THRESHOLD {
            return Err(AlgebraError::Pole(d.norm()));
        }
        Ok(self.num.eval_complex(values) / d)
    }

    /// Moves both parts into another ring (see [`MPoly::to_ring`]).
    pub fn to_ring(&self, target: &Arc<VarRing>, rename: &[(&str, &str)]) -> Result<RatFn> {
        RatFn::new(self.num.to_ring(target, rename)?, self.den.to_ring(target, rename)?)
    }

    pub fn eval_partial(&self, values: &[(usize, Rat)]) -> Result<RatFn> {
        RatFn::new(self.num.eval_partial(values), self.den.eval_partial(values))
    }
}

/// Substitutes rational functions for slots of `p` simultaneously.
pub fn substitute(p: &MPoly, bindings: &[(usize, RatFn)]) -> Result<RatFn> {
    let ring = p.ring().clone();
    let mut acc = RatFn::zero(&ring);
    if p.is_zero() {
        return Ok(acc);
    }
    // group by monomial to avoid recomputing powers
    let mut cache: std::collections::HashMap<(usize, u16), RatFn> = Default::default();
    for (m, c) in p.terms() {
        let mut rest = m.clone();
        let mut term = RatFn::constant(&ring, c.clone());
        for (slot, value) in bindings {
            let e = m[*slot];
            if e == 0 {
                continue;
            }
            rest[*slot] = 0;
            let pw = match cache.get(&(*slot, e)) {
                Some(v) => v.clone(),
                None => {
                    let v = value.pow(e as i64)?;
                    cache.insert((*slot, e), v.clone());
                    v
                }
            };
            term = term.checked_mul(&pw)?;
        }
        let mono = MPoly::from_terms(&ring, [(rest, Rat::one())]);
        term = term.checked_mul(&RatFn::from_poly(mono))?;
        acc = acc.checked_add(&term)?;
    }
    Ok(acc)
}

fn needs_parens(p: &MPoly) -> bool {
    p.num_terms() > 1
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if needs_parens(&self.num) {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if needs_parens(&self.den) || self.den.terms()[0].1 != Rat::one() {
            write!(f, "/({})", self.den)
        } else {
            write!(f, "/{}", self.den)
        }
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFn({self})")
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&RatFn> for &RatFn {
            type Output = RatFn;
            fn $method(self, rhs: &RatFn) -> RatFn {
                self.$checked(rhs).expect("rational function operation failed")
            }
        }
        impl $trait<RatFn> for RatFn {
            type Output = RatFn;
            fn $method(self, rhs: RatFn) -> RatFn {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        -&self
    }
}

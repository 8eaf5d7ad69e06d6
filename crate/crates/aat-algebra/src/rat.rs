//! Big-rational coefficient helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact coefficient type. Always reduced, with a positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact square root of a rational number, if one exists.
pub fn sqrt_exact(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let n = int_sqrt_exact(r.numer())?;
    let d = int_sqrt_exact(r.denom())?;
    Some(Rat::new(n, d))
}

fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

/// Parses `7`, `-3`, `7/2` or a finite decimal such as `0.25` into an exact rational.
pub fn parse_rat(text: &str) -> Option<Rat> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        if frac_part.is_empty() || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let digits = format!("{int_digits}{frac_part}");
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), frac_part.len());
        let r = Rat::new(n, d);
        return Some(if negative { -r } else { r });
    }
    t.parse::<BigInt>().ok().map(Rat::from_integer)
}

/// Rational reconstruction of a floating value by continued-fraction
/// convergents.
///
/// Returns the first convergent `p/q` with `q <= max_den` that lies within
/// `tol * max(1, |x|)` of `x`.
pub fn reconstruct_rational(x: f64, max_den: u64, tol: f64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let bound = tol * x.abs().max(1.0);
    let (mut hm2, mut hm1) = (BigInt::zero(), BigInt::one());
    let (mut km2, mut km1) = (BigInt::one(), BigInt::zero());
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        let a_int = BigInt::from(a as i128);
        let hn = &a_int * &hm1 + &hm2;
        let kn = &a_int * &km1 + &km2;
        if kn > BigInt::from(max_den) {
            return None;
        }
        let cand = Rat::new(hn.clone(), kn.clone());
        if (to_f64(&cand) - x).abs() <= bound {
            return Some(cand);
        }
        let frac = rest - a;
        if frac.abs() < 1e-300 {
            return None;
        }
        rest = 1.0 / frac;
        hm2 = hm1;
        hm1 = hn;
        km2 = km1;
        km1 = kn;
    }
    None
}

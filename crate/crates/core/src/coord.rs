//! Scalar coordinates that are exact rationals when they can be and floats
//! when they must be.
//!
//! Piecewise-affine data coming from valuation theory is exactly rational;
//! data coming from quadrature is not. `Coord` keeps the two apart: any
//! arithmetic between two rationals stays rational, anything touching a
//! float collapses to `f64`. Comparisons between two rationals are exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub enum Coord {
    Rat(BigRational),
    F64(f64),
}

impl Coord {
    pub fn from_int(n: i64) -> Self {
        Coord::Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Coord::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Coord::Rat(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Coord::Rat(r) => rational_to_f64(r),
            Coord::F64(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coord::Rat(r) => Some(r),
            Coord::F64(_) => None,
        }
    }

    pub fn zero() -> Self {
        Coord::Rat(BigRational::zero())
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Coord::Rat(_) => true,
            Coord::F64(x) => x.is_finite(),
        }
    }
}

/// `f64` conversion that survives numerator/denominator magnitudes beyond
/// the exponent range of `f64` (the naive num/den quotient turns into
/// inf/inf there).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    if r.is_zero() {
        return 0.0;
    }
    let neg = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    // shift so the integer quotient carries ~80 significant bits
    let shift: i64 = den.bits() as i64 + 80 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let mut x = q.to_f64().unwrap_or(f64::INFINITY) * (2.0f64).powi(-shift as i32);
    if neg {
        x = -x;
    }
    x
}

impl PartialEq for Coord {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Coord::Rat(a), Coord::Rat(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Coord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Coord::Rat(a), Coord::Rat(b)) => a.partial_cmp(b),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

macro_rules! coord_binop {
    ($fn_name:ident, $op:tt) => {
        pub fn $fn_name(&self, other: &Coord) -> Coord {
            match (self, other) {
                (Coord::Rat(a), Coord::Rat(b)) => Coord::Rat(a $op b),
                _ => Coord::F64(self.to_f64() $op other.to_f64()),
            }
        }
    };
}

impl Coord {
    coord_binop!(add, +);
    coord_binop!(sub, -);
    coord_binop!(mul, *);

    pub fn div(&self, other: &Coord) -> Coord {
        match (self, other) {
            (Coord::Rat(a), Coord::Rat(b)) if !b.is_zero() => Coord::Rat(a / b),
            _ => Coord::F64(self.to_f64() / other.to_f64()),
        }
    }

    pub fn neg(&self) -> Coord {
        match self {
            Coord::Rat(a) => Coord::Rat(-a),
            Coord::F64(x) => Coord::F64(-x),
        }
    }

    pub fn mul_rat(&self, r: &BigRational) -> Coord {
        match self {
            Coord::Rat(a) => Coord::Rat(a * r),
            Coord::F64(x) => Coord::F64(x * rational_to_f64(r)),
        }
    }

    pub fn div_rat(&self, r: &BigRational) -> Coord {
        assert!(!r.is_zero(), "division by zero rational");
        match self {
            Coord::Rat(a) => Coord::Rat(a / r),
            Coord::F64(x) => Coord::F64(x / rational_to_f64(r)),
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Rat(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Coord::F64(x) => write!(f, "{x}"),
        }
    }
}

/// Open interval with optionally infinite ends. `lo == None` means -inf,
/// `hi == None` means +inf.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: Option<Coord>,
    pub hi: Option<Coord>,
}

impl Interval {
    pub fn new(lo: Option<Coord>, hi: Option<Coord>) -> Result<Self> {
        if let (Some(a), Some(b)) = (&lo, &hi) {
            if a >= b {
                return Err(Error::argument(format!(
                    "empty interval: lo {a} >= hi {b}"
                )));
            }
        }
        Ok(Interval { lo, hi })
    }

    pub fn whole_line() -> Self {
        Interval { lo: None, hi: None }
    }

    pub fn bounded(lo: Coord, hi: Coord) -> Result<Self> {
        Interval::new(Some(lo), Some(hi))
    }

    /// Strict interior membership; the ends of the open interval are out.
    pub fn contains(&self, x: &Coord) -> bool {
        if let Some(a) = &self.lo {
            if x <= a {
                return false;
            }
        }
        if let Some(b) = &self.hi {
            if x >= b {
                return false;
            }
        }
        true
    }

    /// A deterministic interior point, used for anchors.
    pub fn interior_point(&self) -> Coord {
        let two = Coord::from_int(2);
        let one = Coord::from_int(1);
        match (&self.lo, &self.hi) {
            (Some(a), Some(b)) => a.add(b).div(&two),
            (Some(a), None) => a.add(&one),
            (None, Some(b)) => b.sub(&one),
            (None, None) => Coord::zero(),
        }
    }

    /// Pointwise scaling x -> x/n of every element, for n >= 1.
    pub fn scale_down(&self, n: u32) -> Self {
        let nn = BigRational::from_integer(BigInt::from(n));
        Interval {
            lo: self.lo.as_ref().map(|a| a.div_rat(&nn)),
            hi: self.hi.as_ref().map(|b| b.div_rat(&nn)),
        }
    }
}

/// Parses "p/q", a bare integer string, or a decimal into a rational.
/// Decimal strings are read exactly (base-10 scaled integers).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::argument(format!("cannot parse rational from {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::argument(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let digits: String = format!("{int_part}{frac_part}");
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = BigInt::from(10u32).pow(frac_part.len() as u32);
        return Ok(BigRational::new(n, d));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

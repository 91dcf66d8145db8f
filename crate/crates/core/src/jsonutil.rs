//! Conversions between scalar types and their JSON wire forms.
//!
//! Wire conventions: exact rationals are `"p/q"` strings, floats are JSON
//! numbers, integer JSON numbers are read back as exact rationals, and
//! infinite interval ends are the strings `"inf"` / `"-inf"`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::coord::{format_rational, parse_rational, Coord, Interval};
use crate::error::{Error, Result};

pub(crate) fn rat_to_value(r: &BigRational) -> Value {
    Value::String(format_rational(r))
}

pub(crate) fn rat_from_value(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(BigInt::from(i)))
            } else {
                Err(Error::argument(format!(
                    "expected exact rational, got non-integer number {n}"
                )))
            }
        }
        other => Err(Error::argument(format!("expected rational, got {other}"))),
    }
}

pub(crate) fn coord_to_value(c: &Coord) -> Value {
    match c {
        Coord::Rat(r) => rat_to_value(r),
        Coord::F64(x) => json!(x),
    }
}

pub(crate) fn coord_from_value(v: &Value) -> Result<Coord> {
    match v {
        Value::String(s) => Ok(Coord::Rat(parse_rational(s)?)),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Coord::from_int(i))
            } else if let Some(x) = n.as_f64() {
                Ok(Coord::F64(x))
            } else {
                Err(Error::argument(format!("unrepresentable number {n}")))
            }
        }
        other => Err(Error::argument(format!("expected coordinate, got {other}"))),
    }
}

pub(crate) fn bound_to_value(b: &Option<Coord>, positive_end: bool) -> Value {
    match b {
        Some(c) => coord_to_value(c),
        None => Value::String(if positive_end { "inf" } else { "-inf" }.to_string()),
    }
}

pub(crate) fn bound_from_value(v: &Value) -> Result<Option<Coord>> {
    if let Value::String(s) = v {
        let t = s.trim();
        if t == "inf" || t == "+inf" {
            return Ok(None);
        }
        if t == "-inf" {
            return Ok(None);
        }
    }
    coord_from_value(v).map(Some)
}

pub(crate) fn interval_to_value(iv: &Interval) -> Value {
    json!([
        bound_to_value(&iv.lo, false),
        bound_to_value(&iv.hi, true)
    ])
}

pub(crate) fn interval_from_value(v: &Value) -> Result<Interval> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::argument(format!("expected [lo, hi] interval, got {v}")))?;
    if arr.len() != 2 {
        return Err(Error::argument("interval must have exactly two ends"));
    }
    // "-inf"/"inf" both map to None; position decides which end is open
    let lo = bound_from_value(&arr[0])?;
    let hi = bound_from_value(&arr[1])?;
    Interval::new(lo, hi)
}

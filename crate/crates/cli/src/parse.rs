//! Parsers for the compact value syntaxes the command line accepts:
//! integer and real ranges `lo:hi`, grids `NxM`, exponential sums
//! `"1,-1@log2"`, logarithmic bumps `bump:a,b`, and polynomial test
//! functions `poly:c0,c1,...`.

use num_complex::Complex64;
use tropos_core::weil::TestFunction;
use tropos_core::{Error, Result};

fn two_parts<'a>(s: &'a str, sep: char, what: &str) -> Result<(&'a str, &'a str)> {
    let parts: Vec<&str> = s.split(sep).collect();
    if parts.len() != 2 {
        return Err(Error::argument(format!(
            "expected {what} as <lo>{sep}<hi>, got {s:?}"
        )));
    }
    Ok((parts[0].trim(), parts[1].trim()))
}

/// `-65536:65536` → inclusive integer bounds.
pub fn i64_range(s: &str) -> Result<(i64, i64)> {
    let (a, b) = two_parts(s, ':', "an integer range")?;
    let lo: i64 = a
        .parse()
        .map_err(|_| Error::argument(format!("bad integer {a:?} in range {s:?}")))?;
    let hi: i64 = b
        .parse()
        .map_err(|_| Error::argument(format!("bad integer {b:?} in range {s:?}")))?;
    if lo > hi {
        return Err(Error::argument(format!("empty range {s:?}")));
    }
    Ok((lo, hi))
}

/// `-2:2` → real bounds, lo < hi.
pub fn f64_range(s: &str) -> Result<(f64, f64)> {
    let (a, b) = two_parts(s, ':', "a real range")?;
    let lo: f64 = a
        .parse()
        .map_err(|_| Error::argument(format!("bad number {a:?} in range {s:?}")))?;
    let hi: f64 = b
        .parse()
        .map_err(|_| Error::argument(format!("bad number {b:?} in range {s:?}")))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::argument(format!("need finite lo < hi in {s:?}")));
    }
    Ok((lo, hi))
}

/// `64x64` → grid extents.
pub fn grid(s: &str) -> Result<(usize, usize)> {
    let (a, b) = two_parts(s, 'x', "a grid")?;
    let nx: usize = a
        .parse()
        .map_err(|_| Error::argument(format!("bad grid width {a:?} in {s:?}")))?;
    let ny: usize = b
        .parse()
        .map_err(|_| Error::argument(format!("bad grid height {b:?} in {s:?}")))?;
    if nx == 0 || ny == 0 {
        return Err(Error::argument(format!("grid {s:?} has an empty side")));
    }
    Ok((nx, ny))
}

/// One term of an exponential-sum spec: `coef`, `coef@freq`, or
/// `coef@logN` (frequency `ln N`). A bare coefficient has frequency 0.
fn exp_term(term: &str) -> Result<(f64, Complex64)> {
    let (coef_s, freq_s) = match term.split_once('@') {
        Some((c, f)) => (c.trim(), Some(f.trim())),
        None => (term.trim(), None),
    };
    let coef: f64 = coef_s
        .parse()
        .map_err(|_| Error::argument(format!("bad coefficient {coef_s:?} in term {term:?}")))?;
    let freq = match freq_s {
        None => 0.0,
        Some(f) => {
            if let Some(n) = f.strip_prefix("log") {
                let base: f64 = n.parse().map_err(|_| {
                    Error::argument(format!("bad log frequency {f:?} in term {term:?}"))
                })?;
                if !(base > 0.0) {
                    return Err(Error::argument(format!(
                        "log frequency needs a positive base, got {f:?}"
                    )));
                }
                base.ln()
            } else {
                f.parse().map_err(|_| {
                    Error::argument(format!("bad frequency {f:?} in term {term:?}"))
                })?
            }
        }
    };
    Ok((freq, Complex64::new(coef, 0.0)))
}

/// `"1,-1@log2"` → frequency/coefficient pairs for the sum
/// `sum_k c_k e^(-freq_k * s)`; here 1 - 2^(-s).
pub fn exp_sum(s: &str) -> Result<Vec<(f64, Complex64)>> {
    let terms: Vec<&str> = s.split(',').filter(|t| !t.trim().is_empty()).collect();
    if terms.is_empty() {
        return Err(Error::argument(format!("empty exponential sum {s:?}")));
    }
    terms.into_iter().map(exp_term).collect()
}

/// `bump:2.1,2.9` → a smooth log-scale bump whose support is exactly
/// the interval `[2.1, 2.9]` (center at the log midpoint, width one
/// sixth of the log length per side).
pub fn bump(s: &str) -> Result<TestFunction> {
    let body = s
        .strip_prefix("bump:")
        .ok_or_else(|| Error::argument(format!("expected bump:<a>,<b>, got {s:?}")))?;
    let (a_s, b_s) = two_parts(body, ',', "bump endpoints")?;
    let a: f64 = a_s
        .parse()
        .map_err(|_| Error::argument(format!("bad bump endpoint {a_s:?}")))?;
    let b: f64 = b_s
        .parse()
        .map_err(|_| Error::argument(format!("bad bump endpoint {b_s:?}")))?;
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(Error::argument(format!(
            "bump needs 0 < a < b, got {s:?}"
        )));
    }
    let (la, lb) = (a.ln(), b.ln());
    TestFunction::gaussian_bump(0.5 * (la + lb), (lb - la) / 12.0)
}

/// `poly:c0,c1,...` (optionally prefixed `psi=`) → ascending
/// coefficients of a polynomial test function.
pub fn poly(s: &str) -> Result<Vec<f64>> {
    let body = s.strip_prefix("psi=").unwrap_or(s);
    let body = body
        .strip_prefix("poly:")
        .ok_or_else(|| Error::argument(format!("expected [psi=]poly:<c0,c1,...>, got {s:?}")))?;
    let coeffs: Vec<f64> = body
        .split(',')
        .map(|c| {
            c.trim()
                .parse()
                .map_err(|_| Error::argument(format!("bad polynomial coefficient {c:?} in {s:?}")))
        })
        .collect::<Result<_>>()?;
    if coeffs.is_empty() {
        return Err(Error::argument(format!("empty polynomial in {s:?}")));
    }
    Ok(coeffs)
}

/// Evaluates ascending coefficients at a point (Horner).
pub fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

//! `tropos jensen`: circle-averaged log-modulus profile of a complex
//! polynomial given by its roots. Reads a JSON root list, emits the
//! convex piecewise-affine profile over `[xmin, xmax]` (in `x = -log r`
//! coordinates) together with its breakpoint divisor.

use num_complex::Complex64;
use serde_json::json;

use tropos_core::jensen::AnnulusFunction;
use tropos_core::{Error, Result};

use crate::cmd::{check, required, Ctx, Format};
use crate::output::{write_json, Meta};
use crate::JensenArgs;

fn f64_at(v: &serde_json::Value, what: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::argument(format!("{what} must be a number, got {v}")))
}

/// Root list format: `{"leading": [re, im], "roots": [[re, im, mult],
/// ...], "annulus": [r_lo, r_hi]}`; `leading` defaults to 1.
fn parse_roots(v: &serde_json::Value) -> Result<(Complex64, Vec<(Complex64, u32)>, (f64, f64))> {
    let leading = match v.get("leading") {
        None => Complex64::new(1.0, 0.0),
        Some(serde_json::Value::Array(a)) if a.len() == 2 => {
            Complex64::new(f64_at(&a[0], "leading[0]")?, f64_at(&a[1], "leading[1]")?)
        }
        Some(other) => {
            return Err(Error::argument(format!(
                "\"leading\" must be [re, im], got {other}"
            )))
        }
    };
    let roots_v = v
        .get("roots")
        .and_then(serde_json::Value::as_array)
        .ok_or_else(|| Error::argument("missing \"roots\" array of [re, im, mult]"))?;
    let mut roots = Vec::with_capacity(roots_v.len());
    for r in roots_v {
        let a = r
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| Error::argument(format!("root entry must be [re, im, mult], got {r}")))?;
        let mult = a[2]
            .as_u64()
            .filter(|m| *m >= 1)
            .ok_or_else(|| Error::argument(format!("multiplicity must be a positive integer, got {}", a[2])))?;
        roots.push((
            Complex64::new(f64_at(&a[0], "root re")?, f64_at(&a[1], "root im")?),
            u32::try_from(mult).map_err(|_| Error::argument("multiplicity out of range"))?,
        ));
    }
    let ann = v
        .get("annulus")
        .and_then(serde_json::Value::as_array)
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::argument("missing \"annulus\" [r_lo, r_hi]"))?;
    Ok((
        leading,
        roots,
        (f64_at(&ann[0], "annulus lo")?, f64_at(&ann[1], "annulus hi")?),
    ))
}

pub fn run(ctx: &Ctx, a: JensenArgs) -> Result<()> {
    if a.selftest {
        return selftest();
    }
    ctx.require_format(Format::Json, "the profile report")?;
    let path = required(a.roots, "roots")?;
    let xmin = required(a.xmin, "xmin")?;
    let xmax = required(a.xmax, "xmax")?;
    let mut meta = Meta::new(format!(
        "jensen --roots {} --xmin {xmin} --xmax {xmax} --grid {} --nodes {}",
        path.display(),
        a.grid,
        a.nodes
    ));
    let bytes = meta.read_input("roots", &path)?;
    let value: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| Error::argument(format!("invalid JSON in {}: {e}", path.display())))?;
    let (leading, roots, annulus) = parse_roots(&value)?;
    let f = AnnulusFunction::from_roots(leading, &roots, annulus)?;
    let profile = f.tropical_profile(xmin, xmax, a.grid, a.nodes)?;
    let zeros = profile.laplacian();
    write_json(
        ctx.out.as_deref(),
        &meta,
        json!({
            "pwa": profile.to_json(),
            "zeros": zeros.to_json(),
        }),
    )
}

fn selftest() -> Result<()> {
    // a constant has constant circle means: log|c| at every radius
    let c = Complex64::new(-3.0, 4.0); // |c| = 5
    let f = AnnulusFunction::from_coeffs(&[c], (0.1, 10.0))?;
    let t = f.tropicalize(0.4, 64)?;
    check(
        "constant function mean is log of its modulus",
        (t - 5f64.ln()).abs() < 1e-12,
        || format!("got {t}, want {}", 5f64.ln()),
    )?;

    // z^3 winds three times around every circle in the annulus and has
    // circle mean exactly -3x at x = -log r
    let cube = AnnulusFunction::from_coeffs(
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ],
        (0.1, 10.0),
    )?;
    let w = cube.winding_number(0.7, 64)?;
    check("cube winds three times", w == 3, || format!("winding {w}"))?;
    let m = cube.tropicalize(0.7, 64)?;
    check(
        "cube circle mean is minus three x",
        (m - (-3.0 * 0.7)).abs() < 1e-12,
        || format!("got {m}"),
    )?;

    // a zero-free function has an affine profile and an empty divisor
    let exp = AnnulusFunction::from_exp_terms(
        &[(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))],
        (0.05, 20.0),
    )?;
    let profile = exp.tropical_profile(-2.0, 2.0, 12, 64)?;
    check(
        "zero-free profile stays affine",
        profile.breakpoints().is_empty() && profile.laplacian().atoms().is_empty(),
        || format!("breakpoints {:?}", profile.breakpoints()),
    )?;
    Ok(())
}

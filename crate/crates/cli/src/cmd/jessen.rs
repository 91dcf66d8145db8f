//! `tropos jessen`: zero-density report for a finite exponential sum
//! over a vertical strip, computed through two independent routes (mean
//! log-modulus derivative difference vs. argument-principle count) and
//! emitted as JSON.

use num_complex::Complex64;
use serde_json::json;

use tropos_core::jessen::{jessen_function, zero_count, zero_density_check, ExponentialSum};
use tropos_core::Result;

use crate::cmd::{check, required, Ctx, Format};
use crate::output::{write_json, Meta};
use crate::parse::{exp_sum, f64_range};
use crate::JessenArgs;

pub fn run(ctx: &Ctx, a: JessenArgs) -> Result<()> {
    if a.selftest {
        return selftest();
    }
    ctx.require_format(Format::Json, "the density report")?;
    let sum = required(a.sum, "sum")?;
    let strip = required(a.strip, "strip")?;
    let t_max = required(a.t, "T")?;
    let meta = Meta::new(format!(
        "jessen --sum {sum} --strip {strip} --T {t_max} --seed {}",
        ctx.seed
    ));
    let terms = exp_sum(&sum)?;
    let f = ExponentialSum::new(terms)?;
    let (s1, s2) = f64_range(&strip)?;
    let report = zero_density_check(&f, s1, s2, t_max, ctx.seed)?;
    let phi1 = jessen_function(&f, s1, t_max)?;
    let phi2 = jessen_function(&f, s2, t_max)?;
    write_json(
        ctx.out.as_deref(),
        &meta,
        json!({
            "strip": [s1, s2],
            "t_max": t_max,
            "seed": ctx.seed,
            "count": report.count,
            "density_from_count": report.from_count,
            "density_from_derivative": report.from_derivative,
            "relative_gap": report.relative_gap,
            "mean_log_modulus": [phi1, phi2],
        }),
    )
}

fn selftest() -> Result<()> {
    // a constant sum has mean log-modulus log|c| on every line
    let c = ExponentialSum::new(vec![(0.0, Complex64::new(0.0, -2.0))])?;
    let phi = jessen_function(&c, 0.3, 50.0)?;
    check(
        "constant sum mean is log of its modulus",
        (phi - 2f64.ln()).abs() < 1e-12,
        || format!("got {phi}, want {}", 2f64.ln()),
    )?;

    // squaring a sum doubles every zero count
    let l2 = 2f64.ln();
    let single = ExponentialSum::new(vec![
        (0.0, Complex64::new(1.0, 0.0)),
        (l2, Complex64::new(-1.0, 0.0)),
    ])?;
    let squared = ExponentialSum::new(vec![
        (0.0, Complex64::new(1.0, 0.0)),
        (l2, Complex64::new(-2.0, 0.0)),
        (2.0 * l2, Complex64::new(1.0, 0.0)),
    ])?;
    let n1 = zero_count(&single, -1.0, 1.0, 40.0, 1)?;
    let n2 = zero_count(&squared, -1.0, 1.0, 40.0, 1)?;
    check(
        "squared sum doubles the zero count",
        n1 > 0 && n2 == 2 * n1,
        || format!("single {n1}, squared {n2}"),
    )?;

    // a sum with no zeros in the strip: count 0 and flat density; the
    // height is a whole number of periods so the finite-height mean has
    // no partial-period leftover
    let free = ExponentialSum::new(vec![
        (0.0, Complex64::new(1.0, 0.0)),
        (l2, Complex64::new(0.25, 0.0)),
    ])?;
    let t_periods = 10.0 * std::f64::consts::TAU / l2;
    let rep = zero_density_check(&free, 0.0, 1.0, t_periods, 1)?;
    check(
        "zero-free strip reports zero density by both routes",
        rep.count == 0 && rep.from_derivative.abs() < 1e-4,
        || {
            format!(
                "count {}, derivative route {}",
                rep.count, rep.from_derivative
            )
        },
    )?;
    Ok(())
}

//! `tropos weil`: two-sided evaluation of the explicit identity for a
//! smooth log-scale bump — the prime/archimedean distribution on one
//! side, the pole-minus-zeros sum over supplied zero ordinates on the
//! other — reported as JSON with the relative residual.

use std::path::{Path, PathBuf};

use serde_json::json;

use tropos_core::weil::{
    counting_pair, load_zeros, mangoldt, sum_over_multiples, weil_distribution, TestFunction,
};
use tropos_core::{Error, Result};

use crate::cmd::{check, required, Ctx, Format};
use crate::output::{write_json, Meta};
use crate::parse::bump;
use crate::{CheckKind, WeilArgs};

/// A zero table given as a relative path that does not exist from the
/// working directory is searched for under `TROPOS_DATA_DIR`.
fn resolve_zeros(path: &Path) -> Result<PathBuf> {
    if path.exists() {
        return Ok(path.to_path_buf());
    }
    if path.is_relative() {
        if let Some(dir) = std::env::var_os("TROPOS_DATA_DIR") {
            let candidate = PathBuf::from(dir).join(path);
            if candidate.exists() {
                return Ok(candidate);
            }
        }
    }
    Err(Error::precondition(format!(
        "zero table {} not found (also searched TROPOS_DATA_DIR)",
        path.display()
    )))
}

pub fn run(ctx: &Ctx, a: WeilArgs) -> Result<()> {
    if a.selftest {
        return selftest();
    }
    ctx.require_format(Format::Json, "the identity report")?;
    let zeros_arg = required(a.zeros, "zeros")?;
    let f_spec = required(a.f, "f")?;
    let CheckKind::Explicit = required(a.check, "check")?;
    let mut meta = Meta::new(format!(
        "weil --check explicit --zeros {} --f {f_spec}",
        zeros_arg.display()
    ));
    let resolved = resolve_zeros(&zeros_arg)?;
    meta.read_input("zeros", &resolved)?;
    let zeros = load_zeros(&resolved)?;
    let f = bump(&f_spec)?;
    let prime_side = weil_distribution(&f)?;
    let zero_side = counting_pair(&f, &zeros);
    let residual = (prime_side - zero_side).abs() / prime_side.abs().max(f64::MIN_POSITIVE);
    write_json(
        ctx.out.as_deref(),
        &meta,
        json!({
            "prime_side": prime_side,
            "zero_side": zero_side,
            "residual": residual,
            "zeros_used": zeros.len(),
        }),
    )
}

fn selftest() -> Result<()> {
    // prime-power weights: one prime factor contributes its log, two
    // distinct factors contribute nothing
    check(
        "prime-power weights",
        (mangoldt(8) - 2f64.ln()).abs() < 1e-15 && mangoldt(6) == 0.0,
        || format!("L(8) = {}, L(6) = {}", mangoldt(8), mangoldt(6)),
    )?;

    // summing over multiples: a step beyond the support reaches nothing
    let f = TestFunction::gaussian_bump(3f64.ln(), 0.02)?;
    let (a, b) = f.support();
    check(
        "multiple sum beyond the support is empty",
        sum_over_multiples(&f, b + 1.0)? == 0.0,
        || "nonzero sum past support".to_string(),
    )?;
    // ... and with unit step only n = 3 lands inside (2.5, 3.5)
    let s = sum_over_multiples(&f, 1.0)?;
    check(
        "multiple sum with a single admissible term",
        a > 2.5 && b < 3.5 && s == f.evaluate(3.0) && s > 0.0,
        || format!("support ({a}, {b}), sum {s}"),
    )?;

    // the distribution is linear, so it vanishes on the zero function
    let zero_fn = TestFunction::from_samples(vec![0.0; 33], -16, 1.0 / 64.0)?;
    let d = weil_distribution(&zero_fn)?;
    check("distribution of the zero function", d == 0.0, || {
        format!("got {d}")
    })?;

    // the unitary involution sends g to g(1/u)/u: a point check
    let g = TestFunction::gaussian_bump(2f64.ln(), 0.05)?;
    let gt = g.involution();
    let (lhs, rhs) = (gt.evaluate(0.5), 2.0 * g.evaluate(2.0));
    check(
        "involution point identity",
        (lhs - rhs).abs() <= 1e-12 * rhs.abs(),
        || format!("{lhs} vs {rhs}"),
    )?;

    // zero-table ingestion: empty files are rejected, ordinates load in
    // order
    let dir = std::env::temp_dir();
    let empty = dir.join(format!("tropos-selftest-empty-{}.txt", std::process::id()));
    let two = dir.join(format!("tropos-selftest-two-{}.txt", std::process::id()));
    std::fs::write(&empty, b"")?;
    std::fs::write(&two, b"14.13\n21.02\n")?;
    let empty_rejected = load_zeros(&empty).is_err();
    let loaded = load_zeros(&two)?;
    let _ = std::fs::remove_file(&empty);
    let _ = std::fs::remove_file(&two);
    check(
        "zero-table ingestion",
        empty_rejected && loaded.len() == 2 && (loaded[0] - 14.13).abs() < 1e-12,
        || format!("rejected: {empty_rejected}, loaded {loaded:?}"),
    )?;
    Ok(())
}

//! `tropos apseq`: digit-reversal sequence values `U(k)` over an
//! integer index range, emitted as exact rationals (one CSV row per
//! index: `k, numerator, denominator`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use tropos_core::apseq::{APSequence, DistributionFunction};
use tropos_core::Result;

use crate::cmd::{check, required, Ctx, Format};
use crate::output::{write_csv, Meta};
use crate::ApseqArgs;

pub fn run(ctx: &Ctx, a: ApseqArgs) -> Result<()> {
    if a.selftest {
        return selftest();
    }
    ctx.require_format(Format::Csv, "the sequence table")?;
    let p = required(a.p, "p")?;
    let range = required(a.range, "range")?;
    let (lo, hi) = crate::parse::i64_range(&range)?;
    let seq = APSequence::prime(p)?;
    let meta = Meta::new(format!("apseq --p {p} --range {lo}:{hi}"));
    let mut rows = Vec::with_capacity((hi - lo + 1) as usize);
    for k in lo..=hi {
        let u = seq.u_value(k);
        rows.push(vec![k.to_string(), u.numer().to_string(), u.denom().to_string()]);
    }
    write_csv(
        ctx.out.as_deref(),
        &meta,
        &["k", "numerator", "denominator"],
        &rows,
    )
}

fn selftest() -> Result<()> {
    let seq = APSequence::prime(2)?;

    check("value at zero is zero", seq.u_value(0).is_zero(), || {
        format!("U(0) = {}", seq.u_value(0))
    })?;

    // at level zero the period bound is 1, which any value in [0, 1]
    // satisfies; this exercises the checker end to end
    check(
        "level-zero period bound",
        seq.epsilon_period_check(0, -100..=100, -5..=5),
        || "bound |U(x+n) - U(x)| <= 1 failed".to_string(),
    )?;

    // the checker must reject an injected violation
    let poisoned = |x: i64| {
        if x == 7 {
            BigRational::from_integer(BigInt::from(10))
        } else {
            seq.u_value(x)
        }
    };
    check(
        "checker rejects an injected violation",
        !seq.epsilon_period_check_fn(poisoned, 1, 0..=10, 1..=1),
        || "poisoned sequence passed the period check".to_string(),
    )?;

    // a constant sample set yields a single-step distribution function
    // (the unit mass accumulates as 50 equal weights, so allow rounding)
    let d = DistributionFunction::from_samples(vec![0.25; 50]);
    check(
        "constant samples give a step distribution",
        d.cdf(0.2) == 0.0 && (d.cdf(0.3) - 1.0).abs() < 1e-12,
        || format!("cdf(0.2) = {}, cdf(0.3) = {}", d.cdf(0.2), d.cdf(0.3)),
    )?;
    Ok(())
}

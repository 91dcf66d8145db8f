//! `tropos lift`: push the digit-reversal sequence through a pair of
//! quantile maps, producing a signed point cloud (one zero and one pole
//! per height). Default artifact is the point CSV `k, sign, position`;
//! with `--pair` the command instead reports the Cesàro pairing of the
//! cloud against a polynomial test function as JSON.

use serde_json::json;

use tropos_core::apseq::APSequence;
use tropos_core::lift::{build_lift, pair_with_test, Density};
use tropos_core::{Error, Result};

use crate::cmd::{check, required, Ctx, Format};
use crate::output::{write_csv, write_json, Meta};
use crate::parse::{eval_poly, poly};
use crate::LiftArgs;

fn density_pair(name: &str) -> Result<(Density, Density)> {
    match name {
        "fig4" => Ok((Density::fig4_plus(), Density::fig4_minus())),
        other => Err(Error::argument(format!(
            "unknown density preset {other:?}; available: fig4"
        ))),
    }
}

pub fn run(ctx: &Ctx, a: LiftArgs) -> Result<()> {
    if a.selftest {
        return selftest();
    }
    let density = required(a.density, "density")?;
    let k = required(a.k, "K")?;
    if k < 0 {
        return Err(Error::argument(format!("--K must be nonnegative, got {k}")));
    }
    let (plus, minus) = density_pair(&density)?;
    let seq = APSequence::prime(2)?;

    if let Some(pair_spec) = a.pair {
        ctx.require_format(Format::Json, "the pairing report")?;
        let t = a.t.unwrap_or(k);
        if t < 0 {
            return Err(Error::argument(format!("--T must be nonnegative, got {t}")));
        }
        let coeffs = poly(&pair_spec)?;
        let meta = Meta::new(format!(
            "lift --density {density} --K {k} --pair {pair_spec} --T {t}"
        ));
        let points = build_lift(&plus, &minus, &seq, t)?;
        let value = pair_with_test(&points, |x| eval_poly(&coeffs, x))?;
        return write_json(
            ctx.out.as_deref(),
            &meta,
            json!({
                "pairing": value,
                "psi": pair_spec,
                "K": k,
                "T": t,
                "points": points.len(),
            }),
        );
    }

    ctx.require_format(Format::Csv, "the point cloud")?;
    let meta = Meta::new(format!("lift --density {density} --K {k}"));
    let points = build_lift(&plus, &minus, &seq, k)?;
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                p.k.to_string(),
                p.sign.to_string(),
                format!("{}", p.position),
            ]
        })
        .collect();
    write_csv(ctx.out.as_deref(), &meta, &["k", "sign", "position"], &rows)
}

fn selftest() -> Result<()> {
    // symmetric density: the median sits at the midpoint
    let beta = Density::beta22();
    let q = beta.quantile(0.5)?;
    check(
        "symmetric density has median one half",
        (q - 0.5).abs() < 1e-9,
        || format!("quantile(1/2) = {q}"),
    )?;

    // the uniform quantile map is the identity
    let uniform = Density::uniform();
    let mut uniform_ok = true;
    for u in [0.1, 0.5, 0.9] {
        if (uniform.quantile(u)? - u).abs() > 1e-9 {
            uniform_ok = false;
        }
    }
    check("uniform quantile is identity", uniform_ok, || {
        "quantile(u) != u".to_string()
    })?;

    // using the same profile on both sides puts a canceling pair at
    // every height: all pairings vanish
    let seq = APSequence::prime(2)?;
    let points = build_lift(&uniform, &Density::uniform(), &seq, 50)?;
    let p1 = pair_with_test(&points, |_| 1.0)?;
    let px = pair_with_test(&points, |x| x)?;
    check(
        "identical profiles cancel",
        p1.abs() <= 1e-12 && px.abs() <= 1e-12,
        || format!("constant {p1}, linear {px}"),
    )?;

    // equal counts of zeros and poles: pairing against a constant is
    // zero for any profile pair
    let fig = build_lift(&Density::fig4_plus(), &Density::fig4_minus(), &seq, 50)?;
    let pc = pair_with_test(&fig, |_| 1.0)?;
    check("constant test function pairs to zero", pc.abs() <= 1e-12, || {
        format!("pairing {pc}")
    })?;
    Ok(())
}

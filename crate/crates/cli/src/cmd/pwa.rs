//! `tropos pwa`: operations on piecewise-affine functions and their
//! breakpoint divisors, exchanged as JSON files — the distributional
//! Laplacian (`--op laplacian`), exact addition (`--op add`), and the
//! effectivity solver that clears the poles of a divisor
//! (`--op rr`).

use serde_json::json;

use tropos_core::pwa::{rr_solve, Divisor, PiecewiseAffine};
use tropos_core::{Coord, Error, Interval, Result};

use crate::cmd::{check, required, Ctx, Format};
use crate::output::{write_json, Meta};
use crate::{PwaArgs, PwaOp};

fn load_json(meta: &mut Meta, label: &str, path: &std::path::Path) -> Result<serde_json::Value> {
    let bytes = meta.read_input(label, path)?;
    serde_json::from_slice(&bytes)
        .map_err(|e| Error::argument(format!("invalid JSON in {}: {e}", path.display())))
}

/// `lo:hi` with `-inf` / `inf` for an unbounded side; rational
/// endpoints.
fn parse_domain(s: &str) -> Result<Interval> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(Error::argument(format!(
            "expected domain as <lo>:<hi>, got {s:?}"
        )));
    }
    let side = |t: &str| -> Result<Option<Coord>> {
        let t = t.trim();
        if t == "-inf" || t == "inf" || t == "+inf" {
            return Ok(None);
        }
        Ok(Some(Coord::Rat(tropos_core::coord::parse_rational(t)?)))
    };
    Interval::new(side(parts[0])?, side(parts[1])?)
}

pub fn run(ctx: &Ctx, a: PwaArgs) -> Result<()> {
    if a.selftest {
        return selftest();
    }
    ctx.require_format(Format::Json, "function and divisor files")?;
    let op = required(a.op, "op")?;
    let path = required(a.input, "in")?;
    match op {
        PwaOp::Laplacian => {
            let mut meta = Meta::new(format!("pwa --op laplacian --in {}", path.display()));
            let f = PiecewiseAffine::from_json(&load_json(&mut meta, "in", &path)?)?;
            write_json(
                ctx.out.as_deref(),
                &meta,
                json!({ "divisor": f.laplacian().to_json() }),
            )
        }
        PwaOp::Add => {
            let with = required(a.with, "with")?;
            let mut meta = Meta::new(format!(
                "pwa --op add --in {} --with {}",
                path.display(),
                with.display()
            ));
            let f = PiecewiseAffine::from_json(&load_json(&mut meta, "in", &path)?)?;
            let g = PiecewiseAffine::from_json(&load_json(&mut meta, "with", &with)?)?;
            write_json(
                ctx.out.as_deref(),
                &meta,
                json!({ "pwa": f.add(&g)?.to_json() }),
            )
        }
        PwaOp::Rr => {
            let domain = parse_domain(&a.domain)?;
            let mut meta = Meta::new(format!(
                "pwa --op rr --in {} --domain {}",
                path.display(),
                a.domain
            ));
            let d = Divisor::from_json(&load_json(&mut meta, "in", &path)?)?;
            let f = rr_solve(&d, &domain)?;
            let adjusted = d.add(&f.laplacian());
            write_json(
                ctx.out.as_deref(),
                &meta,
                json!({
                    "pwa": f.to_json(),
                    "adjusted": adjusted.to_json(),
                    "effective": adjusted.is_effective(),
                }),
            )
        }
    }
}

fn selftest() -> Result<()> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let rat = |n: i64| BigRational::from_integer(BigInt::from(n));
    let whole = Interval::whole_line();
    let affine = |slope: i64, at: i64, value: i64| {
        PiecewiseAffine::single(
            whole.clone(),
            rat(slope),
            Coord::from_int(at),
            Coord::from_int(value),
        )
    };

    // slope three through the origin evaluates to six at two
    let f = affine(3, 0, 0)?;
    check(
        "affine evaluation",
        f.evaluate(&Coord::from_int(2))? == Coord::from_int(6),
        || format!("f(2) = {:?}", f.evaluate(&Coord::from_int(2))),
    )?;

    // an affine function has no breakpoint divisor
    check(
        "affine function has empty divisor",
        f.laplacian().atoms().is_empty(),
        || format!("atoms {:?}", f.laplacian().atoms()),
    )?;

    // a single hinge carries exactly its slope jump at the kink
    let hinge = affine(0, 0, 0)?.pointwise_max(&affine(1, 2, 0)?)?;
    check(
        "hinge divisor is a unit atom at the kink",
        hinge.laplacian().atoms() == [(Coord::from_int(2), rat(1))],
        || format!("atoms {:?}", hinge.laplacian().atoms()),
    )?;

    // adding the zero function changes nothing
    let sum = hinge.add(&affine(0, 0, 0)?)?;
    check("adding zero is the identity", sum == hinge, || {
        format!("sum {sum:?}")
    })?;

    // max(-x, c) crosses exactly once, at -c
    let m = affine(-1, 0, 0)?.pointwise_max(&affine(0, 0, 3)?)?;
    check(
        "single crossing of a line and a level",
        m.breakpoints() == [Coord::from_int(-3)],
        || format!("breakpoints {:?}", m.breakpoints()),
    )?;

    // argument rescaling by one is the identity
    check(
        "unit argument rescaling is the identity",
        hinge.scale_argument(1)? == hinge,
        || "scale by 1 changed the function".to_string(),
    )?;

    // the effectivity solver: an empty divisor needs no correction
    let trivial = rr_solve(&Divisor::new(vec![])?, &whole)?;
    check(
        "empty divisor solves to the zero function",
        trivial.evaluate(&Coord::from_int(5))? == Coord::from_int(0)
            && trivial.breakpoints().is_empty(),
        || format!("got {trivial:?}"),
    )?;

    // a single pole is cleared exactly by one hinge
    let pole = Divisor::new(vec![(Coord::from_int(4), rat(-1))])?;
    let g = rr_solve(&pole, &whole)?;
    let adjusted = pole.add(&g.laplacian());
    check(
        "single pole clears to the empty divisor",
        adjusted.atoms().is_empty() && adjusted.is_effective(),
        || format!("adjusted {:?}", adjusted.atoms()),
    )?;
    Ok(())
}

//! `tropos newton`: valuation polygon of a p-adic polynomial or series.
//! Reads a JSON description (either explicit rational coefficients or
//! exponent/valuation pairs), emits the piecewise-affine tropicalization
//! together with its tropical zeros.

use serde_json::json;

use tropos_core::newton::ValuedSeries;
use tropos_core::{Error, Result};

use crate::cmd::{check, required, Ctx, Format};
use crate::output::{write_json, Meta};
use crate::NewtonArgs;

pub fn run(ctx: &Ctx, a: NewtonArgs) -> Result<()> {
    if a.selftest {
        return selftest();
    }
    ctx.require_format(Format::Json, "the polygon report")?;
    let path = required(a.input, "in")?;
    let mut meta = Meta::new(format!("newton --in {}", path.display()));
    let bytes = meta.read_input("in", &path)?;
    let value: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| Error::argument(format!("invalid JSON in {}: {e}", path.display())))?;
    let series = ValuedSeries::from_json(&value)?;
    let pwa = series.tropicalize()?;
    let zeros = pwa.laplacian();
    write_json(
        ctx.out.as_deref(),
        &meta,
        json!({
            "pwa": pwa.to_json(),
            "tropical_zeros": zeros.to_json(),
        }),
    )
}

fn selftest() -> Result<()> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use tropos_core::{Coord, Interval};

    let rat = |n: i64| BigRational::from_integer(BigInt::from(n));

    // a single monomial a X^3 tropicalizes to one affine piece of
    // slope -3 with no breakpoints
    let mono = ValuedSeries::new(2, vec![(3, rat(0))], Interval::whole_line())?;
    let t = mono.tropicalize()?;
    check(
        "monomial gives one affine piece",
        t.breakpoints().is_empty() && t.slopes() == [rat(-3)],
        || format!("breakpoints {:?} slopes {:?}", t.breakpoints(), t.slopes()),
    )?;

    // X - a with v(a) = 5 has exactly one root, of valuation 5
    let linear = ValuedSeries::new(2, vec![(0, rat(5)), (1, rat(0))], Interval::whole_line())?;
    let zeros = linear.root_valuations()?;
    check(
        "linear factor root valuation",
        zeros.atoms() == [(Coord::from_int(5), rat(1))],
        || format!("atoms {:?}", zeros.atoms()),
    )?;

    // shifting every coefficient valuation by a constant shifts the
    // polygon down by that constant and nothing else
    let base = ValuedSeries::new(
        3,
        vec![(0, rat(2)), (1, rat(0)), (2, rat(1))],
        Interval::whole_line(),
    )?;
    let shifted = ValuedSeries::new(
        3,
        vec![(0, rat(2 + 7)), (1, rat(7)), (2, rat(1 + 7))],
        Interval::whole_line(),
    )?;
    let tb = base.tropicalize()?;
    let ts = shifted.tropicalize()?;
    let mut shift_ok = tb.breakpoints() == ts.breakpoints();
    for x in [-3i64, 0, 1, 4] {
        let vb = tb.evaluate(&Coord::from_int(x))?;
        let vs = ts.evaluate(&Coord::from_int(x))?;
        let (Some(vb), Some(vs)) = (vb.as_rational(), vs.as_rational()) else {
            shift_ok = false;
            break;
        };
        if &(vb - vs) != &rat(7) {
            shift_ok = false;
            break;
        }
    }
    check("constant valuation shift moves polygon rigidly", shift_ok, || {
        format!("base {:?} shifted {:?}", tb, ts)
    })?;
    Ok(())
}

//! `tropos witt`: residual table for the multiplicative scaling flow on
//! symbolic exponential grids. For each evaluation parameter the table
//! reports the holomorphy residual of a grid function before and after
//! the flow, as CSV — the after/before ratio exhibits the bounded
//! residual class.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use tropos_core::coord::{parse_rational, rational_to_f64};
use tropos_core::witt::{holomorphy_residual, IndexKey, LeafGridFunction, WittElement};
use tropos_core::{Error, Result};

use crate::cmd::{check, required, Ctx, Format};
use crate::output::{write_csv, Meta};
use crate::parse::grid;
use crate::{WittArgs, WittCheck};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Evaluation parameters for the residual table.
const LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];

/// The exponential line `q` on the grid.
fn line(xs: Vec<BigRational>, ys: Vec<BigRational>) -> Result<LeafGridFunction> {
    LeafGridFunction::q_power(xs, ys, &rat(1, 1))
}

/// The line plus a mobile multiplicative term, so the flow genuinely
/// rearranges the element instead of fixing it.
fn mixed(xs: Vec<BigRational>, ys: Vec<BigRational>) -> Result<LeafGridFunction> {
    let tau = std::f64::consts::TAU;
    LeafGridFunction::from_fn(xs, ys, |x, y| {
        let key = IndexKey::q_power(y);
        let phase = tau * rational_to_f64(x);
        let q_part = WittElement::from_term(key, Complex64::from_polar(1.0, phase));
        let moved = IndexKey::from_rational(&rat(3, 2))
            .expect("positive rational")
            .theta(&(y * rat(1, 4)))
            .expect("positive exponent");
        &q_part + &WittElement::from_term(moved, Complex64::new(0.05, 0.0))
    })
}

pub fn run(ctx: &Ctx, a: WittArgs) -> Result<()> {
    if a.selftest {
        return selftest();
    }
    ctx.require_format(Format::Csv, "the residual table")?;
    let WittCheck::Frobenius = required(a.check, "check")?;
    let mu_s = required(a.mu, "mu")?;
    let grid_s = required(a.grid, "grid")?;
    let mu = parse_rational(&mu_s)?;
    let (nx, ny) = grid(&grid_s)?;
    let meta = Meta::new(format!("witt --check frobenius --mu {mu_s} --grid {nx}x{ny}"));

    // rational grid: x on a centered 1/16 lattice, y on an ascending
    // 1/32 lattice starting at 1/4 (small enough that the evaluation
    // characters stay well away from underflow)
    let xs: Vec<BigRational> = (0..nx).map(|i| rat(i as i64 - (nx as i64) / 2, 16)).collect();
    let ys: Vec<BigRational> = (0..ny).map(|j| rat(8 + j as i64, 32)).collect();

    let mut rows = Vec::new();
    let functions: [(&str, fn(Vec<BigRational>, Vec<BigRational>) -> Result<LeafGridFunction>); 2] =
        [("q", line), ("mixed", mixed)];
    for (name, build) in functions {
        let f = build(xs.clone(), ys.clone())?;
        let flowed = f.frobenius_lift(&mu).map_err(|e| {
            Error::precondition(format!(
                "grid {nx}x{ny} does not resample under mu = {mu_s}: {e}"
            ))
        })?;
        for lambda in LAMBDAS {
            let before = holomorphy_residual(&f, lambda)?;
            let after = holomorphy_residual(&flowed, lambda)?;
            rows.push(vec![
                name.to_string(),
                format!("{lambda}"),
                format!("{before}"),
                format!("{after}"),
                format!("{}", after / before),
            ]);
        }
    }
    write_csv(
        ctx.out.as_deref(),
        &meta,
        &["function", "lambda", "residual", "lifted_residual", "ratio"],
        &rows,
    )
}

fn selftest() -> Result<()> {
    // multiplicative index keys: [2][3] = [6]
    let k6 = IndexKey::from_integer(2)?.index_mul(&IndexKey::from_integer(3)?);
    check("integer keys multiply", k6 == IndexKey::from_integer(6)?, || {
        format!("got {k6:?}")
    })?;

    // power maps: unit exponent fixes, theta_2 squares
    let k3 = IndexKey::from_integer(3)?;
    check(
        "unit power map is the identity",
        k3.theta(&rat(1, 1))? == k3,
        || "theta_1 moved a key".to_string(),
    )?;
    check(
        "power map squares an integer key",
        k3.theta(&rat(2, 1))? == IndexKey::from_integer(9)?,
        || "theta_2([3]) != [9]".to_string(),
    )?;

    // evaluation characters take a positive key to its power
    let v = IndexKey::from_integer(5)?.chi(0.7);
    check(
        "character evaluates keys as powers",
        (v - 5f64.powf(0.7)).abs() < 1e-12 * v.abs(),
        || format!("chi_0.7([5]) = {v}"),
    )?;

    // the half power of the exponential line squares back to the line,
    // exactly on keys
    let (x, y) = (rat(1, 3), rat(5, 4));
    let half = WittElement::q_element(&rat(1, 2), &x, &y)?;
    let squared = &half * &half;
    let q = WittElement::q_element(&rat(1, 1), &x, &y)?;
    let keys_match = squared.num_terms() == 1
        && squared.terms().next().map(|(k, _)| k) == q.terms().next().map(|(k, _)| k);
    check("half power squares to the line", keys_match, || {
        format!("squared {squared:?}")
    })?;

    // unit flow parameter leaves a grid function untouched
    let xs: Vec<BigRational> = (-4..=4).map(|i| rat(i, 16)).collect();
    let ys: Vec<BigRational> = (8..=20).map(|j| rat(j, 32)).collect();
    let f = line(xs.clone(), ys.clone())?;
    let fixed = f.frobenius_lift(&rat(1, 1))?;
    check("unit flow is the identity", fixed == f, || {
        "flow at 1 changed the grid".to_string()
    })?;

    // a constant grid function is annihilated by both derivations
    let ones = LeafGridFunction::from_fn(xs, ys, |_, _| WittElement::one())?;
    let r = holomorphy_residual(&ones, 1.0)?;
    check("constant element has zero residual", r < 1e-12, || {
        format!("residual {r}")
    })?;
    Ok(())
}

//! Exact multiplicative indices, their group ring, and the Frobenius
//! lift on grid functions over the upper half-plane.
//!
//! An [`IndexKey`] represents a positive real number of the shape
//! `prod_p p^(e_p) * e^(2 pi tau)` with rational exponents `e_p` (over
//! finitely many primes) and rational `tau`, stored exactly. These form
//! a multiplicative group closed under the rational power maps
//! `theta_lambda: kappa -> kappa^lambda`. A [`WittElement`] is a formal
//! complex-linear combination of such indices; multiplication convolves
//! keys, so the ring structure is exact while coefficients stay in
//! `Complex64`. The evaluation character `chi_lambda` sends a formal
//! sum to `sum c_kappa kappa^lambda`, intertwining `theta`:
//! `chi_lambda . theta_mu = chi_(lambda mu)`.
//!
//! A [`LeafGridFunction`] assigns a `WittElement` to each node of a
//! rational grid `(x, y)` with `y > 0`. The model example is
//! `q^r = e^(2 pi i r x) [tau = -r y]`, whose `chi_lambda` image
//! `e^(2 pi i r x) e^(-2 pi lambda r y)` is holomorphic in
//! `x + i lambda y`. The Frobenius lift `Fr_mu(F)(x, y) =
//! theta_mu(F(x, y / mu))` fixes every `q^r` exactly and moves any
//! nontrivial Teichmuller factor, which is checked by the holomorphy
//! residual `(lambda X + i Y) chi_lambda(F)` with `X = y d/dx`,
//! `Y = y d/dy` discretized by 3-point stencils.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::coord::rational_to_f64;
use crate::error::{Error, Result};

/// Exact index `prod_p p^(e_p) * e^(2 pi tau)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IndexKey {
    /// prime -> rational exponent, zero exponents pruned
    factors: BTreeMap<u64, BigRational>,
    /// exponential part `e^(2 pi tau)`
    tau: BigRational,
}

fn factor_u64(mut n: u64) -> BTreeMap<u64, i64> {
    let mut out = BTreeMap::new();
    let mut d = 2u64;
    while d * d <= n {
        while n % d == 0 {
            *out.entry(d).or_insert(0) += 1;
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

impl IndexKey {
    /// The identity index `1`.
    pub fn one() -> Self {
        IndexKey {
            factors: BTreeMap::new(),
            tau: BigRational::zero(),
        }
    }

    /// The integer `n >= 1` as an index.
    pub fn from_integer(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::argument("index must be a positive integer"));
        }
        let factors = factor_u64(n)
            .into_iter()
            .map(|(p, e)| (p, BigRational::from_integer(BigInt::from(e))))
            .collect();
        Ok(IndexKey {
            factors,
            tau: BigRational::zero(),
        })
    }

    /// A positive rational as an index, via prime factorization of the
    /// reduced numerator and denominator.
    pub fn from_rational(r: &BigRational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::argument(format!("index must be positive, got {r}")));
        }
        let num = r
            .numer()
            .to_u64()
            .ok_or_else(|| Error::argument("numerator too large to factor"))?;
        let den = r
            .denom()
            .to_u64()
            .ok_or_else(|| Error::argument("denominator too large to factor"))?;
        let mut factors: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (p, e) in factor_u64(num) {
            factors.insert(p, BigRational::from_integer(BigInt::from(e)));
        }
        for (p, e) in factor_u64(den) {
            let entry = factors
                .entry(p)
                .or_insert_with(BigRational::zero);
            *entry -= BigRational::from_integer(BigInt::from(e));
            if entry.is_zero() {
                factors.remove(&p);
            }
        }
        Ok(IndexKey {
            factors,
            tau: BigRational::zero(),
        })
    }

    /// The index `e^(-2 pi r)`, i.e. `q^r` for the standard `q`.
    pub fn q_power(r: &BigRational) -> Self {
        IndexKey {
            factors: BTreeMap::new(),
            tau: -r.clone(),
        }
    }

    pub fn tau(&self) -> &BigRational {
        &self.tau
    }

    /// Exponent of the prime `p` (zero when absent).
    pub fn exponent(&self, p: u64) -> BigRational {
        self.factors.get(&p).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && self.tau.is_zero()
    }

    /// Group law: exponents and `tau` add.
    pub fn index_mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (p, e) in &other.factors {
            let entry = factors.entry(*p).or_insert_with(BigRational::zero);
            *entry += e;
            if entry.is_zero() {
                factors.remove(p);
            }
        }
        IndexKey {
            factors,
            tau: &self.tau + &other.tau,
        }
    }

    /// Group inverse: all exponents and `tau` negate.
    pub fn inv(&self) -> Self {
        IndexKey {
            factors: self.factors.iter().map(|(p, e)| (*p, -e)).collect(),
            tau: -self.tau.clone(),
        }
    }

    /// The rational power map `theta_lambda(kappa) = kappa^lambda`,
    /// `lambda > 0`; exact on exponents and `tau`.
    pub fn theta(&self, lambda: &BigRational) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::argument(format!(
                "power-map parameter must be positive, got {lambda}"
            )));
        }
        Ok(IndexKey {
            factors: self
                .factors
                .iter()
                .map(|(p, e)| (*p, e * lambda))
                .collect(),
            tau: &self.tau * lambda,
        })
    }

    /// `log kappa = sum e_p log p + 2 pi tau`.
    pub fn log_value(&self) -> f64 {
        let mut s = 2.0 * std::f64::consts::PI * rational_to_f64(&self.tau);
        for (p, e) in &self.factors {
            s += rational_to_f64(e) * (*p as f64).ln();
        }
        s
    }

    /// `kappa^lambda` as a positive real.
    pub fn chi(&self, lambda: f64) -> f64 {
        (lambda * self.log_value()).exp()
    }
}

/// Formal complex combination of indices; the group ring of the index
/// group, with exact key arithmetic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WittElement {
    terms: BTreeMap<IndexKey, Complex64>,
}

impl WittElement {
    pub fn zero() -> Self {
        WittElement::default()
    }

    pub fn one() -> Self {
        WittElement::from_term(IndexKey::one(), Complex64::new(1.0, 0.0))
    }

    pub fn from_term(key: IndexKey, c: Complex64) -> Self {
        let mut terms = BTreeMap::new();
        if c != Complex64::new(0.0, 0.0) {
            terms.insert(key, c);
        }
        WittElement { terms }
    }

    /// The class `[r]` of a positive rational with coefficient one.
    pub fn teichmuller(r: &BigRational) -> Result<Self> {
        Ok(WittElement::from_term(
            IndexKey::from_rational(r)?,
            Complex64::new(1.0, 0.0),
        ))
    }

    /// Point value of the exponential line at `(x, y)` in the upper
    /// half-plane: `q^r(x, y) = e^(2 pi i r x) [tau = -r y]`, one
    /// Teichmuller-style term whose index key carries the exact rational
    /// exponent. `r = 1` gives the line itself; rational `r` its exact
    /// rational powers.
    pub fn q_element(r: &BigRational, x: &BigRational, y: &BigRational) -> Result<Self> {
        if !y.is_positive() {
            return Err(Error::precondition(format!(
                "the exponential line needs y > 0, got {y}"
            )));
        }
        Ok(WittElement::from_term(
            IndexKey::q_power(&(r * y)),
            unit_phase(&(r * x)),
        ))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexKey, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return WittElement::zero();
        }
        WittElement {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), c * v)).collect(),
        }
    }

    /// Apply the power map to every index; coefficients are untouched.
    pub fn theta(&self, lambda: &BigRational) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            let key = k.theta(lambda)?;
            let entry = terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
            *entry += v;
        }
        let mut out = WittElement { terms };
        out.prune();
        Ok(out)
    }

    /// Evaluate the character `kappa -> kappa^lambda` term by term.
    pub fn chi(&self, lambda: f64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (k, v) in &self.terms {
            s += v * k.chi(lambda);
        }
        s
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| *v != Complex64::new(0.0, 0.0));
    }
}

impl Add for &WittElement {
    type Output = WittElement;
    fn add(self, other: &WittElement) -> WittElement {
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            let entry = terms.entry(k.clone()).or_insert(Complex64::new(0.0, 0.0));
            *entry += v;
        }
        let mut out = WittElement { terms };
        out.prune();
        out
    }
}

impl Sub for &WittElement {
    type Output = WittElement;
    fn sub(self, other: &WittElement) -> WittElement {
        self + &(-other)
    }
}

impl Neg for &WittElement {
    type Output = WittElement;
    fn neg(self) -> WittElement {
        WittElement {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }
}

impl Mul for &WittElement {
    type Output = WittElement;
    fn mul(self, other: &WittElement) -> WittElement {
        let mut terms: BTreeMap<IndexKey, Complex64> = BTreeMap::new();
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                let key = ka.index_mul(kb);
                let entry = terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
                *entry += va * vb;
            }
        }
        let mut out = WittElement { terms };
        out.prune();
        out
    }
}

/// `e^(2 pi i t)` for rational `t`.
fn unit_phase(t: &BigRational) -> Complex64 {
    let v = 2.0 * std::f64::consts::PI * rational_to_f64(t);
    Complex64::new(v.cos(), v.sin())
}

/// Complex-valued samples produced by evaluating a character on a
/// [`LeafGridFunction`]; plain data for downstream numerics.
#[derive(Debug, Clone)]
pub struct ComplexGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// indexed `values[ix][iy]`
    pub values: Vec<Vec<Complex64>>,
}

/// A `WittElement` at every node of a rational grid in the upper
/// half-plane (`y > 0`), indexed `values[ix][iy]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafGridFunction {
    xs: Vec<BigRational>,
    ys: Vec<BigRational>,
    values: Vec<Vec<WittElement>>,
}

fn check_ascending(v: &[BigRational], what: &str) -> Result<()> {
    if v.len() < 2 {
        return Err(Error::precondition(format!(
            "{what} grid needs at least 2 nodes"
        )));
    }
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition(format!(
            "{what} grid must be strictly ascending"
        )));
    }
    Ok(())
}

impl LeafGridFunction {
    pub fn new(
        xs: Vec<BigRational>,
        ys: Vec<BigRational>,
        values: Vec<Vec<WittElement>>,
    ) -> Result<Self> {
        check_ascending(&xs, "x")?;
        check_ascending(&ys, "y")?;
        if ys[0] <= BigRational::zero() {
            return Err(Error::precondition("y grid must be positive"));
        }
        if values.len() != xs.len() || values.iter().any(|col| col.len() != ys.len()) {
            return Err(Error::precondition(
                "values must be an xs.len() by ys.len() array",
            ));
        }
        Ok(LeafGridFunction { xs, ys, values })
    }

    pub fn from_fn(
        xs: Vec<BigRational>,
        ys: Vec<BigRational>,
        f: impl Fn(&BigRational, &BigRational) -> WittElement,
    ) -> Result<Self> {
        let values = xs
            .iter()
            .map(|x| ys.iter().map(|y| f(x, y)).collect())
            .collect();
        LeafGridFunction::new(xs, ys, values)
    }

    /// The grid function `q^r(x, y) = e^(2 pi i r x) [tau = -r y]`.
    pub fn q_power(xs: Vec<BigRational>, ys: Vec<BigRational>, r: &BigRational) -> Result<Self> {
        let r = r.clone();
        LeafGridFunction::from_fn(xs, ys, move |x, y| {
            WittElement::from_term(IndexKey::q_power(&(&r * y)), unit_phase(&(&r * x)))
        })
    }

    /// The conjugate series `e^(-2 pi i r x) [tau = -r y]`, which is
    /// anti-holomorphic under every evaluation character.
    pub fn q_power_conjugate(
        xs: Vec<BigRational>,
        ys: Vec<BigRational>,
        r: &BigRational,
    ) -> Result<Self> {
        let r = r.clone();
        LeafGridFunction::from_fn(xs, ys, move |x, y| {
            WittElement::from_term(IndexKey::q_power(&(&r * y)), unit_phase(&(-&r * x)))
        })
    }

    pub fn xs(&self) -> &[BigRational] {
        &self.xs
    }

    pub fn ys(&self) -> &[BigRational] {
        &self.ys
    }

    pub fn value(&self, ix: usize, iy: usize) -> &WittElement {
        &self.values[ix][iy]
    }

    /// Pointwise power map.
    pub fn theta(&self, lambda: &BigRational) -> Result<Self> {
        let values = self
            .values
            .iter()
            .map(|col| col.iter().map(|v| v.theta(lambda)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(LeafGridFunction {
            xs: self.xs.clone(),
            ys: self.ys.clone(),
            values,
        })
    }

    /// Pointwise character evaluation.
    pub fn chi(&self, lambda: f64) -> ComplexGrid {
        ComplexGrid {
            xs: self.xs.iter().map(rational_to_f64).collect(),
            ys: self.ys.iter().map(rational_to_f64).collect(),
            values: self
                .values
                .iter()
                .map(|col| col.iter().map(|v| v.chi(lambda)).collect())
                .collect(),
        }
    }

    /// The Frobenius lift `Fr_mu(F)(x, y) = theta_mu(F(x, y / mu))`,
    /// defined on the sub-grid of nodes whose `y / mu` is again a grid
    /// ordinate.
    pub fn frobenius_lift(&self, mu: &BigRational) -> Result<Self> {
        if !mu.is_positive() {
            return Err(Error::argument(format!(
                "frobenius parameter must be positive, got {mu}"
            )));
        }
        let mut kept: Vec<(usize, usize)> = Vec::new(); // (target iy, source iy)
        for (iy, y) in self.ys.iter().enumerate() {
            let src = y / mu;
            if let Ok(j) = self.ys.binary_search(&src) {
                kept.push((iy, j));
            }
        }
        if kept.len() < 2 {
            return Err(Error::precondition(format!(
                "fewer than 2 grid ordinates survive division by {mu}"
            )));
        }
        let ys: Vec<BigRational> = kept.iter().map(|(iy, _)| self.ys[*iy].clone()).collect();
        let mut values = Vec::with_capacity(self.xs.len());
        for col in &self.values {
            let mut new_col = Vec::with_capacity(kept.len());
            for (_, j) in &kept {
                new_col.push(col[*j].theta(mu)?);
            }
            values.push(new_col);
        }
        Ok(LeafGridFunction {
            xs: self.xs.clone(),
            ys,
            values,
        })
    }
}

/// 3-point first-derivative weights for nodes at `t - a, t, t + b`.
fn stencil(a: f64, b: f64) -> (f64, f64, f64) {
    (
        -b / (a * (a + b)),
        (b - a) / (a * b),
        a / (b * (a + b)),
    )
}

/// Sup over interior grid nodes of `|(lambda X + i Y) chi_lambda(F)|`
/// with `X = y d/dx` and `Y = y d/dy`; zero (to stencil accuracy,
/// `O(h^2)`) exactly when the character image is holomorphic in
/// `x + i lambda y`.
pub fn holomorphy_residual(f: &LeafGridFunction, lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::argument("character parameter must be positive"));
    }
    let g = f.chi(lambda);
    let (nx, ny) = (g.xs.len(), g.ys.len());
    if nx < 5 || ny < 5 {
        return Err(Error::precondition(
            "holomorphy residual needs a grid of at least 5 x 5 nodes",
        ));
    }
    let mut sup = 0.0f64;
    for ix in 1..nx - 1 {
        let (ax, bx) = (g.xs[ix] - g.xs[ix - 1], g.xs[ix + 1] - g.xs[ix]);
        let (wxm, wx0, wxp) = stencil(ax, bx);
        for iy in 1..ny - 1 {
            let (ay, by) = (g.ys[iy] - g.ys[iy - 1], g.ys[iy + 1] - g.ys[iy]);
            let (wym, wy0, wyp) = stencil(ay, by);
            let y = g.ys[iy];
            let dgdx =
                wxm * g.values[ix - 1][iy] + wx0 * g.values[ix][iy] + wxp * g.values[ix + 1][iy];
            let dgdy =
                wym * g.values[ix][iy - 1] + wy0 * g.values[ix][iy] + wyp * g.values[ix][iy + 1];
            let res = lambda * y * dgdx + Complex64::new(0.0, 1.0) * y * dgdy;
            sup = sup.max(res.norm());
        }
    }
    Ok(sup)
}

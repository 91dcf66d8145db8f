//! Mean values of exponential sums in vertical strips.
//!
//! For a finite sum `f(s) = sum c_j e^(-w_j s)` the vertical mean
//! `phi(sigma) = lim (1/2T) integral log |f(sigma + it)| dt` exists, is
//! convex and piecewise affine in `sigma` away from degenerate strips,
//! and its derivative jump across a strip equals `2 pi` times the
//! density of zeros per unit height. This module computes finite-`T`
//! approximations of the mean and its derivative, counts zeros in a
//! rectangle by marching the argument around the boundary, and
//! cross-checks the two density routes against each other.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, pairwise_sum, principal_angle};

const TINY: f64 = 1e-280;

/// Finite sum of exponentials `sum c_j e^(-w_j s)` with real
/// frequencies `w_j >= 0`.
#[derive(Debug, Clone)]
pub struct ExponentialSum {
    /// (frequency, coefficient), strictly increasing frequencies
    terms: Vec<(f64, Complex64)>,
}

impl ExponentialSum {
    pub fn new(terms: Vec<(f64, Complex64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::precondition("need at least one term"));
        }
        let mut ts = terms;
        ts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite frequencies"));
        for pair in ts.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::precondition(format!(
                    "duplicate frequency {}",
                    pair[0].0
                )));
            }
        }
        for (w, c) in &ts {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::precondition(format!(
                    "frequencies must be finite and nonnegative, got {w}"
                )));
            }
            if c.norm() == 0.0 {
                return Err(Error::precondition("zero coefficient"));
            }
        }
        Ok(ExponentialSum { terms: ts })
    }

    /// Dirichlet-style sum `sum c_n n^(-s)` over the given integers.
    pub fn dirichlet(terms: &[(u64, Complex64)]) -> Result<Self> {
        let ts = terms
            .iter()
            .map(|(n, c)| {
                if *n == 0 {
                    return Err(Error::precondition("index must be positive"));
                }
                Ok(((*n as f64).ln(), *c))
            })
            .collect::<Result<Vec<_>>>()?;
        ExponentialSum::new(ts)
    }

    pub fn terms(&self) -> &[(f64, Complex64)] {
        &self.terms
    }

    pub fn evaluate(&self, s: Complex64) -> Complex64 {
        self.terms.iter().map(|(w, c)| c * (-w * s).exp()).sum()
    }

    fn max_frequency(&self) -> f64 {
        self.terms.last().expect("nonempty").0
    }
}

/// Finite-height vertical mean of `log |f|` on the line `Re s = sigma`:
/// `(1/2T) integral_{-T}^{T} log |f(sigma + it)| dt`, by composite
/// Gauss panels sized to the fastest oscillation.
pub fn jessen_function(f: &ExponentialSum, sigma: f64, t_max: f64) -> Result<f64> {
    vertical_mean(f, sigma, t_max, |v| v.norm().max(TINY).ln())
}

/// Two-sided difference quotient of the vertical mean in `sigma` with
/// step 1e-3, evaluated as a single integral on shared `t`-nodes so the
/// finite-height fluctuations cancel instead of amplifying.
pub fn jessen_derivative(f: &ExponentialSum, sigma: f64, t_max: f64) -> Result<f64> {
    const H: f64 = 1e-3;
    vertical_mean(f, sigma, t_max, |_| 0.0)?; // validate inputs on the same path
    let g = |t: f64| {
        let up = f.evaluate(Complex64::new(sigma + H, t)).norm().max(TINY).ln();
        let dn = f.evaluate(Complex64::new(sigma - H, t)).norm().max(TINY).ln();
        (up - dn) / (2.0 * H)
    };
    panel_mean(g, t_max, f.max_frequency())
}

fn vertical_mean(
    f: &ExponentialSum,
    sigma: f64,
    t_max: f64,
    map: impl Fn(Complex64) -> f64,
) -> Result<f64> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::precondition(format!(
            "height bound must be positive and finite, got {t_max}"
        )));
    }
    if !sigma.is_finite() {
        return Err(Error::precondition("sigma must be finite"));
    }
    panel_mean(|t| map(f.evaluate(Complex64::new(sigma, t))), t_max, f.max_frequency())
}

fn panel_mean(g: impl Fn(f64) -> f64, t_max: f64, max_freq: f64) -> Result<f64> {
    let per_unit = max_freq.max(1.0);
    let panels = ((2.0 * t_max * per_unit).ceil() as usize).clamp(16, 4_000_000);
    let (nodes, weights) = gauss_legendre(8);
    let h = 2.0 * t_max / panels as f64;
    let mut sums = Vec::with_capacity(panels);
    for i in 0..panels {
        let mid = -t_max + (i as f64 + 0.5) * h;
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            acc += w * 0.5 * h * g(mid + 0.5 * h * x);
        }
        sums.push(acc);
    }
    Ok(pairwise_sum(&sums) / (2.0 * t_max))
}

/// Zeros of `f` inside `(sigma1, sigma2) x (-T, T)`, by accumulating the
/// argument around the rectangle boundary. A zero on or too close to
/// the boundary makes a marching step ambiguous; the height is then
/// jittered by up to 0.1 (seeded, at most 5 retries) and the count
/// reported for the jittered box.
pub fn zero_count(
    f: &ExponentialSum,
    sigma1: f64,
    sigma2: f64,
    t_max: f64,
    seed: u64,
) -> Result<u64> {
    if !(sigma1 < sigma2) {
        return Err(Error::precondition("need sigma1 < sigma2"));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::precondition("height bound must be positive and finite"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_err: Option<Error> = None;
    for attempt in 0..=5 {
        let t_used = if attempt == 0 {
            t_max
        } else {
            t_max + rng.gen_range(-0.1..0.1)
        };
        match rectangle_winding(f, sigma1, sigma2, t_used) {
            Ok(turns) if turns >= 0 => return Ok(turns as u64),
            Ok(turns) => {
                return Err(Error::resolution(format!(
                    "negative boundary count {turns}: marching lost track"
                )))
            }
            Err(e @ (Error::Resolution(_) | Error::Domain(_))) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn rectangle_winding(f: &ExponentialSum, s1: f64, s2: f64, t: f64) -> Result<i64> {
    let corners = [
        Complex64::new(s1, -t),
        Complex64::new(s2, -t),
        Complex64::new(s2, t),
        Complex64::new(s1, t),
        Complex64::new(s1, -t),
    ];
    let mut budget: u32 = 1 << 22;
    let mut total = 0.0;
    for pair in corners.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let len = (b - a).norm();
        // initial samples resolve the fastest phase rotation several
        // times per turn
        let n = 16 + (len * f.max_frequency() * 1.5) as usize;
        let sample = |u: f64| -> Result<(f64, f64)> {
            let v = f.evaluate(a + (b - a) * u);
            if v.norm() < TINY {
                return Err(Error::domain("zero on the counting contour"));
            }
            Ok((u, v.arg()))
        };
        let mut prev = sample(0.0)?;
        for k in 1..=n {
            let next = sample(k as f64 / n as f64)?;
            total += march_segment(&sample, prev, next, &mut budget)?;
            prev = next;
        }
    }
    let turns = total / (2.0 * std::f64::consts::PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.1 {
        return Err(Error::resolution(format!(
            "boundary argument {turns} turns is not near an integer"
        )));
    }
    Ok(rounded as i64)
}

fn march_segment(
    sample: &dyn Fn(f64) -> Result<(f64, f64)>,
    p0: (f64, f64),
    p1: (f64, f64),
    budget: &mut u32,
) -> Result<f64> {
    let d = principal_angle(p1.1 - p0.1);
    if d.abs() <= 0.5 * std::f64::consts::PI {
        return Ok(d);
    }
    if *budget == 0 || p1.0 - p0.0 < 1e-13 {
        return Err(Error::resolution(
            "argument variation did not settle under subdivision",
        ));
    }
    *budget -= 1;
    let pm = sample(0.5 * (p0.0 + p1.0))?;
    Ok(march_segment(sample, p0, pm, budget)? + march_segment(sample, pm, p1, budget)?)
}

/// The two independent density estimates for a strip and their gap:
/// derivative route `(phi'(sigma2) - phi'(sigma1)) / 2 pi` versus
/// counting route `count / 2T`.
#[derive(Debug, Clone, Copy)]
pub struct DensityReport {
    pub from_derivative: f64,
    pub from_count: f64,
    pub count: u64,
    pub relative_gap: f64,
}

pub fn zero_density_check(
    f: &ExponentialSum,
    sigma1: f64,
    sigma2: f64,
    t_max: f64,
    seed: u64,
) -> Result<DensityReport> {
    let d1 = jessen_derivative(f, sigma1, t_max)?;
    let d2 = jessen_derivative(f, sigma2, t_max)?;
    let from_derivative = (d2 - d1) / (2.0 * std::f64::consts::PI);
    let count = zero_count(f, sigma1, sigma2, t_max, seed)?;
    let from_count = count as f64 / (2.0 * t_max);
    let scale = from_count.abs().max(from_derivative.abs()).max(1e-12);
    Ok(DensityReport {
        from_derivative,
        from_count,
        count,
        relative_gap: (from_derivative - from_count).abs() / scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_term() -> ExponentialSum {
        // 1 - 2^(-s)
        ExponentialSum::dirichlet(&[
            (1, Complex64::new(1.0, 0.0)),
            (2, Complex64::new(-1.0, 0.0)),
        ])
        .unwrap()
    }

    #[test]
    fn evaluation_matches_closed_form() {
        let f = two_term();
        assert!(f.evaluate(Complex64::new(0.0, 0.0)).norm() < 1e-15);
        let v = f.evaluate(Complex64::new(1.0, 0.0));
        assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        // zeros on the imaginary axis at t = 2 pi k / log 2
        let t1 = 2.0 * std::f64::consts::PI / 2f64.ln();
        assert!(f.evaluate(Complex64::new(0.0, t1)).norm() < 1e-14);
    }

    #[test]
    fn vertical_mean_matches_the_affine_limit() {
        // limit is max(0, -sigma log 2)
        let f = two_term();
        let v = jessen_function(&f, -1.0, 1000.0).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-3, "got {v}");
        let v = jessen_function(&f, 1.0, 1000.0).unwrap();
        assert!(v.abs() < 1e-3, "got {v}");
        let v = jessen_function(&f, -2.0, 500.0).unwrap();
        assert!((v - 2.0 * 2f64.ln()).abs() < 2e-3, "got {v}");
    }

    #[test]
    fn derivative_reads_the_slopes() {
        let f = two_term();
        let d = jessen_derivative(&f, -1.0, 500.0).unwrap();
        assert!((d + 2f64.ln()).abs() < 2e-3, "got {d}");
        let d = jessen_derivative(&f, 1.0, 500.0).unwrap();
        assert!(d.abs() < 2e-3, "got {d}");
    }

    #[test]
    fn rectangle_count_hits_the_lattice() {
        // zeros at i * 9.0647 k: |t| < 100 holds 2*11 + 1
        let f = two_term();
        let n = zero_count(&f, -1.0, 1.0, 100.0, 7).unwrap();
        assert_eq!(n, 23);
        // a zero-free box
        let n = zero_count(&f, 0.5, 1.5, 50.0, 7).unwrap();
        assert_eq!(n, 0);
    }

    #[test]
    fn density_routes_agree_for_two_terms() {
        let f = two_term();
        let r = zero_density_check(&f, -1.0, 1.0, 400.0, 11).unwrap();
        let exact = 2f64.ln() / (2.0 * std::f64::consts::PI);
        assert!(
            (r.from_derivative - exact).abs() < 0.02 * exact,
            "derivative route {}",
            r.from_derivative
        );
        assert!(
            (r.from_count - exact).abs() < 0.02 * exact,
            "counting route {}",
            r.from_count
        );
        assert!(r.relative_gap < 0.03, "gap {}", r.relative_gap);
    }

    #[test]
    fn density_routes_agree_for_three_terms() {
        let f = ExponentialSum::dirichlet(&[
            (1, Complex64::new(1.0, 0.0)),
            (2, Complex64::new(1.0, 0.0)),
            (3, Complex64::new(1.0, 0.0)),
        ])
        .unwrap();
        let r = zero_density_check(&f, -3.0, 2.0, 300.0, 3).unwrap();
        assert!(r.count > 0, "expected zeros in the strip");
        assert!(r.relative_gap < 0.05, "gap {}", r.relative_gap);
    }

    #[test]
    fn constructor_rejections() {
        assert!(ExponentialSum::new(vec![]).is_err());
        assert!(ExponentialSum::new(vec![(-1.0, Complex64::new(1.0, 0.0))]).is_err());
        assert!(ExponentialSum::new(vec![
            (1.0, Complex64::new(1.0, 0.0)),
            (1.0, Complex64::new(2.0, 0.0)),
        ])
        .is_err());
        assert!(ExponentialSum::dirichlet(&[(0, Complex64::new(1.0, 0.0))]).is_err());
        let f = two_term();
        assert!(jessen_function(&f, f64::NAN, 10.0).is_err());
        assert!(jessen_function(&f, 0.0, -1.0).is_err());
        assert!(zero_count(&f, 1.0, -1.0, 10.0, 0).is_err());
    }
}

//! Explicit-formula machinery: the arithmetic/archimedean distribution
//! evaluated on compactly supported test functions, the matching sum
//! over nontrivial zeta zeros, and the quadratic form whose negativity
//! on mean-zero functions encodes the zero-locus statement.
//!
//! For a test function `h` on the multiplicative half-line, write
//! `H(u) = h(u) + h(1/u)/u` for `u >= 1` (so `H(1) = 2 h(1)` and, by
//! the chain rule, `H'(1+) = -h(1)` regardless of `h'`). The
//! distribution value is
//!
//! ```text
//! N(h) = sum_{n >= 2} Lambda(n) H(n)
//!      + int_1^B [ H(u) + (H(u) - H(1)) / (u^2 - 1) ] du/u
//!      + (H(1)/2) log(1 - B^-2)
//!      + ((log pi + gamma)/2) H(1)
//! ```
//!
//! with `B` the upper end of the support of `H`, and it equals the
//! counting pairing
//!
//! ```text
//! N(h) = int h du + int h du/u
//!      - sum_rho 2 int u^(-1/2) cos(gamma_rho log u) h(u) du
//! ```
//!
//! summed over the positive zero ordinates `gamma_rho`. Both sides are
//! implemented independently so they can be cross-checked at pure-float
//! accuracy; the quadratic form is `s(f, g) = N(f * g~)` with `*` the
//! multiplicative convolution and `~` the weighted involution.

pub mod testfn;

use std::path::Path;

use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, pairwise_sum};

pub use testfn::TestFunction;

/// Largest integer allowed in the prime-power sum; supports wider than
/// `log(PRIME_SUM_CAP)` would need a sieve rather than trial division.
const PRIME_SUM_CAP: f64 = 1.0e7;

/// von Mangoldt function: `log p` when `n = p^k`, zero otherwise.
pub fn mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut m = n;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            while m % d == 0 {
                m /= d;
            }
            return if m == 1 { (d as f64).ln() } else { 0.0 };
        }
        d += 1;
    }
    // no divisor up to sqrt: n itself is prime
    (n as f64).ln()
}

/// Chebyshev weighted prime-power count `psi(x) = sum_{n <= x} Lambda(n)`.
pub fn chebyshev_psi(x: u64) -> f64 {
    let terms: Vec<f64> = (2..=x).map(mangoldt).filter(|l| *l > 0.0).collect();
    pairwise_sum(&terms)
}

/// Real constants entering the archimedean local term.
#[derive(Debug, Clone, Copy)]
pub struct WeilConstants {
    pub euler_gamma: f64,
    pub zeta_prime_at_minus_one: f64,
}

impl WeilConstants {
    pub fn standard() -> Self {
        WeilConstants {
            euler_gamma: 0.577_215_664_901_532_9,
            zeta_prime_at_minus_one: -0.165_421_143_700_450_93,
        }
    }

    /// The weight of the point mass at `u = 1` in the archimedean
    /// distribution: `(log pi + gamma) / 2`.
    pub fn archimedean_constant(&self) -> f64 {
        0.5 * (std::f64::consts::PI.ln() + self.euler_gamma)
    }

    /// Value at `s = 1` of the complete archimedean density
    /// `1/2 + gamma/2 + log(4 pi)/2 - zeta'(-1)/zeta(-1)`,
    /// using `zeta(-1) = -1/12` exactly.
    pub fn omega_at_one(&self) -> f64 {
        0.5 + 0.5 * self.euler_gamma
            + 0.5 * (4.0 * std::f64::consts::PI).ln()
            + 12.0 * self.zeta_prime_at_minus_one
    }
}

/// The symmetrization `H(u) = h(u) + h(1/u)/u`, defined for `u >= 1`.
fn symmetrized(h: &TestFunction, u: f64) -> f64 {
    h.evaluate(u) + h.evaluate(1.0 / u) / u
}

/// Evaluate the arithmetic/archimedean distribution `N(h)`.
///
/// The main integral is done cell by cell on the function's own
/// logarithmic lattice with 8-point Gauss-Legendre nodes, so the kinks
/// of grid-backed interpolants always sit on panel boundaries; near
/// `u = 1` the integrand has the removable limit `H(1) + H'(1)/2 =
/// (3/2) h(1)`, and interior Gauss nodes never hit the endpoint.
pub fn weil_distribution(h: &TestFunction) -> Result<f64> {
    let (k_lo, k_hi) = h.k_range();
    let k_b = k_hi.max(-k_lo);
    if k_b < 1 {
        return Err(Error::precondition(
            "test function support must extend beyond u = 1",
        ));
    }
    let step = h.log_step();
    let log_b = k_b as f64 * step;
    let h1 = 2.0 * h.evaluate(1.0);

    // prime-power sum over the support of H
    let b_u = log_b.exp();
    if b_u > PRIME_SUM_CAP {
        return Err(Error::resolution(format!(
            "support reaches u = {b_u:.3e}; prime sum capped at {PRIME_SUM_CAP:.0e}"
        )));
    }
    let mut prime_terms = Vec::new();
    for n in 2..=(b_u.floor() as u64) {
        let lam = mangoldt(n);
        if lam > 0.0 {
            let hn = symmetrized(h, n as f64);
            if hn != 0.0 {
                prime_terms.push(lam * hn);
            }
        }
    }
    let prime_sum = pairwise_sum(&prime_terms);

    // archimedean principal-value integral in log coordinates
    let (nodes, weights) = gauss_legendre(8);
    let half = 0.5 * step;
    let mut arch_terms = Vec::with_capacity(k_b as usize * nodes.len());
    for k in 0..k_b {
        let center = (k as f64 + 0.5) * step;
        for (t, w) in nodes.iter().zip(&weights) {
            let x = center + half * t;
            let u = x.exp();
            let hu = symmetrized(h, u);
            let g = hu + (hu - h1) / (u * u - 1.0);
            arch_terms.push(w * half * g);
        }
    }
    let arch = pairwise_sum(&arch_terms);
    let tail = 0.5 * h1 * (1.0 - (-2.0 * log_b).exp()).ln();
    let c = WeilConstants::standard().archimedean_constant();

    Ok(prime_sum + arch + tail + c * h1)
}

/// The hermitian pairing `s(f, g) = N(f * g~)`.
///
/// For `g = f` the convolution is involution-symmetric, so `s(f, f)`
/// is the quadratic form whose non-positivity on functions with
/// vanishing `du` and `du/u` moments is the positivity statement.
pub fn quadratic_form(f: &TestFunction, g: &TestFunction) -> Result<f64> {
    let w = f.mult_convolve(&g.involution())?;
    weil_distribution(&w)
}

/// Read an ascending list of positive zero ordinates, one per line.
pub fn load_zeros(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut zeros = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() {
            continue;
        }
        let v: f64 = s.parse().map_err(|e| Error::Parse {
            line,
            reason: format!("expected a number, got {s:?}: {e}"),
        })?;
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Parse {
                line,
                reason: format!("ordinates must be positive and finite, got {v}"),
            });
        }
        if let Some(prev) = zeros.last() {
            if v <= *prev {
                return Err(Error::Parse {
                    line,
                    reason: format!("ordinates must be strictly ascending ({v} after {prev})"),
                });
            }
        }
        zeros.push(v);
    }
    if zeros.is_empty() {
        return Err(Error::precondition("zero table contains no ordinates"));
    }
    Ok(zeros)
}

/// One oscillatory term of the zero side:
/// `2 int u^(-1/2) cos(gamma log u) h(u) du`.
///
/// Composite Gauss-Legendre with panel width capped both by the
/// oscillation (about one radian of phase per panel) and by the
/// function's lattice spacing.
pub fn spectral_term(h: &TestFunction, gamma: f64) -> f64 {
    let (x_lo, x_hi) = h.log_support();
    let len = x_hi - x_lo;
    let by_phase = (len * (gamma.abs() + 2.0)).ceil() as usize;
    let by_lattice = (len / (8.0 * h.log_step())).ceil() as usize;
    let panels = by_phase.max(by_lattice).max(16);
    let (nodes, weights) = gauss_legendre(8);
    let width = len / panels as f64;
    let mut terms = Vec::with_capacity(panels * nodes.len());
    for p in 0..panels {
        let center = x_lo + (p as f64 + 0.5) * width;
        for (t, w) in nodes.iter().zip(&weights) {
            let x = center + 0.5 * width * t;
            let f = h.evaluate(x.exp());
            terms.push(w * 0.5 * width * (0.5 * x).exp() * (gamma * x).cos() * f);
        }
    }
    2.0 * pairwise_sum(&terms)
}

/// The counting side of the identity: pole contributions minus the sum
/// of [`spectral_term`] over the supplied zero ordinates.
pub fn counting_pair(h: &TestFunction, zeros: &[f64]) -> f64 {
    let zero_terms: Vec<f64> = zeros.iter().map(|g| spectral_term(h, *g)).collect();
    h.integral_du() + h.integral_dstar() - pairwise_sum(&zero_terms)
}

/// Sums a compactly supported function over the positive integer
/// multiples of a step: `v -> sum_{n >= 1} f(n v)`. The support bounds
/// `[a, b]` make the sum finite — only `n` in `[a/v, b/v]` contribute.
pub fn sum_over_multiples(f: &TestFunction, v: f64) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::precondition(format!(
            "multiple-sum step must be positive and finite, got {v}"
        )));
    }
    let (a, b) = f.support();
    let lo = (a / v).ceil().max(1.0);
    let hi = (b / v).floor();
    if hi < lo {
        return Ok(0.0);
    }
    if hi - lo + 1.0 > (1u64 << 24) as f64 {
        return Err(Error::precondition(format!(
            "step {v} puts {} multiples inside the support; refusing beyond 2^24",
            hi - lo + 1.0
        )));
    }
    let terms: Vec<f64> = ((lo as u64)..=(hi as u64))
        .map(|n| f.evaluate(n as f64 * v))
        .collect();
    Ok(pairwise_sum(&terms))
}

//! Lifting a continuous divisor to an almost-periodic point sequence.
//!
//! A pair of density profiles of equal mass describes where zeros and
//! poles concentrate. Feeding the equidistributed digit-reversal values
//! `U(k)` through each density's quantile map turns the profile pair
//! into a two-sided sequence of signed points whose Cesàro pairing with
//! any continuous test function converges to the mass-normalized signed
//! integral of the profile pair.

use std::sync::Arc;

use crate::apseq::APSequence;
use crate::coord::rational_to_f64;
use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, pairwise_sum};

const PANELS: usize = 4096;
const PANEL_ORDER: usize = 8;
const QUANTILE_TOL: f64 = 1e-12;

/// A nonnegative integrable weight on a bounded interval, with a
/// precomputed panel-wise cumulative table for fast accurate inversion.
#[derive(Clone)]
pub struct Density {
    pdf: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    support: (f64, f64),
    /// cumulative integral at each panel boundary, length `PANELS + 1`
    prefix: Vec<f64>,
}

impl std::fmt::Debug for Density {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Density")
            .field("support", &self.support)
            .field("mass", &self.mass())
            .finish_non_exhaustive()
    }
}

impl Density {
    pub fn new(
        pdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: (f64, f64),
    ) -> Result<Self> {
        let (a, b) = support;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::precondition(format!(
                "support must be a bounded interval, got ({a}, {b})"
            )));
        }
        let pdf: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(pdf);
        let (nodes, weights) = gauss_legendre(PANEL_ORDER);
        let h = (b - a) / PANELS as f64;
        let mut prefix = Vec::with_capacity(PANELS + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for i in 0..PANELS {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            let mut contribs = Vec::with_capacity(PANEL_ORDER);
            for (x, w) in nodes.iter().zip(&weights) {
                let v = pdf(mid + half * x);
                if v < -1e-12 {
                    return Err(Error::precondition(format!(
                        "density is negative ({v}) at {}",
                        mid + half * x
                    )));
                }
                contribs.push(w * half * v.max(0.0));
            }
            acc += pairwise_sum(&contribs);
            prefix.push(acc);
        }
        if acc <= 0.0 {
            return Err(Error::precondition("density must have positive mass"));
        }
        Ok(Density { pdf, support, prefix })
    }

    /// Zero profile weight `x (1 - x)` on `(0, 1)`, mass 1/6.
    pub fn fig4_plus() -> Self {
        Density::new(|x| x * (1.0 - x), (0.0, 1.0)).expect("valid preset")
    }

    /// Pole profile weight `2 x (1 - x)^2` on `(0, 1)`, mass 1/6.
    pub fn fig4_minus() -> Self {
        Density::new(|x| 2.0 * x * (1.0 - x) * (1.0 - x), (0.0, 1.0)).expect("valid preset")
    }

    /// Unit weight on `(0, 1)`.
    pub fn uniform() -> Self {
        Density::new(|_| 1.0, (0.0, 1.0)).expect("valid preset")
    }

    /// `6 x (1 - x)` on `(0, 1)`: a unit-mass symmetric bump.
    pub fn beta22() -> Self {
        Density::new(|x| 6.0 * x * (1.0 - x), (0.0, 1.0)).expect("valid preset")
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn mass(&self) -> f64 {
        *self.prefix.last().expect("nonempty table")
    }

    /// Cumulative integral of the weight from the left end to `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let (a, b) = self.support;
        if x <= a {
            return 0.0;
        }
        if x >= b {
            return self.mass();
        }
        let h = (b - a) / PANELS as f64;
        let i = (((x - a) / h) as usize).min(PANELS - 1);
        let lo = a + i as f64 * h;
        let mid = 0.5 * (lo + x);
        let half = 0.5 * (x - lo);
        let (nodes, weights) = gauss_legendre(PANEL_ORDER);
        let mut tail = 0.0;
        for (t, w) in nodes.iter().zip(&weights) {
            tail += w * half * (self.pdf)(mid + half * t).max(0.0);
        }
        self.prefix[i] + tail
    }

    /// Position `x` with `cdf(x) = q * mass` for `q` in `[0, 1]`,
    /// resolved to 1e-12 by bisection.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::argument(format!(
                "quantile argument must lie in [0, 1], got {q}"
            )));
        }
        let (a, b) = self.support;
        if q == 0.0 {
            return Ok(a);
        }
        if q == 1.0 {
            return Ok(b);
        }
        let target = q * self.mass();
        let (mut lo, mut hi) = (a, b);
        while hi - lo > QUANTILE_TOL {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// One lifted point: the index it came from, its position, and whether
/// it counts as a zero (+1) or a pole (-1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftPoint {
    pub k: i64,
    pub position: f64,
    pub sign: i8,
}

/// Push the digit-reversal values `U(k)`, `|k| <= t`, through the two
/// quantile maps: each index contributes one zero from the plus profile
/// and one pole from the minus profile. The profiles must carry equal
/// mass (relative gap below 1e-9) so that the lifted divisor has degree
/// zero.
pub fn build_lift(
    plus: &Density,
    minus: &Density,
    seq: &APSequence,
    t: i64,
) -> Result<Vec<LiftPoint>> {
    if t < 0 {
        return Err(Error::argument("index bound must be nonnegative"));
    }
    let (mp, mm) = (plus.mass(), minus.mass());
    if (mp - mm).abs() > 1e-9 * mp.max(mm) {
        return Err(Error::precondition(format!(
            "profile masses differ: {mp} vs {mm}"
        )));
    }
    let mut out = Vec::with_capacity((2 * t as usize + 1) * 2);
    for k in -t..=t {
        let u = rational_to_f64(&seq.u_value(k));
        out.push(LiftPoint { k, position: plus.quantile(u)?, sign: 1 });
        out.push(LiftPoint { k, position: minus.quantile(u)?, sign: -1 });
    }
    Ok(out)
}

/// Cesàro pairing of the lifted points against a test function: the
/// signed mean `(1 / #indices) * sum sign * psi(position)`. As the index
/// bound grows this converges to
/// `(1/mass) * integral of psi * (plus - minus)`.
pub fn pair_with_test(lift: &[LiftPoint], psi: impl Fn(f64) -> f64) -> Result<f64> {
    if lift.is_empty() {
        return Err(Error::precondition("empty lift"));
    }
    let mut indices: Vec<i64> = lift.iter().map(|p| p.k).collect();
    indices.sort_unstable();
    indices.dedup();
    let vals: Vec<f64> = lift
        .iter()
        .map(|p| p.sign as f64 * psi(p.position))
        .collect();
    Ok(pairwise_sum(&vals) / indices.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_masses() {
        assert!((Density::fig4_plus().mass() - 1.0 / 6.0).abs() < 1e-12);
        assert!((Density::fig4_minus().mass() - 1.0 / 6.0).abs() < 1e-12);
        assert!((Density::uniform().mass() - 1.0).abs() < 1e-12);
        assert!((Density::beta22().mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_matches_closed_forms() {
        // integral of x(1-x) is x^2/2 - x^3/3
        let d = Density::fig4_plus();
        for x in [0.1, 0.2, 0.5, 0.77] {
            let exact = x * x / 2.0 - x * x * x / 3.0;
            assert!((d.cdf(x) - exact).abs() < 1e-12, "x = {x}");
        }
        // integral of 6x(1-x) is 3x^2 - 2x^3
        let b = Density::beta22();
        for x in [0.3, 0.5, 0.9] {
            let exact = 3.0 * x * x - 2.0 * x * x * x;
            assert!((b.cdf(x) - exact).abs() < 1e-12, "x = {x}");
        }
        // integral of 2x(1-x)^2 is x^2 - 4x^3/3 + x^4/2
        let m = Density::fig4_minus();
        for x in [0.25, 0.6] {
            let exact = x * x - 4.0 * x * x * x / 3.0 + x * x * x * x / 2.0;
            assert!((m.cdf(x) - exact).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn quantiles_invert_the_cdf() {
        let b = Density::beta22();
        // symmetric unit-mass bump: the median is the midpoint
        assert!((b.quantile(0.5).unwrap() - 0.5).abs() < 1e-10);
        let d = Density::fig4_plus();
        // cdf(0.2) = 13/750 = 0.104 * (1/6)
        assert!((d.quantile(0.104).unwrap() - 0.2).abs() < 1e-9);
        let u = Density::uniform();
        for q in [0.0, 0.125, 0.5, 0.9, 1.0] {
            assert!((u.quantile(q).unwrap() - q).abs() < 1e-10);
        }
        // inversion round trip away from the flat ends
        for q in [0.05, 0.3, 0.62, 0.99] {
            let x = d.quantile(q).unwrap();
            assert!((d.cdf(x) - q * d.mass()).abs() < 1e-10);
        }
    }

    #[test]
    fn quantile_domain_checks() {
        let d = Density::uniform();
        assert!(d.quantile(-0.1).is_err());
        assert!(d.quantile(1.5).is_err());
        assert!(Density::new(|x| x, (0.0, f64::INFINITY)).is_err());
        assert!(Density::new(|x| x - 0.5, (0.0, 1.0)).is_err());
        assert!(Density::new(|_| 0.0, (0.0, 1.0)).is_err());
    }

    #[test]
    fn lift_points_come_from_quantiles_of_reversal_values() {
        let seq = APSequence::prime(2).unwrap();
        let plus = Density::fig4_plus();
        let minus = Density::fig4_minus();
        let lift = build_lift(&plus, &minus, &seq, 3).unwrap();
        assert_eq!(lift.len(), 14); // 7 indices, two points each
        for p in &lift {
            let u = rational_to_f64(&seq.u_value(p.k));
            let d = if p.sign == 1 { &plus } else { &minus };
            assert!((d.quantile(u).unwrap() - p.position).abs() < 1e-15);
        }
        // degree zero: equally many zeros and poles
        let deg: i64 = lift.iter().map(|p| p.sign as i64).sum();
        assert_eq!(deg, 0);
    }

    #[test]
    fn pairing_reaches_the_signed_profile_integral() {
        let seq = APSequence::prime(2).unwrap();
        let lift = build_lift(
            &Density::fig4_plus(),
            &Density::fig4_minus(),
            &seq,
            2000,
        )
        .unwrap();
        // signed integrals of lambda and lambda^2 against the two
        // profiles are both 1/60; mass normalization gives 0.1
        let m1 = pair_with_test(&lift, |x| x).unwrap();
        assert!((m1 - 0.1).abs() < 5e-3, "first moment {m1}");
        let m2 = pair_with_test(&lift, |x| x * x).unwrap();
        assert!((m2 - 0.1).abs() < 5e-3, "second moment {m2}");
        let m0 = pair_with_test(&lift, |_| 1.0).unwrap();
        assert!(m0.abs() < 1e-12, "zeroth moment {m0}");
    }

    #[test]
    fn mismatched_masses_are_rejected() {
        let seq = APSequence::prime(2).unwrap();
        let res = build_lift(&Density::fig4_plus(), &Density::uniform(), &seq, 5);
        assert!(matches!(res, Err(Error::Precondition(_))));
    }
}

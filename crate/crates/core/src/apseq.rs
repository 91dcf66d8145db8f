//! The digit-reversal almost-periodic sequence.
//!
//! For a base `p` write a nonnegative integer as `sum a_j p^j` and reverse
//! the digits across the radix point: `U(x) = sum a_j p^(-j-1)`. Negative
//! arguments take the limit value along `x + p^k -> x`: with the smallest
//! `k` such that `y = x + p^k > 0`, all digits above position `k` of
//! `x + p^m` are maximal and telescope to `1/p^k`, so
//! `U(x) = U(y) + p^(-k)`. The map is 1/p^m-almost-periodic with periods
//! `p^m` and equidistributes on [0, 1].
//!
//! A strictly increasing divisibility chain `n_1 | n_2 | ...` generalizes
//! the prime-power case; it is stored through its ratio list, implicitly
//! extended by repeating the last ratio.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::coord::rational_to_f64;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct APSequence {
    ratios: Vec<u32>,
}

impl APSequence {
    pub fn prime(p: u32) -> Result<Self> {
        if p < 2 {
            return Err(Error::precondition("base must be >= 2"));
        }
        Ok(APSequence { ratios: vec![p] })
    }

    /// Chain of consecutive ratios `n_{j+1}/n_j`, each >= 2; the final
    /// ratio repeats forever.
    pub fn with_chain(ratios: Vec<u32>) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::precondition("ratio chain must be nonempty"));
        }
        if ratios.iter().any(|r| *r < 2) {
            return Err(Error::precondition("every chain ratio must be >= 2"));
        }
        Ok(APSequence { ratios })
    }

    fn ratio(&self, j: usize) -> u32 {
        *self.ratios.get(j).unwrap_or_else(|| {
            self.ratios.last().expect("nonempty by construction")
        })
    }

    /// `n_k`, the product of the first `k` ratios.
    fn chain_value(&self, k: usize) -> i128 {
        (0..k).fold(1i128, |acc, j| acc * self.ratio(j) as i128)
    }

    /// Digits of `x >= 0`, least significant first.
    fn digits(&self, mut x: i128) -> Vec<u32> {
        debug_assert!(x >= 0);
        let mut out = Vec::new();
        let mut j = 0;
        while x > 0 {
            let r = self.ratio(j) as i128;
            out.push((x % r) as u32);
            x /= r;
            j += 1;
        }
        out
    }

    /// `U(x)` for `x >= 0` as a reduced-form-ready fraction over `n_L`
    /// with `L` the digit count: numerator `sum a_j * n_L / n_{j+1}`.
    fn reversal(&self, x: i128) -> (i128, i128) {
        let digits = self.digits(x);
        let mut den = 1i128;
        for j in 0..digits.len() {
            den *= self.ratio(j) as i128;
        }
        let mut tail = den;
        let mut acc = 0i128;
        for (j, a) in digits.iter().enumerate() {
            tail /= self.ratio(j) as i128;
            acc += *a as i128 * tail;
        }
        (acc, den)
    }

    /// Exact value of the reversed-digit sequence at any integer.
    pub fn u_value(&self, x: i64) -> BigRational {
        if x >= 0 {
            let (num, den) = self.reversal(x as i128);
            return BigRational::new(BigInt::from(num), BigInt::from(den));
        }
        // smallest k with x + n_k > 0; then y < n_k so its digits live
        // strictly below position k and the upper block contributes 1/n_k
        let mut k = 1;
        let mut nk = self.chain_value(1);
        while x as i128 + nk <= 0 {
            k += 1;
            nk *= self.ratio(k - 1) as i128;
        }
        let y = x as i128 + nk;
        let (num, den) = self.reversal(y);
        // U(y) + 1/n_k over the common denominator n_k (den divides n_k)
        BigRational::new(BigInt::from(num * (nk / den) + 1), BigInt::from(nk))
    }

    /// Checks `|U(x + n * n_m) - U(x)| <= 1/n_m` exactly over the given
    /// windows.
    pub fn epsilon_period_check(
        &self,
        m: u32,
        x_window: std::ops::RangeInclusive<i64>,
        n_window: std::ops::RangeInclusive<i64>,
    ) -> bool {
        self.epsilon_period_check_fn(|x| self.u_value(x), m, x_window, n_window)
    }

    /// Same check against an arbitrary value source; lets a harness inject
    /// violations to prove the check has teeth.
    pub fn epsilon_period_check_fn(
        &self,
        u: impl Fn(i64) -> BigRational,
        m: u32,
        x_window: std::ops::RangeInclusive<i64>,
        n_window: std::ops::RangeInclusive<i64>,
    ) -> bool {
        let nm = self.chain_value(m as usize);
        let eps = BigRational::new(BigInt::from(1), BigInt::from(nm));
        for x in x_window {
            let base = u(x);
            for n in n_window.clone() {
                let shifted = match (n as i128).checked_mul(nm).and_then(|d| {
                    i64::try_from(x as i128 + d).ok()
                }) {
                    Some(s) => s,
                    None => return false,
                };
                if (u(shifted) - &base).abs() > eps {
                    return false;
                }
            }
        }
        true
    }

    /// Empirical distribution of `U(k)` over `|k| <= k_max`.
    pub fn empirical_distribution(&self, k_max: i64) -> DistributionFunction {
        let samples = (-k_max..=k_max)
            .map(|k| rational_to_f64(&self.u_value(k)))
            .collect();
        DistributionFunction::from_samples(samples)
    }

    /// For `h` continuous with a value gap: the empirical distribution of
    /// `h(U(k))` over `|k| <= t` is flat across the gap. Returns the exact
    /// plateau height and checks it sits within `1/sqrt(t)` of a fraction
    /// with denominator `n_k` for the largest `k` with `n_k <= t`.
    pub fn gap_plateau_check(
        &self,
        h: impl Fn(f64) -> f64,
        gap: (f64, f64),
        t: i64,
    ) -> Result<BigRational> {
        if t < 2 {
            return Err(Error::argument("window must satisfy t >= 2"));
        }
        if !(gap.0 < gap.1) {
            return Err(Error::argument("gap must be a nonempty open interval"));
        }
        // dense sampling certifies the gap misses the range of h
        let probes = 20_000usize;
        for i in 0..=probes {
            let v = h(i as f64 / probes as f64);
            if v > gap.0 && v < gap.1 {
                return Err(Error::precondition(format!(
                    "h({}) = {v} lands inside the gap",
                    i as f64 / probes as f64
                )));
            }
        }
        let mid = 0.5 * (gap.0 + gap.1);
        let mut count = 0i64;
        for k in -t..=t {
            if h(rational_to_f64(&self.u_value(k))) <= mid {
                count += 1;
            }
        }
        let plateau = BigRational::new(BigInt::from(count), BigInt::from(2 * t + 1));
        // largest k with n_k <= t
        let mut k = 0usize;
        while self.chain_value(k + 1) <= t as i128 {
            k += 1;
        }
        let nk = self.chain_value(k);
        let plateau_f = rational_to_f64(&plateau);
        let nearest = (plateau_f * nk as f64).round() / nk as f64;
        if (plateau_f - nearest).abs() > 1.0 / (t as f64).sqrt() {
            return Err(Error::resolution(format!(
                "plateau {plateau_f} is not near a fraction with denominator {nk}"
            )));
        }
        Ok(plateau)
    }
}

/// Right-continuous empirical distribution of weighted samples.
#[derive(Debug, Clone)]
pub struct DistributionFunction {
    // sorted by value; weights normalized to total 1
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DistributionFunction {
    pub fn from_samples(samples: Vec<f64>) -> Self {
        let n = samples.len().max(1);
        DistributionFunction::from_weighted(
            samples.into_iter().map(|v| (v, 1.0 / n as f64)).collect(),
        )
    }

    pub fn from_weighted(mut samples: Vec<(f64, f64)>) -> Self {
        samples.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("orderable samples"));
        let total: f64 = samples.iter().map(|(_, w)| w).sum();
        let total = if total > 0.0 { total } else { 1.0 };
        let mut acc = 0.0;
        let mut values = Vec::with_capacity(samples.len());
        let mut cumulative = Vec::with_capacity(samples.len());
        for (v, w) in samples {
            acc += w / total;
            values.push(v);
            cumulative.push(acc);
        }
        DistributionFunction { values, cumulative }
    }

    /// Fraction of mass at values `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|v| *v <= x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Kolmogorov-Smirnov distance to the uniform distribution on [0, 1].
    pub fn sup_distance_to_identity(&self) -> f64 {
        let mut sup: f64 = 0.0;
        let mut prev = 0.0;
        for (v, c) in self.values.iter().zip(&self.cumulative) {
            let target = v.clamp(0.0, 1.0);
            sup = sup.max((target - prev).abs()).max((target - c).abs());
            prev = *c;
        }
        sup.max((1.0 - prev).abs())
    }

    /// Sup distance to an arbitrary target CDF over the probe grid.
    pub fn sup_distance_on_grid(&self, target: impl Fn(f64) -> f64, grid: &[f64]) -> f64 {
        grid.iter()
            .map(|x| (self.cdf(*x) - target(*x)).abs())
            .fold(0.0, f64::max)
    }
}

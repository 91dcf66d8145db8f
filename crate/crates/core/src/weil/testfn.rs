//! Compactly supported test functions on the multiplicative half-line.
//!
//! Functions are stored as samples on an absolute logarithmic lattice
//! `u = e^(k h)` whose spacing `h` is a power of two, so that the
//! involution `u -> 1/u` and multiplicative convolution land exactly on
//! lattice points. A constructor-supplied exact evaluator is kept
//! alongside when available; otherwise evaluation uses 4-point cubic
//! interpolation in `log u`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// Default lattice spacing in `log u`.
pub const DEFAULT_LOG_STEP: f64 = 1.0 / 1024.0;

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct TestFunction {
    /// lattice spacing in `log u`, a power of two in [2^-24, 2^-4]
    step: f64,
    /// index of the first lattice node; node `k` sits at `u = e^(k step)`
    k_lo: i64,
    values: Vec<f64>,
    evaluator: Option<Evaluator>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("log_step", &self.step)
            .field("k_range", &(self.k_lo, self.k_hi()))
            .field("samples", &self.values.len())
            .field("has_evaluator", &self.evaluator.is_some())
            .finish()
    }
}

fn check_step(step: f64) -> Result<()> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::precondition("lattice step must be positive"));
    }
    let l = -step.log2();
    if (l - l.round()).abs() > 1e-9 || !(4.0..=24.0).contains(&l) {
        return Err(Error::precondition(format!(
            "lattice step must be a power of two in [2^-24, 2^-4], got {step}"
        )));
    }
    Ok(())
}

/// C^2 ramp: 0 at 0, 1 at 1, with two vanishing derivatives at each end.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

impl TestFunction {
    /// Sample an evaluator on the lattice covering `log_support`; the
    /// evaluator is retained for exact pointwise use.
    pub fn from_fn(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        log_support: (f64, f64),
        log_step: f64,
    ) -> Result<Self> {
        check_step(log_step)?;
        let (lo, hi) = log_support;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::precondition(format!(
                "support must be a bounded interval in log u, got ({lo}, {hi})"
            )));
        }
        let k_lo = (lo / log_step).floor() as i64;
        let k_hi = (hi / log_step).ceil() as i64;
        let values = (k_lo..=k_hi)
            .map(|k| f((k as f64 * log_step).exp()))
            .collect();
        Ok(TestFunction {
            step: log_step,
            k_lo,
            values,
            evaluator: Some(Arc::new(f)),
        })
    }

    /// Wrap existing lattice samples (no exact evaluator).
    pub fn from_samples(values: Vec<f64>, k_lo: i64, log_step: f64) -> Result<Self> {
        check_step(log_step)?;
        if values.len() < 4 {
            return Err(Error::precondition("need at least 4 lattice samples"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::precondition("samples must be finite"));
        }
        Ok(TestFunction { step: log_step, k_lo, values, evaluator: None })
    }

    /// Gaussian in `log u` centered at `center_log` with width `sigma`,
    /// cut to the compact window `center_log +- 6 sigma` by C^2
    /// smoothstep ramps one `sigma` wide. The lattice refines with the
    /// bump so interpolation stays far below the window truncation.
    pub fn gaussian_bump(center_log: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite() && center_log.is_finite()) {
            return Err(Error::precondition("need finite center and positive width"));
        }
        let (lo, hi) = (center_log - 6.0 * sigma, center_log + 6.0 * sigma);
        let mut step = DEFAULT_LOG_STEP.min(1.0 / 16.0);
        while step > sigma / 16.0 && step > 2.0f64.powi(-24) {
            step *= 0.5;
        }
        let f = move |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let x = u.ln();
            if x <= lo || x >= hi {
                return 0.0;
            }
            let window = smoothstep((x - lo) / sigma) * smoothstep((hi - x) / sigma);
            let d = (x - center_log) / sigma;
            (-0.5 * d * d).exp() * window
        };
        TestFunction::from_fn(f, (lo, hi), step)
    }

    pub fn log_step(&self) -> f64 {
        self.step
    }

    fn k_hi(&self) -> i64 {
        self.k_lo + self.values.len() as i64 - 1
    }

    /// Support interval `(a, b)` in `u`.
    pub fn support(&self) -> (f64, f64) {
        (
            (self.k_lo as f64 * self.step).exp(),
            (self.k_hi() as f64 * self.step).exp(),
        )
    }

    /// Lattice index range `(k_lo, k_hi)`; the support in `log u` is
    /// exactly `[k_lo * step, k_hi * step]`.
    pub fn k_range(&self) -> (i64, i64) {
        (self.k_lo, self.k_hi())
    }

    /// Support interval in `log u`.
    pub fn log_support(&self) -> (f64, f64) {
        (self.k_lo as f64 * self.step, self.k_hi() as f64 * self.step)
    }

    pub fn has_evaluator(&self) -> bool {
        self.evaluator.is_some()
    }

    /// Value at `u`: the exact evaluator when present, cubic lattice
    /// interpolation otherwise; zero outside the support.
    pub fn evaluate(&self, u: f64) -> f64 {
        if let Some(e) = &self.evaluator {
            if u <= 0.0 || !u.is_finite() {
                return 0.0;
            }
            return e(u);
        }
        self.interpolate(u)
    }

    /// Cubic interpolation on the lattice, ignoring any evaluator.
    pub fn interpolate(&self, u: f64) -> f64 {
        if u <= 0.0 || !u.is_finite() {
            return 0.0;
        }
        let t = u.ln() / self.step - self.k_lo as f64;
        if t <= 0.0 || t >= (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let j = t.floor() as i64;
        let s = t - j as f64;
        let y = |i: i64| -> f64 {
            let idx = j + i - 1;
            if idx < 0 || idx >= self.values.len() as i64 {
                0.0
            } else {
                self.values[idx as usize]
            }
        };
        let (y0, y1, y2, y3) = (y(0), y(1), y(2), y(3));
        -y0 * s * (s - 1.0) * (s - 2.0) / 6.0
            + y1 * (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0
            - y2 * (s + 1.0) * s * (s - 2.0) / 2.0
            + y3 * (s + 1.0) * s * (s - 1.0) / 6.0
    }

    /// The pushforward under `u -> 1/u` with multiplicative weight:
    /// `f~(u) = f(1/u) / u`. Exact on the lattice: node `k` of the
    /// result reads node `-k` of the source times `e^(-k h)`.
    pub fn involution(&self) -> TestFunction {
        let new_k_lo = -self.k_hi();
        let vals: Vec<f64> = (new_k_lo..=-self.k_lo)
            .map(|k| {
                let src = (-k - self.k_lo) as usize;
                self.values[src] * (-(k as f64 * self.step)).exp()
            })
            .collect();
        let evaluator = self.evaluator.as_ref().map(|e| {
            let e = e.clone();
            let out: Evaluator = Arc::new(move |u: f64| {
                if u <= 0.0 || !u.is_finite() {
                    0.0
                } else {
                    e(1.0 / u) / u
                }
            });
            out
        });
        TestFunction {
            step: self.step,
            k_lo: new_k_lo,
            values: vals,
            evaluator,
        }
    }

    /// Halve the lattice spacing; new midpoint samples come from the
    /// evaluator when present, else from cubic interpolation.
    fn resample_halved(&self) -> TestFunction {
        let step = self.step * 0.5;
        let k_lo = self.k_lo * 2;
        let n = (self.values.len() - 1) * 2 + 1;
        let values = (0..n)
            .map(|i| {
                if i % 2 == 0 {
                    self.values[i / 2]
                } else {
                    let u = ((k_lo + i as i64) as f64 * step).exp();
                    match &self.evaluator {
                        Some(e) => e(u),
                        None => self.interpolate(u),
                    }
                }
            })
            .collect();
        TestFunction {
            step,
            k_lo,
            values,
            evaluator: self.evaluator.clone(),
        }
    }

    fn aligned_with(&self, other: &TestFunction) -> (TestFunction, TestFunction) {
        let mut a = self.clone();
        let mut b = other.clone();
        while a.step > b.step {
            a = a.resample_halved();
        }
        while b.step > a.step {
            b = b.resample_halved();
        }
        (a, b)
    }

    /// Multiplicative convolution `(f * g)(u) = integral f(v) g(u/v) dv/v`,
    /// computed as a discrete convolution on the common (finest) lattice.
    pub fn mult_convolve(&self, other: &TestFunction) -> Result<TestFunction> {
        let (a, b) = self.aligned_with(other);
        let n = a.values.len() + b.values.len() - 1;
        if n > 1 << 22 {
            return Err(Error::resolution("convolution lattice too large"));
        }
        let mut values = vec![0.0f64; n];
        for (i, fa) in a.values.iter().enumerate() {
            if *fa == 0.0 {
                continue;
            }
            for (j, fb) in b.values.iter().enumerate() {
                values[i + j] += fa * fb;
            }
        }
        for v in &mut values {
            *v *= a.step;
        }
        TestFunction::from_samples(values, a.k_lo + b.k_lo, a.step)
    }

    /// Pointwise linear combination `self + c * other` on the common
    /// lattice; keeps an exact evaluator when both sides have one.
    pub fn add_scaled(&self, other: &TestFunction, c: f64) -> Result<TestFunction> {
        if !c.is_finite() {
            return Err(Error::argument("scale must be finite"));
        }
        let (a, b) = self.aligned_with(other);
        let k_lo = a.k_lo.min(b.k_lo);
        let k_hi = a.k_hi().max(b.k_hi());
        let values = (k_lo..=k_hi)
            .map(|k| {
                let va = if (a.k_lo..=a.k_hi()).contains(&k) {
                    a.values[(k - a.k_lo) as usize]
                } else {
                    0.0
                };
                let vb = if (b.k_lo..=b.k_hi()).contains(&k) {
                    b.values[(k - b.k_lo) as usize]
                } else {
                    0.0
                };
                va + c * vb
            })
            .collect();
        let evaluator = match (&a.evaluator, &b.evaluator) {
            (Some(ea), Some(eb)) => {
                let (ea, eb) = (ea.clone(), eb.clone());
                let out: Evaluator = Arc::new(move |u| ea(u) + c * eb(u));
                Some(out)
            }
            _ => None,
        };
        Ok(TestFunction {
            step: a.step,
            k_lo,
            values,
            evaluator,
        })
    }

    pub fn scale(&self, c: f64) -> Result<TestFunction> {
        if !c.is_finite() {
            return Err(Error::argument("scale must be finite"));
        }
        let values = self.values.iter().map(|v| c * v).collect();
        let evaluator = self.evaluator.as_ref().map(|e| {
            let e = e.clone();
            let out: Evaluator = Arc::new(move |u| c * e(u));
            out
        });
        Ok(TestFunction {
            step: self.step,
            k_lo: self.k_lo,
            values,
            evaluator,
        })
    }

    /// `integral f(u) du` by the lattice trapezoid rule (the ends
    /// vanish, so this is spectrally accurate for C^2 contact).
    pub fn integral_du(&self) -> f64 {
        self.integral_against(|_| 1.0)
    }

    /// `integral f(u) du / u`.
    pub fn integral_dstar(&self) -> f64 {
        let terms: Vec<f64> = self.values.clone();
        self.step * pairwise_sum(&terms)
    }

    /// `integral f(u) w(u) du`.
    pub fn integral_against(&self, w: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let u = ((self.k_lo + i as i64) as f64 * self.step).exp();
                v * w(u) * u
            })
            .collect();
        self.step * pairwise_sum(&terms)
    }
}

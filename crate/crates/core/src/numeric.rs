//! Small numerical kernels shared across modules: deterministic summation,
//! adaptive Simpson quadrature and Gauss-Legendre panels.

use crate::error::{Error, Result};

/// Pairwise (tree) reduction. Deterministic for a fixed input order and
/// much better conditioned than a running sum on long series.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

fn simpson_panel(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    (fa + 4.0 * fm + fb) * h / 6.0
}

fn adaptive_simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_panel(fa, flm, fm, m - a);
    let right = simpson_panel(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a).abs() < 1e-14 * (a.abs() + b.abs() + 1.0) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::resolution(format!(
            "adaptive quadrature did not converge on [{a}, {b}]"
        )));
    }
    Ok(
        adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?,
    )
}

/// Adaptive Simpson integral of `f` over `[a, b]` to absolute tolerance
/// `tol`. The integrand must be finite on the closed interval.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::argument("quadrature interval must be finite".to_string()));
    }
    if a == b {
        return Ok(0.0);
    }
    let g: &dyn Fn(f64) -> f64 = &f;
    let fa = g(a);
    let fm = g(0.5 * (a + b));
    let fb = g(b);
    if !(fa.is_finite() && fm.is_finite() && fb.is_finite()) {
        return Err(Error::domain("non-finite integrand sample".to_string()));
    }
    let whole = simpson_panel(fa, fm, fb, b - a);
    adaptive_simpson_rec(g, a, b, fa, fm, fb, whole, tol, 48)
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton
/// iteration on the Legendre recurrence. Accurate to ~1e-15 for n <= 64.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th positive root
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' at x via the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        // the middle node of odd rules is exactly zero
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Fixed-panel Gauss-Legendre integral: `panels` subintervals of [a, b],
/// an `order`-point rule on each. Spectrally accurate per panel for
/// analytic integrands; nodes never touch panel ends.
pub fn gauss_panels(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut vals = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let c = lo + 0.5 * h;
        for (x, w) in xs.iter().zip(&ws) {
            vals.push(w * 0.5 * h * f(c + 0.5 * h * x));
        }
    }
    pairwise_sum(&vals)
}

/// Wraps an angle increment into (-pi, pi].
pub fn principal_angle(mut d: f64) -> f64 {
    use std::f64::consts::PI;
    while d > PI {
        d -= 2.0 * PI;
    }
    while d <= -PI {
        d += 2.0 * PI;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pairwise_matches_naive_on_smooth_data() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.1).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }

    #[test]
    fn simpson_integrates_polynomial_exactly() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 0.0).abs() < 1e-11); // x^4/4 - x^2 at 2 = 4 - 4
    }

    #[test]
    fn simpson_hits_transcendental_target() {
        let v = adaptive_simpson(|x| x.sin(), 0.0, PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn gauss_legendre_5_point_reference() {
        // classical 5-point rule values
        let (x, w) = gauss_legendre(5);
        assert!((x[2] - 0.0).abs() < 1e-15);
        assert!((x[4] - 0.906179845938664).abs() < 1e-12);
        assert!((w[2] - 0.5688888888888889).abs() < 1e-12);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_panels_on_exp() {
        let v = gauss_panels(|x| x.exp(), 0.0, 1.0, 4, 16);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn principal_angle_wraps() {
        assert!((principal_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((principal_angle(-3.0 * PI) - PI).abs() < 1e-12);
    }
}

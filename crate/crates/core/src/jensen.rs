//! Archimedean tropicalization by circle means.
//!
//! For `f` analytic on an annulus, `tau(f)(x)` is the mean of
//! `log |f(e^(-x + i theta))|` over the circle of radius `r = e^(-x)`.
//! Jensen's identity makes this piecewise affine in `x` with slope
//! `-n(x)`, where `n(x)` is the winding number of `f` on that circle; the
//! breakpoints sit at `x = -log |zero|` and the slope jump equals the
//! number of zeros on that modulus.
//!
//! The circle mean uses trapezoidal nodes with doubling until two
//! successive estimates agree; for periodic analytic integrands this is
//! spectrally accurate. When the zero list is known the quadrature runs
//! on the deflated function and the zero contributions enter in closed
//! form `log max(r, |a|)`, which stays accurate even on a zero's circle.

use num_complex::Complex64;
use std::sync::Arc;

use crate::coord::Coord;
use crate::error::{Error, Result};
use crate::pwa::PiecewiseAffine;
use num_bigint::BigInt;
use num_rational::BigRational;

const MEAN_TOL: f64 = 1e-10;
const MEAN_CAP: usize = 1 << 21;
const WINDING_CAP: usize = 1 << 18;
const TINY: f64 = 1e-280;

type Evaluator = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

pub struct AnnulusFunction {
    eval: Evaluator,
    /// radii `0 <= r1 < r2 <= inf`
    annulus: (f64, f64),
    known_zeros: Option<Vec<(Complex64, u32)>>,
    /// evaluator of `f` with all known zeros divided out, when available
    /// in a form that avoids 0/0 at the zeros themselves
    deflated: Option<Evaluator>,
}

impl AnnulusFunction {
    pub fn new(
        eval: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        annulus: (f64, f64),
    ) -> Result<Self> {
        check_annulus(annulus)?;
        Ok(AnnulusFunction {
            eval: Arc::new(eval),
            annulus,
            known_zeros: None,
            deflated: None,
        })
    }

    /// `c * prod (z - a_i)^(m_i)`; remembers the zeros, so circle means
    /// have closed-form zero terms and a constant deflated factor.
    pub fn from_roots(c: Complex64, roots: &[(Complex64, u32)], annulus: (f64, f64)) -> Result<Self> {
        check_annulus(annulus)?;
        if c.norm() == 0.0 {
            return Err(Error::precondition("leading constant must be nonzero"));
        }
        let rs: Vec<(Complex64, u32)> = roots.to_vec();
        let rs_eval = rs.clone();
        let eval = move |z: Complex64| {
            let mut w = c;
            for (a, m) in &rs_eval {
                for _ in 0..*m {
                    w *= z - a;
                }
            }
            w
        };
        Ok(AnnulusFunction {
            eval: Arc::new(eval),
            annulus,
            known_zeros: Some(rs),
            deflated: Some(Arc::new(move |_| c)),
        })
    }

    /// Polynomial `sum c_k z^k`, constant term first.
    pub fn from_coeffs(coeffs: &[Complex64], annulus: (f64, f64)) -> Result<Self> {
        check_annulus(annulus)?;
        if coeffs.is_empty() || coeffs.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::precondition("polynomial must be nonzero"));
        }
        let cs = coeffs.to_vec();
        let eval = move |z: Complex64| {
            let mut w = Complex64::new(0.0, 0.0);
            for c in cs.iter().rev() {
                w = w * z + c;
            }
            w
        };
        AnnulusFunction::new(eval, annulus)
    }

    /// Finite exponential sum `sum c_k exp(w_k z)`.
    pub fn from_exp_terms(terms: &[(Complex64, Complex64)], annulus: (f64, f64)) -> Result<Self> {
        check_annulus(annulus)?;
        if terms.is_empty() {
            return Err(Error::precondition("need at least one term"));
        }
        let ts = terms.to_vec();
        let eval = move |z: Complex64| ts.iter().map(|(w, c)| c * (w * z).exp()).sum();
        AnnulusFunction::new(eval, annulus)
    }

    /// Attaches an externally known zero list (with multiplicities) to an
    /// evaluator-backed function.
    pub fn with_known_zeros(mut self, zeros: Vec<(Complex64, u32)>) -> Self {
        let eval = self.eval.clone();
        let zs = zeros.clone();
        self.deflated = Some(Arc::new(move |z: Complex64| {
            let mut w = eval(z);
            for (a, m) in &zs {
                for _ in 0..*m {
                    w /= z - a;
                }
            }
            w
        }));
        self.known_zeros = Some(zeros);
        self
    }

    /// `g(z) = f(z^n)`; the annulus contracts to the n-th root radii.
    pub fn substitute_power(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::argument("power must be >= 1"));
        }
        let eval = self.eval.clone();
        let annulus = (self.annulus.0.powf(1.0 / n as f64), self.annulus.1.powf(1.0 / n as f64));
        AnnulusFunction::new(move |z| eval(z.powu(n)), annulus)
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    /// Open interval of `x = -log r` covered by the annulus.
    pub fn x_window(&self) -> (f64, f64) {
        (-self.annulus.1.ln(), -self.annulus.0.ln())
    }

    fn check_x(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.x_window();
        if !(x > lo && x < hi) {
            return Err(Error::domain(format!(
                "x = {x} outside the annulus window ({lo}, {hi})"
            )));
        }
        Ok((-x).exp())
    }

    /// Circle mean of `log |f|` at radius `e^(-x)`, starting from
    /// `n_nodes` angles (at least 64) and doubling until two successive
    /// estimates agree to 1e-10.
    pub fn tropicalize(&self, x: f64, n_nodes: usize) -> Result<f64> {
        if n_nodes < 64 {
            return Err(Error::precondition("need at least 64 quadrature nodes"));
        }
        let r = self.check_x(x)?;
        match (&self.known_zeros, &self.deflated) {
            (Some(zeros), Some(base)) => {
                let closed: f64 = zeros
                    .iter()
                    .map(|(a, m)| *m as f64 * r.max(a.norm()).ln())
                    .sum();
                Ok(circle_log_mean(base.as_ref(), r, n_nodes)? + closed)
            }
            _ => circle_log_mean(self.eval.as_ref(), r, n_nodes),
        }
    }

    /// Winding number of `f` along the circle of radius `e^(-x)`; equals
    /// minus the slope of the tropicalization at `x`. Arc steps whose
    /// argument moves more than a quarter turn are subdivided, so the
    /// count stays honest near zero circles; `n_nodes` (at least 64)
    /// must still exceed about four times the enclosed zero count for
    /// the initial sweep to see every turn.
    pub fn winding_number(&self, x: f64, n_nodes: usize) -> Result<i64> {
        if n_nodes < 64 {
            return Err(Error::precondition("need at least 64 sample nodes"));
        }
        let r = self.check_x(x)?;
        winding_once(self.eval.as_ref(), r, n_nodes)
    }

    fn winding_escalating(&self, x: f64, n_nodes: usize) -> Result<i64> {
        let mut n = n_nodes;
        loop {
            match self.winding_number(x, n) {
                Ok(w) => return Ok(w),
                Err(Error::Resolution(_)) if n * 2 <= WINDING_CAP => n *= 2,
                Err(e) => return Err(e),
            }
        }
    }

    /// Winding with a sideways nudge for split points that land on a zero
    /// circle; the nudged abscissa is returned with the count.
    fn winding_near(&self, x: f64, span: f64, n_nodes: usize) -> Result<(f64, i64)> {
        let mut last_err = None;
        for dx in [0.0, 1e-3 * span, -1e-3 * span, 2.7e-2 * span] {
            match self.winding_escalating(x + dx, n_nodes) {
                Ok(w) => return Ok((x + dx, w)),
                Err(e) => last_err = Some(e),
            }
        }
        Err(last_err.expect("at least one attempt"))
    }

    /// The tropicalization as a piecewise-affine function over
    /// `(x_lo, x_hi)`. Winding numbers on a coarse grid bracket every
    /// slope change; bisection narrows each bracket to width 1e-4
    /// (closer changes merge into one breakpoint); the breakpoint is then
    /// pinned far below 1e-6 by intersecting the two adjacent affine
    /// pieces, each anchored by a circle mean taken midway along its
    /// plateau, where quadrature converges fast. Slopes are exact
    /// integers and the result is convex.
    pub fn tropical_profile(
        &self,
        x_lo: f64,
        x_hi: f64,
        grid: usize,
        n_nodes: usize,
    ) -> Result<PiecewiseAffine> {
        let (wlo, whi) = self.x_window();
        if !(x_lo > wlo && x_hi < whi && x_lo < x_hi) {
            return Err(Error::domain(format!(
                "profile window ({x_lo}, {x_hi}) not inside the annulus window ({wlo}, {whi})"
            )));
        }
        if grid < 8 {
            return Err(Error::precondition("profile grid needs at least 8 points"));
        }
        let step = (x_hi - x_lo) / grid as f64;
        let mut xs = Vec::with_capacity(grid + 1);
        let mut ws = Vec::with_capacity(grid + 1);
        for i in 0..=grid {
            // interior sampling: the window ends are open
            let x = if i == 0 {
                x_lo + 1e-9 * step
            } else if i == grid {
                x_hi - 1e-9 * step
            } else {
                x_lo + i as f64 * step
            };
            let (x_used, w) = self.winding_near(x, step, n_nodes)?;
            xs.push(x_used);
            ws.push(w);
        }
        // zeros leave the disc as the radius shrinks: winding numbers
        // must not increase with x
        for i in 1..ws.len() {
            if ws[i] > ws[i - 1] {
                return Err(Error::resolution(format!(
                    "winding increased from {} to {} near x = {}",
                    ws[i - 1],
                    ws[i],
                    xs[i]
                )));
            }
        }
        let mut brackets: Vec<Bracket> = Vec::new();
        for i in 1..xs.len() {
            self.refine_bracket(xs[i - 1], xs[i], ws[i - 1], ws[i], n_nodes, &mut brackets)?;
        }

        // plateau anchor points between consecutive brackets
        let mut anchors = Vec::with_capacity(brackets.len() + 1);
        let mut plateau_w = Vec::with_capacity(brackets.len() + 1);
        let mut left = x_lo;
        let mut w_left = ws[0];
        for b in &brackets {
            if b.w_lo != w_left {
                return Err(Error::resolution(format!(
                    "inconsistent winding plateau near x = {}",
                    b.lo
                )));
            }
            anchors.push(0.5 * (left + b.lo));
            plateau_w.push(w_left);
            left = b.hi;
            w_left = b.w_hi;
        }
        anchors.push(0.5 * (left + x_hi));
        plateau_w.push(w_left);
        let values: Vec<f64> = anchors
            .iter()
            .map(|&a| self.tropicalize(a, n_nodes.max(64)))
            .collect::<Result<_>>()?;

        // breakpoint = intersection of the affine pieces on either side
        let mut breakpoints = Vec::with_capacity(brackets.len());
        let mut slopes = vec![BigRational::from_integer(BigInt::from(-plateau_w[0]))];
        for (i, b) in brackets.iter().enumerate() {
            let (s_l, s_r) = (-(plateau_w[i] as f64), -(plateau_w[i + 1] as f64));
            let cut = (values[i + 1] - values[i] + s_l * anchors[i] - s_r * anchors[i + 1])
                / (s_l - s_r);
            // the intersection (exact anchors, integer slopes) is more
            // accurate than the bracket ends, whose winding calls can be
            // off by the near-circle blind spot when another zero circle
            // sits just outside; only an escape beyond the bracket
            // resolution scale signals a genuinely inconsistent profile
            if !(cut >= b.lo - BRACKET_WIDTH && cut <= b.hi + BRACKET_WIDTH) {
                return Err(Error::resolution(format!(
                    "breakpoint estimate {cut} escaped its bracket ({}, {})",
                    b.lo, b.hi
                )));
            }
            breakpoints.push(Coord::F64(cut));
            slopes.push(BigRational::from_integer(BigInt::from(-plateau_w[i + 1])));
        }
        let out = PiecewiseAffine::new(
            Interval::bounded(Coord::F64(x_lo), Coord::F64(x_hi))?,
            breakpoints,
            slopes,
            (Coord::F64(anchors[0]), Coord::F64(values[0])),
        )?;
        debug_assert!(out.is_convex());
        Ok(out)
    }

    fn refine_bracket(
        &self,
        lo: f64,
        hi: f64,
        w_lo: i64,
        w_hi: i64,
        n_nodes: usize,
        out: &mut Vec<Bracket>,
    ) -> Result<()> {
        if w_lo == w_hi {
            return Ok(());
        }
        if hi - lo <= BRACKET_WIDTH {
            out.push(Bracket { lo, hi, w_lo, w_hi });
            return Ok(());
        }
        // a split point this close to a zero circle can defeat the
        // sampled argument sum; if every nudge fails, keep the whole
        // bracket as one merged breakpoint cluster
        match self.winding_near(0.5 * (lo + hi), hi - lo, n_nodes) {
            Ok((mid, w_mid)) if mid > lo && mid < hi => {
                self.refine_bracket(lo, mid, w_lo, w_mid, n_nodes, out)?;
                self.refine_bracket(mid, hi, w_mid, w_hi, n_nodes, out)
            }
            _ => {
                out.push(Bracket { lo, hi, w_lo, w_hi });
                Ok(())
            }
        }
    }
}

const BRACKET_WIDTH: f64 = 1e-4;

struct Bracket {
    lo: f64,
    hi: f64,
    w_lo: i64,
    w_hi: i64,
}

use crate::coord::Interval;

fn check_annulus(annulus: (f64, f64)) -> Result<()> {
    if !(annulus.0 >= 0.0 && annulus.0 < annulus.1) {
        return Err(Error::precondition(format!(
            "annulus radii must satisfy 0 <= r1 < r2, got ({}, {})",
            annulus.0, annulus.1
        )));
    }
    Ok(())
}

/// Trapezoidal mean of `log |g|` on the circle of radius `r`, doubling
/// node counts until agreement. A node falling on a zero triggers one
/// retry with half-step offset.
fn circle_log_mean(g: &dyn Fn(Complex64) -> Complex64, r: f64, n0: usize) -> Result<f64> {
    let mut offset = 0.0f64;
    let mut n = n0;
    let mut prev: Option<f64> = None;
    loop {
        let mut vals = Vec::with_capacity(n);
        let mut hit_zero = false;
        for k in 0..n {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + offset) / n as f64;
            let z = Complex64::from_polar(r, theta);
            let a = g(z).norm();
            if a < TINY {
                hit_zero = true;
                break;
            }
            vals.push(a.ln());
        }
        if hit_zero {
            if offset == 0.0 {
                offset = 0.5;
                prev = None;
                continue;
            }
            return Err(Error::domain(format!("zero on the circle of radius {r}")));
        }
        let mean = crate::numeric::pairwise_sum(&vals) / n as f64;
        if let Some(p) = prev {
            if (mean - p).abs() <= MEAN_TOL {
                return Ok(mean);
            }
        }
        if n >= MEAN_CAP {
            return Err(Error::resolution(format!(
                "circle mean did not settle at radius {r} within {MEAN_CAP} nodes"
            )));
        }
        prev = Some(mean);
        n *= 2;
    }
}

/// One sampled point on the circle: angle, argument, log-modulus.
#[derive(Clone, Copy)]
struct Sample {
    t: f64,
    a: f64,
    m: f64,
}

fn winding_once(g: &dyn Fn(Complex64) -> Complex64, r: f64, n: usize) -> Result<i64> {
    let sample = |theta: f64| -> Result<Sample> {
        let w = g(Complex64::from_polar(r, theta));
        let norm = w.norm();
        if norm < TINY {
            return Err(Error::domain(format!("zero on the circle of radius {r}")));
        }
        Ok(Sample { t: theta, a: w.arg(), m: norm.ln() })
    };
    let mut offset = 0.0f64;
    'outer: loop {
        let step = 2.0 * std::f64::consts::PI / n as f64;
        let mut pts: Vec<Sample> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            match sample(((k % n) as f64 + offset) * step) {
                Ok(mut s) => {
                    if k == n {
                        s.t += 2.0 * std::f64::consts::PI;
                        s.a = pts[0].a;
                        s.m = pts[0].m;
                    }
                    pts.push(s);
                }
                Err(e) => {
                    if offset == 0.0 {
                        offset = 0.5;
                        continue 'outer;
                    }
                    return Err(e);
                }
            }
        }
        // a zero near the circle shows up as a sharp dip of |f| around
        // its angular position; zoom into the deepest dips so the
        // concentrated argument swing cannot hide between nodes
        let mut dips: Vec<usize> = (0..n)
            .filter(|&k| {
                let prev = pts[(k + n - 1) % n].m;
                let next = pts[(k + 1) % n].m;
                pts[k].m <= prev && pts[k].m <= next
            })
            .collect();
        dips.sort_by(|&i, &j| pts[i].m.partial_cmp(&pts[j].m).unwrap());
        dips.truncate(16);
        let zoom: std::collections::BTreeSet<usize> = dips
            .iter()
            .flat_map(|&k| [(k + n - 1) % n, k])
            .collect();

        let mut budget: u32 = 1 << 20;
        let mut total = 0.0f64;
        for k in 0..n {
            total += if zoom.contains(&k) {
                zoom_dip(&sample, pts[k], pts[k + 1], ZOOM_DEPTH, &mut budget)?
            } else {
                refine_arc(&sample, pts[k], pts[k + 1], &mut budget)?
            };
        }
        let turns = total / (2.0 * std::f64::consts::PI);
        let rounded = turns.round();
        if (turns - rounded).abs() > 0.1 {
            return Err(Error::resolution(format!(
                "accumulated argument {turns} turns is not near an integer"
            )));
        }
        return Ok(rounded as i64);
    }
}

const ZOOM_DEPTH: u32 = 20;

/// Argument increment along an arc, subdividing while a single step
/// moves more than a quarter turn (such steps may hide a full aliased
/// turn near a zero circle).
fn refine_arc(
    sample: &dyn Fn(f64) -> Result<Sample>,
    p0: Sample,
    p1: Sample,
    budget: &mut u32,
) -> Result<f64> {
    let d = crate::numeric::principal_angle(p1.a - p0.a);
    if d.abs() <= 0.5 * std::f64::consts::PI {
        return Ok(d);
    }
    if *budget == 0 || p1.t - p0.t < 1e-14 {
        return Err(Error::resolution(
            "argument variation did not settle under subdivision",
        ));
    }
    *budget -= 1;
    let pm = sample(0.5 * (p0.t + p1.t))?;
    Ok(refine_arc(sample, p0, pm, budget)? + refine_arc(sample, pm, p1, budget)?)
}

/// Argument increment over an arc suspected to contain a modulus dip:
/// descend geometrically toward the dip, resolving the half that moves
/// away from it by the plain quarter-turn rule.
fn zoom_dip(
    sample: &dyn Fn(f64) -> Result<Sample>,
    p0: Sample,
    p1: Sample,
    depth: u32,
    budget: &mut u32,
) -> Result<f64> {
    if depth == 0 || *budget == 0 {
        return refine_arc(sample, p0, p1, budget);
    }
    *budget = budget.saturating_sub(1);
    let pm = sample(0.5 * (p0.t + p1.t))?;
    // a V-shaped dip bottoms out on the side of the deeper endpoint
    if p0.m <= p1.m {
        Ok(zoom_dip(sample, p0, pm, depth - 1, budget)? + refine_arc(sample, pm, p1, budget)?)
    } else {
        Ok(refine_arc(sample, p0, pm, budget)? + zoom_dip(sample, pm, p1, depth - 1, budget)?)
    }
}

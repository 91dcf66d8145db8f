//! Continuous piecewise-affine functions on an interval and their
//! divisors.
//!
//! A function is stored as interior breakpoints, one slope per segment and
//! one anchor value; continuity is structural, there is no per-segment
//! constant that could drift. The laplacian of `f` is the divisor
//! `sum_b (f'(b+) - f'(b-)) . delta_b` over breakpoints `b`; convex
//! functions are exactly those with an effective laplacian.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::coord::{Coord, Interval};
use crate::error::{Error, Result};
use crate::jsonutil;

#[derive(Debug, Clone)]
pub struct PiecewiseAffine {
    domain: Interval,
    breakpoints: Vec<Coord>,
    slopes: Vec<BigRational>,
    anchor: (Coord, Coord),
}

/// Equality of functions, not of representations: anchors may differ as
/// long as the functions agree (the representation itself is canonical).
impl PartialEq for PiecewiseAffine {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain
            && self.breakpoints == other.breakpoints
            && self.slopes == other.slopes
            && other
                .evaluate(&self.anchor.0)
                .is_ok_and(|v| v == self.anchor.1)
    }
}

/// Finite formal sum of points with rational multiplicities. Atoms are
/// kept sorted by position with zero multiplicities pruned.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Divisor {
    atoms: Vec<(Coord, BigRational)>,
}

impl PiecewiseAffine {
    /// `slopes.len()` must be `breakpoints.len() + 1`; breakpoints strictly
    /// increasing and interior to `domain`; adjacent slopes distinct (the
    /// representation is minimal); the anchor point interior to `domain`.
    pub fn new(
        domain: Interval,
        breakpoints: Vec<Coord>,
        slopes: Vec<BigRational>,
        anchor: (Coord, Coord),
    ) -> Result<Self> {
        if slopes.len() != breakpoints.len() + 1 {
            return Err(Error::precondition(format!(
                "need {} slopes for {} breakpoints, got {}",
                breakpoints.len() + 1,
                breakpoints.len(),
                slopes.len()
            )));
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::precondition(
                    "breakpoints must be strictly increasing",
                ));
            }
        }
        for b in &breakpoints {
            if !domain.contains(b) {
                return Err(Error::precondition(format!(
                    "breakpoint {b} outside the open domain"
                )));
            }
        }
        for w in slopes.windows(2) {
            if w[0] == w[1] {
                return Err(Error::precondition(
                    "adjacent segments with equal slope must be merged",
                ));
            }
        }
        if !domain.contains(&anchor.0) {
            return Err(Error::precondition(format!(
                "anchor point {} outside the open domain",
                anchor.0
            )));
        }
        Ok(PiecewiseAffine {
            domain,
            breakpoints,
            slopes,
            anchor,
        })
    }

    /// Single affine piece `x -> value + slope * (x - at)`.
    pub fn single(domain: Interval, slope: BigRational, at: Coord, value: Coord) -> Result<Self> {
        PiecewiseAffine::new(domain, vec![], vec![slope], (at, value))
    }

    /// Builds from possibly non-minimal data: merges adjacent equal slopes.
    fn from_raw(
        domain: Interval,
        breakpoints: Vec<Coord>,
        slopes: Vec<BigRational>,
        anchor: (Coord, Coord),
    ) -> Result<Self> {
        let mut bks: Vec<Coord> = Vec::with_capacity(breakpoints.len());
        let mut sls: Vec<BigRational> = vec![slopes[0].clone()];
        for (b, s) in breakpoints.into_iter().zip(slopes.into_iter().skip(1)) {
            if s == *sls.last().unwrap() {
                continue;
            }
            bks.push(b);
            sls.push(s);
        }
        PiecewiseAffine::new(domain, bks, sls, anchor)
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn breakpoints(&self) -> &[Coord] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[BigRational] {
        &self.slopes
    }

    pub fn anchor(&self) -> (&Coord, &Coord) {
        (&self.anchor.0, &self.anchor.1)
    }

    /// Exact when `x`, the anchor and all crossed breakpoints are rational.
    pub fn evaluate(&self, x: &Coord) -> Result<Coord> {
        if !x.is_finite() || !self.domain.contains(x) {
            return Err(Error::domain(format!("{x} outside the open domain")));
        }
        let (a, va) = (&self.anchor.0, &self.anchor.1);
        let (lo, hi) = if a <= x { (a, x) } else { (x, a) };
        // cut [lo, hi] at every interior breakpoint and integrate slopes
        let mut cuts: Vec<&Coord> = vec![lo];
        for b in &self.breakpoints {
            if b > lo && b < hi {
                cuts.push(b);
            }
        }
        cuts.push(hi);
        let mut acc = Coord::zero();
        for w in cuts.windows(2) {
            // (w0, w1) contains no breakpoint, so it lies in the segment
            // right of w0
            let seg = self.breakpoints.iter().take_while(|b| *b <= w[0]).count();
            let len = w[1].sub(w[0]);
            acc = acc.add(&len.mul_rat(&self.slopes[seg]));
        }
        if a <= x {
            Ok(va.add(&acc))
        } else {
            Ok(va.sub(&acc))
        }
    }

    /// Divisor of slope jumps `f'(b+) - f'(b-)`; exact rationals.
    pub fn laplacian(&self) -> Divisor {
        let atoms = self
            .breakpoints
            .iter()
            .enumerate()
            .map(|(i, b)| (b.clone(), &self.slopes[i + 1] - &self.slopes[i]))
            .collect();
        Divisor { atoms }
    }

    pub fn is_convex(&self) -> bool {
        self.slopes.windows(2).all(|w| w[0] < w[1])
    }

    /// `x -> f(n x)` for integer `n >= 1`: breakpoints divide by `n`,
    /// slopes multiply by `n`, the domain shrinks accordingly.
    pub fn scale_argument(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::argument("scale factor must be >= 1"));
        }
        let nn = BigRational::from_integer(BigInt::from(n));
        PiecewiseAffine::new(
            self.domain.scale_down(n),
            self.breakpoints.iter().map(|b| b.div_rat(&nn)).collect(),
            self.slopes.iter().map(|s| s * &nn).collect(),
            (self.anchor.0.div_rat(&nn), self.anchor.1.clone()),
        )
    }

    fn same_domain(&self, other: &Self) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::precondition(
                "operands live on different domains",
            ));
        }
        Ok(())
    }

    /// Union of both breakpoint sets, ascending, without duplicates.
    fn merged_breakpoints(&self, other: &Self) -> Vec<Coord> {
        let mut out: Vec<Coord> = Vec::with_capacity(self.breakpoints.len() + other.breakpoints.len());
        let (mut i, mut j) = (0, 0);
        while i < self.breakpoints.len() || j < other.breakpoints.len() {
            let pick_left = match (self.breakpoints.get(i), other.breakpoints.get(j)) {
                (Some(a), Some(b)) => a <= b,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => unreachable!(),
            };
            let c = if pick_left {
                i += 1;
                self.breakpoints[i - 1].clone()
            } else {
                j += 1;
                other.breakpoints[j - 1].clone()
            };
            if out.last().map_or(true, |last| *last != c) {
                out.push(c);
            }
        }
        out
    }

    /// Slope on the open segment immediately right of `cut` (or the first
    /// segment when `cut` is `None`, i.e. the lower domain end).
    fn slope_right_of(&self, cut: Option<&Coord>) -> &BigRational {
        match cut {
            None => &self.slopes[0],
            Some(c) => {
                let k = self.breakpoints.iter().take_while(|b| *b <= c).count();
                &self.slopes[k]
            }
        }
    }

    /// Pointwise sum; both operands must share the domain exactly.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_domain(other)?;
        let cuts = self.merged_breakpoints(other);
        let mut slopes = Vec::with_capacity(cuts.len() + 1);
        slopes.push(self.slope_right_of(None) + other.slope_right_of(None));
        for c in &cuts {
            slopes.push(self.slope_right_of(Some(c)) + other.slope_right_of(Some(c)));
        }
        let x0 = if let Some(c) = cuts.first() {
            c.clone()
        } else {
            self.domain.interior_point()
        };
        let v0 = self.evaluate(&x0)?.add(&other.evaluate(&x0)?);
        PiecewiseAffine::from_raw(self.domain.clone(), cuts, slopes, (x0, v0))
    }

    /// Pointwise maximum. Crossing points are computed in exact rational
    /// arithmetic whenever both lines are rational.
    pub fn pointwise_max(&self, other: &Self) -> Result<Self> {
        self.same_domain(other)?;
        let cuts = self.merged_breakpoints(other);

        // closed walk over the merged segments; each is affine for both
        let mut piece_cuts: Vec<Coord> = Vec::new();
        let mut piece_slopes: Vec<BigRational> = Vec::new();
        let n_seg = cuts.len() + 1;
        for k in 0..n_seg {
            let lo = if k == 0 { self.domain.lo.clone() } else { Some(cuts[k - 1].clone()) };
            let hi = if k == n_seg - 1 { self.domain.hi.clone() } else { Some(cuts[k].clone()) };
            let left_cut = if k == 0 { None } else { Some(&cuts[k - 1]) };
            let sf = self.slope_right_of(left_cut).clone();
            let sg = other.slope_right_of(left_cut).clone();
            let seg = Interval { lo: lo.clone(), hi: hi.clone() };
            let r = seg.interior_point();
            let vf = self.evaluate(&r)?;
            let vg = other.evaluate(&r)?;
            let dv = vf.sub(&vg);
            let ds = &sf - &sg;

            let mut emit = |slope: BigRational, cut: Option<Coord>| {
                if let Some(c) = cut {
                    piece_cuts.push(c);
                    piece_slopes.push(slope);
                } else if piece_slopes.is_empty() {
                    piece_slopes.push(slope);
                } else {
                    // same segment continues; slope recorded at entry
                }
            };

            if ds.is_zero() {
                let s = if dv >= Coord::zero() { sf } else { sg };
                if k == 0 {
                    emit(s, None);
                } else {
                    emit(s, Some(cuts[k - 1].clone()));
                }
                continue;
            }
            // f - g = ds * (x - xc) with xc the crossing abscissa
            let xc = r.sub(&dv.div_rat(&ds));
            let strictly_inside = seg.contains(&xc);
            let (first, second) = if ds.is_positive() { (sg, sf) } else { (sf, sg) };
            let entry = if k == 0 { None } else { Some(cuts[k - 1].clone()) };
            if strictly_inside {
                emit(first, entry);
                emit(second, Some(xc));
            } else {
                // no interior crossing: the winner is constant on the piece
                let s = if xc <= r {
                    // r (and the whole piece around it) sits right of xc
                    if ds.is_positive() { second } else { first }
                } else if ds.is_positive() {
                    first
                } else {
                    second
                };
                emit(s, entry);
            }
        }

        let x0 = if let Some(c) = piece_cuts.first() {
            c.clone()
        } else {
            self.domain.interior_point()
        };
        let vf = self.evaluate(&x0)?;
        let vg = other.evaluate(&x0)?;
        let v0 = if vf >= vg { vf } else { vg };
        PiecewiseAffine::from_raw(self.domain.clone(), piece_cuts, piece_slopes, (x0, v0))
    }

    /// Restriction to a subinterval of the domain.
    pub fn restrict(&self, iv: &Interval) -> Result<Self> {
        let lo = match (&self.domain.lo, &iv.lo) {
            (Some(a), Some(b)) => Some(if a >= b { a.clone() } else { b.clone() }),
            (Some(a), None) => Some(a.clone()),
            (None, b) => b.clone(),
        };
        let hi = match (&self.domain.hi, &iv.hi) {
            (Some(a), Some(b)) => Some(if a <= b { a.clone() } else { b.clone() }),
            (Some(a), None) => Some(a.clone()),
            (None, b) => b.clone(),
        };
        let dom = Interval::new(lo, hi)?;
        let mut bks = Vec::new();
        let mut sls = vec![];
        let mut first_slope: Option<BigRational> = None;
        for (i, s) in self.slopes.iter().enumerate() {
            // segment i spans (breakpoints[i-1], breakpoints[i])
            let seg_lo = if i == 0 { None } else { Some(&self.breakpoints[i - 1]) };
            let seg_hi = self.breakpoints.get(i);
            let overlaps = match (seg_hi, &dom.lo) {
                (Some(h), Some(l)) if *h <= *l => false,
                _ => match (seg_lo, &dom.hi) {
                    (Some(l), Some(h)) if *l >= *h => false,
                    _ => true,
                },
            };
            if overlaps {
                if first_slope.is_none() {
                    first_slope = Some(s.clone());
                } else {
                    bks.push(seg_lo.unwrap().clone());
                    sls.push(s.clone());
                }
            }
        }
        let mut slopes = vec![first_slope.ok_or_else(|| Error::domain("empty restriction"))?];
        slopes.extend(sls);
        let x0 = dom.interior_point();
        let v0 = self.evaluate(&x0)?;
        PiecewiseAffine::new(dom, bks, slopes, (x0, v0))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "domain": jsonutil::interval_to_value(&self.domain),
            "breakpoints": self.breakpoints.iter().map(jsonutil::coord_to_value).collect::<Vec<_>>(),
            "slopes": self.slopes.iter().map(jsonutil::rat_to_value).collect::<Vec<_>>(),
            "anchor": [jsonutil::coord_to_value(&self.anchor.0), jsonutil::coord_to_value(&self.anchor.1)],
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::argument("expected a JSON object"))?;
        let get = |k: &str| {
            obj.get(k)
                .ok_or_else(|| Error::argument(format!("missing field {k:?}")))
        };
        let domain = jsonutil::interval_from_value(get("domain")?)?;
        let breakpoints = get("breakpoints")?
            .as_array()
            .ok_or_else(|| Error::argument("breakpoints must be an array"))?
            .iter()
            .map(jsonutil::coord_from_value)
            .collect::<Result<Vec<_>>>()?;
        let slopes = get("slopes")?
            .as_array()
            .ok_or_else(|| Error::argument("slopes must be an array"))?
            .iter()
            .map(jsonutil::rat_from_value)
            .collect::<Result<Vec<_>>>()?;
        let anchor_arr = get("anchor")?
            .as_array()
            .ok_or_else(|| Error::argument("anchor must be [x, value]"))?;
        if anchor_arr.len() != 2 {
            return Err(Error::argument("anchor must be [x, value]"));
        }
        let anchor = (
            jsonutil::coord_from_value(&anchor_arr[0])?,
            jsonutil::coord_from_value(&anchor_arr[1])?,
        );
        PiecewiseAffine::new(domain, breakpoints, slopes, anchor)
    }
}

impl Divisor {
    pub fn new(mut atoms: Vec<(Coord, BigRational)>) -> Result<Self> {
        atoms.retain(|(_, m)| !m.is_zero());
        for w in atoms.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::precondition(
                    "divisor atoms must be sorted by strictly increasing position",
                ));
            }
        }
        Ok(Divisor { atoms })
    }

    pub fn from_unsorted(atoms: Vec<(Coord, BigRational)>) -> Self {
        let mut merged: Vec<(Coord, BigRational)> = Vec::with_capacity(atoms.len());
        let mut atoms = atoms;
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("orderable positions"));
        for (p, m) in atoms {
            match merged.last_mut() {
                Some((q, acc)) if *q == p => *acc += m,
                _ => merged.push((p, m)),
            }
        }
        merged.retain(|(_, m)| !m.is_zero());
        Divisor { atoms: merged }
    }

    pub fn atoms(&self) -> &[(Coord, BigRational)] {
        &self.atoms
    }

    pub fn degree(&self) -> BigRational {
        self.atoms
            .iter()
            .fold(BigRational::zero(), |acc, (_, m)| acc + m)
    }

    pub fn is_effective(&self) -> bool {
        self.atoms.iter().all(|(_, m)| !m.is_negative())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut all = self.atoms.clone();
        all.extend(other.atoms.iter().cloned());
        Divisor::from_unsorted(all)
    }

    pub fn neg(&self) -> Self {
        Divisor {
            atoms: self.atoms.iter().map(|(p, m)| (p.clone(), -m)).collect(),
        }
    }

    pub fn restrict(&self, iv: &Interval) -> Self {
        Divisor {
            atoms: self
                .atoms
                .iter()
                .filter(|(p, _)| iv.contains(p))
                .cloned()
                .collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "atoms": self.atoms.iter()
                .map(|(p, m)| json!([jsonutil::coord_to_value(p), jsonutil::rat_to_value(m)]))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let atoms = v
            .get("atoms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::argument("expected {\"atoms\": [[pos, mult], ...]}"))?;
        let mut out = Vec::with_capacity(atoms.len());
        for a in atoms {
            let pair = a
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::argument("atom must be [position, multiplicity]"))?;
            out.push((
                jsonutil::coord_from_value(&pair[0])?,
                jsonutil::rat_from_value(&pair[1])?,
            ));
        }
        Divisor::new(out)
    }
}

/// Smallest effective solution of `D + laplacian(f) >= 0` by convex
/// correction: each pole of `D` of multiplicity `-n < 0` contributes
/// `n * max(0, x - pole)`. Requires integer multiplicities and atoms
/// interior to `domain`.
pub fn rr_solve(d: &Divisor, domain: &Interval) -> Result<PiecewiseAffine> {
    for (p, m) in d.atoms() {
        if !m.is_integer() {
            return Err(Error::precondition(format!(
                "multiplicity {m} at {p} is not an integer"
            )));
        }
        if !domain.contains(p) {
            return Err(Error::precondition(format!(
                "divisor atom at {p} outside the domain"
            )));
        }
    }
    let poles: Vec<(Coord, BigRational)> = d
        .atoms()
        .iter()
        .filter(|(_, m)| m.is_negative())
        .map(|(p, m)| (p.clone(), -m))
        .collect();
    if poles.is_empty() {
        return PiecewiseAffine::single(
            domain.clone(),
            BigRational::zero(),
            domain.interior_point(),
            Coord::zero(),
        );
    }
    let mut slopes = vec![BigRational::zero()];
    let mut bks = Vec::with_capacity(poles.len());
    for (p, k) in &poles {
        bks.push(p.clone());
        slopes.push(slopes.last().unwrap() + k);
    }
    let anchor = (bks[0].clone(), Coord::zero());
    PiecewiseAffine::new(domain.clone(), bks, slopes, anchor)
}

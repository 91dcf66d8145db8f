//! Non-archimedean tropicalization.
//!
//! A series is known through the p-adic valuations of its coefficients.
//! Its tropicalization on the annulus coordinate `x = v(z)` is
//! `tau(x) = max_n (-n*x - v(a_n))`, the upper envelope of one line per
//! monomial. The envelope is computed by lower convex hull of the points
//! `(n, v(a_n))` followed by duality: a hull segment of slope `m` and
//! horizontal length `l` corresponds to a tropical zero at `x = -m` of
//! multiplicity `l`, which is also the count of roots of valuation `-m`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;

use crate::coord::{Coord, Interval};
use crate::error::{Error, Result};
use crate::jsonutil;
use crate::pwa::{Divisor, PiecewiseAffine};

/// Dense polynomial over Q with exact arithmetic; index = exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() || coeffs.iter().all(Zero::is_zero) {
            return Err(Error::precondition("the zero polynomial has no polygon"));
        }
        Ok(RationalPoly { coeffs })
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Monic product of `(X - r)` over the given roots, expanded exactly.
    pub fn from_roots(roots: &[BigRational]) -> Self {
        let mut c = vec![BigRational::one()];
        for r in roots {
            let mut next = vec![BigRational::zero(); c.len() + 1];
            for (i, ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= ci * r;
            }
            c = next;
        }
        // from_roots yields a monic polynomial, never zero
        RationalPoly::new(c).expect("nonzero by construction")
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut c = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RationalPoly::new(c).expect("product of nonzero polynomials")
    }

    /// `f(X) -> f(X^n)`.
    pub fn substitute_power(&self, n: u32) -> Self {
        let mut c = vec![BigRational::zero(); (self.coeffs.len() - 1) * n as usize + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[i * n as usize] = a.clone();
        }
        RationalPoly::new(c).expect("nonzero by construction")
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn int_valuation(p: u32, n: &BigInt) -> u64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0u64;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational; `None` for zero.
pub fn padic_valuation(p: u32, r: &BigRational) -> Option<BigRational> {
    if r.is_zero() {
        return None;
    }
    let v = int_valuation(p, r.numer()) as i64 - int_valuation(p, r.denom()) as i64;
    Some(BigRational::from_integer(BigInt::from(v)))
}

/// A series over Q_p seen through coefficient valuations, restricted to an
/// annulus given as the open interval of valuations `x = v(z)` it covers.
#[derive(Debug, Clone)]
pub struct ValuedSeries {
    p: u32,
    coeffs: BTreeMap<i64, BigRational>,
    annulus: Interval,
    backing: Option<RationalPoly>,
}

impl ValuedSeries {
    /// `coeffs` are `(exponent, valuation)` pairs for the nonzero
    /// coefficients; zero coefficients are simply absent.
    pub fn new(p: u32, coeffs: Vec<(i64, BigRational)>, annulus: Interval) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::precondition(format!("{p} is not prime")));
        }
        if coeffs.is_empty() {
            return Err(Error::precondition(
                "a series needs at least one nonzero coefficient",
            ));
        }
        let mut map = BTreeMap::new();
        for (n, v) in coeffs {
            if map.insert(n, v).is_some() {
                return Err(Error::precondition(format!("duplicate exponent {n}")));
            }
        }
        Ok(ValuedSeries {
            p,
            coeffs: map,
            annulus,
            backing: None,
        })
    }

    /// Derives coefficient valuations from an explicit polynomial over Q
    /// and keeps the polynomial for exact product arithmetic.
    pub fn from_rational_poly(p: u32, poly: RationalPoly, annulus: Interval) -> Result<Self> {
        let coeffs = poly
            .coeffs()
            .iter()
            .enumerate()
            .filter_map(|(n, c)| padic_valuation(p, c).map(|v| (n as i64, v)))
            .collect();
        let mut s = ValuedSeries::new(p, coeffs, annulus)?;
        s.backing = Some(poly);
        Ok(s)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn annulus(&self) -> &Interval {
        &self.annulus
    }

    pub fn backing(&self) -> Option<&RationalPoly> {
        self.backing.as_ref()
    }

    /// Vertices of the lower convex hull of `(n, v(a_n))`, ascending in n,
    /// with collinear interior points collapsed. Exact arithmetic.
    fn lower_hull(&self) -> Vec<(i64, BigRational)> {
        let pts: Vec<(i64, BigRational)> =
            self.coeffs.iter().map(|(n, v)| (*n, v.clone())).collect();
        let mut hull: Vec<(i64, BigRational)> = Vec::with_capacity(pts.len());
        for pt in pts {
            while hull.len() >= 2 {
                let o = &hull[hull.len() - 2];
                let a = &hull[hull.len() - 1];
                // pop `a` unless slope(o,a) < slope(a,pt); equality pops
                // too, collapsing collinear points
                let lhs = (&a.1 - &o.1) * BigRational::from_integer(BigInt::from(pt.0 - a.0));
                let rhs = (&pt.1 - &a.1) * BigRational::from_integer(BigInt::from(a.0 - o.0));
                if lhs >= rhs {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        hull
    }

    /// The tropicalization as an exact piecewise-affine function on the
    /// annulus interval. Slopes are `-n` over hull exponents `n`, so the
    /// result is convex with integer slopes for integer exponents.
    pub fn tropicalize(&self) -> Result<PiecewiseAffine> {
        let hull = self.lower_hull();
        // hull segment slopes ascend; tau slopes are -n for hull vertices
        // n taken descending, with a breakpoint at -m per segment slope m
        let mut breakpoints: Vec<Coord> = Vec::with_capacity(hull.len() - 1);
        let mut slopes: Vec<BigRational> = Vec::with_capacity(hull.len());
        for w in hull.windows(2).rev() {
            let dn = BigRational::from_integer(BigInt::from(w[1].0 - w[0].0));
            let m = (&w[1].1 - &w[0].1) / dn;
            breakpoints.push(Coord::Rat(-m));
        }
        for (n, _) in hull.iter().rev() {
            slopes.push(BigRational::from_integer(BigInt::from(-n)));
        }
        // anchor on the line of the largest hull exponent at x = 0:
        // tau(0) = -v for that vertex... the segment containing any x left
        // of all breakpoints belongs to the LAST hull vertex; anchoring is
        // easiest on the first hull vertex line at the rightmost region.
        let (n0, v0) = &hull[0];
        let x_anchor = match breakpoints.last() {
            // strictly right of every breakpoint the active line is the
            // one of the smallest exponent n0
            Some(b) => b.add(&Coord::from_int(1)),
            None => Coord::zero(),
        };
        let v_anchor = x_anchor
            .mul_rat(&BigRational::from_integer(BigInt::from(-n0)))
            .sub(&Coord::Rat(v0.clone()));
        let full = PiecewiseAffine::new(
            Interval::whole_line(),
            breakpoints,
            slopes,
            (x_anchor, v_anchor),
        )?;
        full.restrict(&self.annulus)
    }

    /// Multiset of root valuations inside the annulus, read off the
    /// polygon: slope `m`, length `l` gives `l` roots at `x = -m`.
    /// Requires a polynomial (no negative exponents).
    pub fn root_valuations(&self) -> Result<Divisor> {
        if self.coeffs.keys().next().is_some_and(|n| *n < 0) {
            return Err(Error::precondition(
                "root counting needs a polynomial, found negative exponents",
            ));
        }
        let hull = self.lower_hull();
        let atoms = hull
            .windows(2)
            .map(|w| {
                let len = BigRational::from_integer(BigInt::from(w[1].0 - w[0].0));
                let m = (&w[1].1 - &w[0].1) / &len;
                (Coord::Rat(-m), len)
            })
            .collect();
        Ok(Divisor::from_unsorted(atoms).restrict(&self.annulus))
    }

    /// Exact product of two polynomial-backed series over the same prime;
    /// the result lives on the intersection of the annuli.
    pub fn product(&self, other: &Self) -> Result<ValuedSeries> {
        if self.p != other.p {
            return Err(Error::precondition(format!(
                "prime mismatch: {} vs {}",
                self.p, other.p
            )));
        }
        let (a, b) = match (&self.backing, &other.backing) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::precondition(
                    "product needs both series backed by explicit rational polynomials",
                ))
            }
        };
        let annulus = intersect(&self.annulus, &other.annulus)?;
        ValuedSeries::from_rational_poly(self.p, a.mul(b), annulus)
    }

    /// `f(X) -> f(X^n)`: exponents multiply by `n`, the annulus interval
    /// contracts by `n`.
    pub fn substitute_power(&self, n: u32) -> Result<ValuedSeries> {
        if n == 0 {
            return Err(Error::argument("power must be >= 1"));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, v)| (k * n as i64, v.clone()))
            .collect();
        let mut s = ValuedSeries::new(self.p, coeffs, self.annulus.scale_down(n))?;
        s.backing = self.backing.as_ref().map(|b| b.substitute_power(n));
        Ok(s)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "coeffs": self.coeffs.iter()
                .map(|(n, v)| json!([n, jsonutil::rat_to_value(v)]))
                .collect::<Vec<_>>(),
            "annulus": jsonutil::interval_to_value(&self.annulus),
        })
    }

    /// Accepts either valuation data (`"coeffs"`) or an explicit rational
    /// polynomial (`"poly"`, constant term first).
    pub fn from_json(v: &Value) -> Result<Self> {
        let p = v
            .get("p")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::argument("missing prime field \"p\""))?;
        let p = u32::try_from(p).map_err(|_| Error::argument("prime out of range"))?;
        let annulus = match v.get("annulus") {
            Some(a) => jsonutil::interval_from_value(a)?,
            None => Interval::whole_line(),
        };
        if let Some(poly) = v.get("poly") {
            let arr = poly
                .as_array()
                .ok_or_else(|| Error::argument("\"poly\" must be an array of rationals"))?;
            let coeffs = arr
                .iter()
                .map(jsonutil::rat_from_value)
                .collect::<Result<Vec<_>>>()?;
            return ValuedSeries::from_rational_poly(p, RationalPoly::new(coeffs)?, annulus);
        }
        let arr = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::argument("need \"coeffs\" [[n, v], ...] or \"poly\""))?;
        let mut coeffs = Vec::with_capacity(arr.len());
        for pair in arr {
            let pair = pair
                .as_array()
                .filter(|q| q.len() == 2)
                .ok_or_else(|| Error::argument("coefficient entry must be [n, valuation]"))?;
            let n = pair[0]
                .as_i64()
                .ok_or_else(|| Error::argument("exponent must be an integer"))?;
            coeffs.push((n, jsonutil::rat_from_value(&pair[1])?));
        }
        ValuedSeries::new(p, coeffs, annulus)
    }
}

fn intersect(a: &Interval, b: &Interval) -> Result<Interval> {
    let lo = match (&a.lo, &b.lo) {
        (Some(x), Some(y)) => Some(if x >= y { x.clone() } else { y.clone() }),
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    };
    let hi = match (&a.hi, &b.hi) {
        (Some(x), Some(y)) => Some(if x <= y { x.clone() } else { y.clone() }),
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    };
    Interval::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn whole() -> Interval {
        Interval::whole_line()
    }

    /// 1 + X + pX^2: the classical two-segment polygon.
    fn quadratic(p: u32) -> ValuedSeries {
        ValuedSeries::from_rational_poly(
            p,
            RationalPoly::new(vec![rat(1, 1), rat(1, 1), rat(p as i64, 1)]).unwrap(),
            whole(),
        )
        .unwrap()
    }

    #[test]
    fn quadratic_tropicalization() {
        let f = quadratic(2);
        let t = f.tropicalize().unwrap();
        assert_eq!(t.breakpoints(), &[Coord::from_int(-1), Coord::from_int(0)]);
        assert_eq!(t.slopes(), &[rat(-2, 1), rat(-1, 1), rat(0, 1)]);
        assert!(t.is_convex());
        // envelope values: at x = -2 the -2x-1 line wins
        assert_eq!(t.evaluate(&Coord::from_int(-2)).unwrap(), Coord::from_int(3));
        assert_eq!(t.evaluate(&Coord::from_int(5)).unwrap(), Coord::from_int(0));
    }

    #[test]
    fn quadratic_root_valuations() {
        // one unit root (Hensel: 1 + X has the simple root -1 mod p) and
        // one of valuation -1 (root product has valuation -1)
        let d = quadratic(2).root_valuations().unwrap();
        assert_eq!(
            d.atoms(),
            &[
                (Coord::from_int(-1), rat(1, 1)),
                (Coord::from_int(0), rat(1, 1))
            ]
        );
    }

    #[test]
    fn polygon_matches_construction_by_roots() {
        for p in [2u32, 3, 5] {
            let poly = RationalPoly::from_roots(&[rat(1, 1), rat(p as i64, 1)]);
            let f = ValuedSeries::from_rational_poly(p, poly, whole()).unwrap();
            let d = f.root_valuations().unwrap();
            assert_eq!(
                d.atoms(),
                &[
                    (Coord::from_int(0), rat(1, 1)),
                    (Coord::from_int(1), rat(1, 1))
                ],
                "p = {p}"
            );
        }
    }

    #[test]
    fn collinear_points_collapse_to_single_segment() {
        // 1 + pX + p^2 X^2: both roots have valuation -1
        let f = ValuedSeries::new(
            2,
            vec![(0, rat(0, 1)), (1, rat(1, 1)), (2, rat(2, 1))],
            whole(),
        )
        .unwrap();
        let t = f.tropicalize().unwrap();
        assert_eq!(t.breakpoints(), &[Coord::from_int(-1)]);
        assert_eq!(t.slopes(), &[rat(-2, 1), rat(0, 1)]);
        let d = f.root_valuations().unwrap();
        assert_eq!(d.atoms(), &[(Coord::from_int(-1), rat(2, 1))]);
    }

    #[test]
    fn ramified_segment_gives_fractional_valuation() {
        // 1 + 2X^2 over Q_2: both roots have valuation -1/2
        let f = ValuedSeries::from_rational_poly(
            2,
            RationalPoly::new(vec![rat(1, 1), rat(0, 1), rat(2, 1)]).unwrap(),
            whole(),
        )
        .unwrap();
        let d = f.root_valuations().unwrap();
        assert_eq!(d.atoms(), &[(Coord::Rat(rat(-1, 2)), rat(2, 1))]);
    }

    #[test]
    fn annulus_restriction_drops_outside_roots() {
        // roots at valuations 0 and 1; the open interval (1/2, inf)
        // keeps only the second
        let iv = Interval::new(Some(Coord::from_ratio(1, 2)), None).unwrap();
        let poly = RationalPoly::from_roots(&[rat(1, 1), rat(2, 1)]);
        let f = ValuedSeries::from_rational_poly(2, poly, iv).unwrap();
        let d = f.root_valuations().unwrap();
        assert_eq!(d.atoms(), &[(Coord::from_int(1), rat(1, 1))]);
    }

    #[test]
    fn tropical_zeros_equal_polygon_roots() {
        let f = quadratic(5);
        let zeros = f.tropicalize().unwrap().laplacian();
        let roots = f.root_valuations().unwrap();
        assert_eq!(zeros, roots);
    }

    #[test]
    fn product_adds_tropicalizations_exactly() {
        let f = quadratic(3);
        let g = ValuedSeries::from_rational_poly(
            3,
            RationalPoly::from_roots(&[rat(3, 1), rat(1, 3)]),
            whole(),
        )
        .unwrap();
        let fg = f.product(&g).unwrap();
        let sum = f.tropicalize().unwrap().add(&g.tropicalize().unwrap()).unwrap();
        assert_eq!(fg.tropicalize().unwrap(), sum);
        let d = fg.root_valuations().unwrap();
        assert_eq!(d.degree(), rat(4, 1));
    }

    #[test]
    fn substitution_scales_the_argument() {
        let f = quadratic(2);
        let g = f.substitute_power(3).unwrap();
        let lhs = g.tropicalize().unwrap();
        let rhs = f.tropicalize().unwrap().scale_argument(3).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn monomial_has_no_breakpoints() {
        let f = ValuedSeries::new(2, vec![(3, rat(2, 1))], whole()).unwrap();
        let t = f.tropicalize().unwrap();
        assert!(t.breakpoints().is_empty());
        assert_eq!(t.slopes(), &[rat(-3, 1)]);
        assert_eq!(t.evaluate(&Coord::from_int(0)).unwrap(), Coord::from_int(-2));
        assert!(f.root_valuations().unwrap().atoms().is_empty());
    }

    #[test]
    fn valuation_of_rationals() {
        assert_eq!(padic_valuation(2, &rat(12, 1)), Some(rat(2, 1)));
        assert_eq!(padic_valuation(2, &rat(3, 8)), Some(rat(-3, 1)));
        assert_eq!(padic_valuation(5, &rat(7, 3)), Some(rat(0, 1)));
        assert_eq!(padic_valuation(3, &rat(0, 1)), None);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ValuedSeries::new(4, vec![(0, rat(0, 1))], whole()).is_err());
        assert!(ValuedSeries::new(2, vec![], whole()).is_err());
        assert!(ValuedSeries::new(2, vec![(0, rat(0, 1)), (0, rat(1, 1))], whole()).is_err());
        let laurent = ValuedSeries::new(2, vec![(-1, rat(0, 1)), (1, rat(0, 1))], whole()).unwrap();
        assert!(laurent.root_valuations().is_err());
        assert!(laurent.product(&laurent).is_err());
        assert!(RationalPoly::new(vec![rat(0, 1)]).is_err());
    }

    #[test]
    fn json_round_trip_and_poly_input() {
        let f = quadratic(2);
        let back = ValuedSeries::from_json(&f.to_json()).unwrap();
        assert_eq!(back.tropicalize().unwrap(), f.tropicalize().unwrap());

        let v: Value = serde_json::from_str(
            r#"{"p": 2, "poly": ["1", "1", "1/2"], "annulus": ["-inf", "inf"]}"#,
        )
        .unwrap();
        let g = ValuedSeries::from_json(&v).unwrap();
        // valuations (0,0), (1,0), (2,-1): the middle point lies above the
        // chord, so the polygon is the single slope -1/2 segment and both
        // roots -1 +- i have valuation 1/2 (their norm is 2)
        let d = g.root_valuations().unwrap();
        assert_eq!(d.atoms(), &[(Coord::Rat(rat(1, 2)), rat(2, 1))]);
    }
}

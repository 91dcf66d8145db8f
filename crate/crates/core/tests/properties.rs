//! Randomized property tests for the library invariants.
//!
//! Exact contracts (rational arithmetic, index keys, digit maps) are
//! asserted with exact equality; float contracts carry the tolerance
//! stated on the corresponding API. Every expected value is produced by
//! an oracle local to this file, independent of the code path under
//! test.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use tropos_core::apseq::APSequence;
use tropos_core::coord::{rational_to_f64, Coord, Interval};
use tropos_core::jessen::{jessen_function, zero_count, ExponentialSum};
use tropos_core::lift::{build_lift, pair_with_test, Density, LiftPoint};
use tropos_core::newton::{padic_valuation, RationalPoly, ValuedSeries};
use tropos_core::numeric::adaptive_simpson;
use tropos_core::pwa::{rr_solve, Divisor, PiecewiseAffine};
use tropos_core::weil::testfn::TestFunction;
use tropos_core::weil::{counting_pair, weil_distribution};
use tropos_core::witt::{
    holomorphy_residual, IndexKey, LeafGridFunction, WittElement,
};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn arb_rat(max_num: i64, max_den: i64) -> impl Strategy<Value = BigRational> {
    (-max_num..=max_num, 1..=max_den).prop_map(|(n, d)| rat(n, d))
}

fn arb_nonzero_rat(max_num: i64, max_den: i64) -> impl Strategy<Value = BigRational> {
    (1..=max_num, 1..=max_den, any::<bool>()).prop_map(|(n, d, neg)| {
        let r = rat(n, d);
        if neg {
            -r
        } else {
            r
        }
    })
}

// ---------------------------------------------------------------------
// piecewise-affine functions and divisors
// ---------------------------------------------------------------------

/// A random piecewise-affine function on [-100, 100], carried together
/// with the kink data it was built from so tests can compute expected
/// divisors without calling the code under test.
#[derive(Debug, Clone)]
struct PwaSpec {
    kinks: Vec<(BigRational, BigRational)>, // (position, slope jump), sorted
    slopes: Vec<BigRational>,
}

fn arb_pwa_spec() -> impl Strategy<Value = PwaSpec> {
    (
        arb_rat(40, 6),
        prop::collection::vec((arb_rat(50, 8), arb_nonzero_rat(9, 4)), 0..6),
    )
        .prop_map(|(base, raw)| {
            let mut merged: BTreeMap<BigRational, BigRational> = BTreeMap::new();
            for (pos, jump) in raw {
                *merged.entry(pos).or_insert_with(BigRational::zero) += jump;
            }
            merged.retain(|_, j| !j.is_zero());
            let kinks: Vec<_> = merged.into_iter().collect();
            let mut slopes = vec![base];
            for (_, jump) in &kinks {
                let next = slopes.last().expect("nonempty") + jump;
                slopes.push(next);
            }
            PwaSpec { kinks, slopes }
        })
}

fn wide_domain() -> Interval {
    Interval::bounded(Coord::from_int(-100), Coord::from_int(100)).expect("valid")
}

fn build_pwa(spec: &PwaSpec) -> PiecewiseAffine {
    PiecewiseAffine::new(
        wide_domain(),
        spec.kinks.iter().map(|(p, _)| Coord::Rat(p.clone())).collect(),
        spec.slopes.clone(),
        (Coord::from_int(-99), Coord::zero()),
    )
    .expect("spec produces a valid function")
}

fn expected_laplacian(spec: &PwaSpec) -> Divisor {
    Divisor::from_unsorted(
        spec.kinks
            .iter()
            .map(|(p, j)| (Coord::Rat(p.clone()), j.clone()))
            .collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The slope-jump divisor is linear: the divisor of a sum is the sum
    /// of the divisors, exactly.
    #[test]
    fn pwa_laplacian_is_additive(a in arb_pwa_spec(), b in arb_pwa_spec()) {
        let (f, g) = (build_pwa(&a), build_pwa(&b));
        let sum = f.add(&g).expect("same domain");
        prop_assert_eq!(
            sum.laplacian(),
            expected_laplacian(&a).add(&expected_laplacian(&b))
        );
    }

    /// Counting multiplicities over a window recovers the slope change
    /// across it, exactly: the whole domain and a random sub-window
    /// bounded by non-breakpoint sample points.
    #[test]
    fn pwa_degree_counts_slope_change(
        spec in arb_pwa_spec(),
        ia in 0usize..64,
        ib in 0usize..64,
    ) {
        let f = build_pwa(&spec);
        let d = f.laplacian();
        let total = spec.slopes.last().expect("nonempty").clone()
            - spec.slopes.first().expect("nonempty").clone();
        prop_assert_eq!(d.degree(), total);

        // one interior sample point per affine piece
        let n = spec.kinks.len();
        let mut pts = vec![rat(-99, 1)];
        for w in spec.kinks.windows(2) {
            pts.push((&w[0].0 + &w[1].0) / rat(2, 1));
        }
        if n >= 1 {
            pts.push(rat(99, 1));
            let mut i = ia % (n + 1);
            let mut j = ib % (n + 1);
            if i == j {
                j = (i + 1) % (n + 1);
            }
            if i > j {
                std::mem::swap(&mut i, &mut j);
            }
            let window = Interval::bounded(
                Coord::Rat(pts[i].clone()),
                Coord::Rat(pts[j].clone()),
            )
            .expect("ordered");
            prop_assert_eq!(
                d.restrict(&window).degree(),
                &spec.slopes[j] - &spec.slopes[i]
            );
        }
    }

    /// Rescaling the argument by n divides every kink position by n and
    /// multiplies its multiplicity by n, exactly.
    #[test]
    fn pwa_argument_scaling_pushes_kinks(spec in arb_pwa_spec(), n in 1u32..=5) {
        let f = build_pwa(&spec);
        let scaled = f.scale_argument(n).expect("scaling succeeds");
        let nr = rat(n as i64, 1);
        let expected = Divisor::from_unsorted(
            spec.kinks
                .iter()
                .map(|(p, j)| (Coord::Rat(p / &nr), j * &nr))
                .collect(),
        );
        prop_assert_eq!(scaled.laplacian(), expected);
    }

    /// A function is convex exactly when its slope-jump divisor is
    /// effective.
    #[test]
    fn pwa_convexity_iff_effective_divisor(spec in arb_pwa_spec()) {
        let f = build_pwa(&spec);
        prop_assert_eq!(f.is_convex(), f.laplacian().is_effective());
    }

    /// The pole-clearing solver always returns a correction with integer
    /// slopes whose divisor cancels every pole: the corrected divisor is
    /// effective atom by atom.
    #[test]
    fn pwa_pole_clearing_is_effective(
        raw in prop::collection::vec(
            (arb_rat(45, 6), 1i64..=5, any::<bool>()),
            1..6,
        ),
    ) {
        let mut merged: BTreeMap<BigRational, BigRational> = BTreeMap::new();
        for (pos, m, neg) in raw {
            let mult = if neg { rat(-m, 1) } else { rat(m, 1) };
            *merged.entry(pos).or_insert_with(BigRational::zero) += mult;
        }
        let d = Divisor::from_unsorted(
            merged
                .into_iter()
                .map(|(p, m)| (Coord::Rat(p), m))
                .collect(),
        );
        let g = rr_solve(&d, &wide_domain()).expect("integer divisor");
        prop_assert!(g.slopes().iter().all(|s| s.is_integer()));
        prop_assert!(d.add(&g.laplacian()).is_effective());
    }
}

// ---------------------------------------------------------------------
// valuation polygons
// ---------------------------------------------------------------------

fn arb_prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3u32), Just(5u32)]
}

/// Coefficient list with nonzero ends, degree >= 1.
fn arb_poly_coeffs() -> impl Strategy<Value = Vec<BigRational>> {
    (
        arb_nonzero_rat(30, 6),
        prop::collection::vec(arb_rat(30, 6), 0..5),
        arb_nonzero_rat(30, 6),
    )
        .prop_map(|(lo, mid, hi)| {
            let mut v = vec![lo];
            v.extend(mid);
            v.push(hi);
            v
        })
}

fn series(p: u32, coeffs: Vec<BigRational>) -> ValuedSeries {
    let poly = RationalPoly::new(coeffs).expect("nonzero ends");
    ValuedSeries::from_rational_poly(p, poly, Interval::whole_line())
        .expect("valid series")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// For a polynomial with known rational roots, the kinks of the
    /// valuation polygon and the root-valuation routine both reproduce
    /// the multiset of p-adic root valuations, exactly.
    #[test]
    fn newton_polygon_zeros_are_root_valuations(
        p in arb_prime(),
        roots in prop::collection::vec(arb_nonzero_rat(40, 9), 1..6),
    ) {
        let poly = RationalPoly::from_roots(&roots);
        let s = ValuedSeries::from_rational_poly(p, poly, Interval::whole_line())
            .expect("valid series");
        let expected = Divisor::from_unsorted(
            roots
                .iter()
                .map(|r| {
                    let v = padic_valuation(p, r).expect("nonzero root");
                    (Coord::Rat(v), BigRational::one())
                })
                .collect(),
        );
        prop_assert_eq!(
            s.tropicalize().expect("polygon").laplacian(),
            expected.clone()
        );
        prop_assert_eq!(s.root_valuations().expect("valuations"), expected);
    }

    /// Valuation polygons turn products into sums, exactly.
    #[test]
    fn newton_tropicalization_is_multiplicative(
        p in arb_prime(),
        ca in arb_poly_coeffs(),
        cb in arb_poly_coeffs(),
    ) {
        let (s, t) = (series(p, ca), series(p, cb));
        let st = s.product(&t).expect("same prime");
        let lhs = st.tropicalize().expect("polygon");
        let rhs = s
            .tropicalize()
            .expect("polygon")
            .add(&t.tropicalize().expect("polygon"))
            .expect("same domain");
        prop_assert_eq!(lhs, rhs);
    }

    /// Substituting X -> X^n rescales the polygon's argument by n,
    /// exactly, as functions.
    #[test]
    fn newton_substitution_rescales_argument(
        p in arb_prime(),
        coeffs in arb_poly_coeffs(),
        n in 1u32..=4,
    ) {
        let s = series(p, coeffs);
        let lhs = s
            .substitute_power(n)
            .expect("substitution")
            .tropicalize()
            .expect("polygon");
        let rhs = s
            .tropicalize()
            .expect("polygon")
            .scale_argument(n)
            .expect("scaling");
        prop_assert_eq!(lhs, rhs);
    }

    /// Every valuation polygon is convex with integer slopes, even for
    /// arbitrary rational coefficient valuations on sparse exponents.
    #[test]
    fn newton_polygon_is_convex_with_integer_slopes(
        p in arb_prime(),
        raw in prop::collection::vec((-12i64..=12, arb_rat(40, 8)), 1..6),
    ) {
        let mut coeffs: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (e, v) in raw {
            coeffs.insert(e, v);
        }
        let s = ValuedSeries::new(
            p,
            coeffs.into_iter().collect(),
            Interval::whole_line(),
        )
        .expect("valid data");
        let t = s.tropicalize().expect("polygon");
        prop_assert!(t.is_convex());
        prop_assert!(t.slopes().iter().all(|s| s.is_integer()));
    }
}

// ---------------------------------------------------------------------
// digit-reversal sequences
// ---------------------------------------------------------------------

fn arb_chain() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(2u32..=5, 1..=3)
}

/// n_k for a ratio chain with the final ratio repeating, computed
/// independently of the library.
fn chain_value(ratios: &[u32], k: usize) -> i128 {
    (0..k).fold(1i128, |acc, j| {
        acc * *ratios.get(j).unwrap_or(ratios.last().expect("nonempty")) as i128
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Values stay in [0, 1] and their reduced denominators divide some
    /// chain level n_k, exactly.
    #[test]
    fn apseq_values_live_on_the_chain_lattice(
        ratios in arb_chain(),
        x in -1_000_000i64..=1_000_000,
    ) {
        let seq = APSequence::with_chain(ratios.clone()).expect("valid chain");
        let u = seq.u_value(x);
        prop_assert!(u >= BigRational::zero());
        prop_assert!(u <= BigRational::one());
        let denom = u.denom().clone();
        let mut nk = BigInt::one();
        let mut divides = false;
        for k in 0..=64usize {
            if (&nk % &denom).is_zero() {
                divides = true;
                break;
            }
            let ratio = *ratios.get(k).unwrap_or(ratios.last().expect("nonempty"));
            nk *= BigInt::from(ratio);
        }
        prop_assert!(divides, "denominator {} not a chain level divisor", u.denom());
    }

    /// When two numbers add without digit carries, their reversed values
    /// add exactly.
    #[test]
    fn apseq_carry_free_sums_are_additive(
        (p, digit_splits) in (0usize..4).prop_flat_map(|pi| {
            let p = [2u32, 3, 5, 7][pi];
            let digit = (0..p).prop_flat_map(|t| (Just(t), 0..=t));
            (Just(p), prop::collection::vec(digit, 1..=10))
        }),
    ) {
        let seq = APSequence::prime(p).expect("valid base");
        let mut x = 0i64;
        let mut y = 0i64;
        let mut scale = 1i64;
        for (total, first) in digit_splits {
            x += first as i64 * scale;
            y += (total - first) as i64 * scale;
            scale *= p as i64;
        }
        prop_assert_eq!(seq.u_value(x + y), seq.u_value(x) + seq.u_value(y));
    }

    /// The negative-argument limit value satisfies the same folding
    /// identity at every admissible chain level, not just the smallest.
    #[test]
    fn apseq_negative_fold_is_level_independent(
        ratios in arb_chain(),
        x in -1_000_000i64..=-1,
    ) {
        let seq = APSequence::with_chain(ratios.clone()).expect("valid chain");
        let base = seq.u_value(x);
        let mut k = 1;
        while x as i128 + chain_value(&ratios, k) <= 0 {
            k += 1;
        }
        for level in k..k + 3 {
            let nk = chain_value(&ratios, level);
            let shifted = seq.u_value(x + nk as i64);
            let fold = shifted + BigRational::new(BigInt::one(), BigInt::from(nk));
            prop_assert_eq!(&base, &fold, "level {} disagrees", level);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Below the period p^m the map is a bijection onto the lattice
    /// {j / p^m}, exactly.
    #[test]
    fn apseq_bijective_below_period(
        (p, m) in (0usize..3).prop_flat_map(|i| {
            let (p, m_max) = [(2u32, 11u32), (3, 6), (5, 4)][i];
            (Just(p), 1..=m_max)
        }),
    ) {
        let seq = APSequence::prime(p).expect("valid base");
        let period = (p as i64).pow(m);
        let mut values: Vec<BigRational> =
            (0..period).map(|j| seq.u_value(j)).collect();
        values.sort();
        for (j, v) in values.iter().enumerate() {
            prop_assert_eq!(v, &rat(j as i64, period));
        }
    }
}

// ---------------------------------------------------------------------
// signed quantile lifts
// ---------------------------------------------------------------------

fn arb_density_pair() -> impl Strategy<Value = (Density, Density)> {
    prop_oneof![
        Just((Density::fig4_plus(), Density::fig4_minus())),
        Just((Density::uniform(), Density::beta22())),
    ]
}

fn poly_eval(c: [f64; 4], x: f64) -> f64 {
    c[0] + x * (c[1] + x * (c[2] + x * c[3]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The pairing is linear in the test function and flips sign exactly
    /// when the roles of the two profiles are swapped.
    #[test]
    fn lift_pairing_linear_and_antisymmetric(
        (dp, dm) in arb_density_pair(),
        p in prop_oneof![Just(2u32), Just(3u32)],
        t in 20i64..=150,
        c1 in prop::array::uniform4(-2.0f64..2.0),
        c2 in prop::array::uniform4(-2.0f64..2.0),
        a in -3.0f64..3.0,
    ) {
        let seq = APSequence::prime(p).expect("valid base");
        let lift = build_lift(&dp, &dm, &seq, t).expect("equal masses");
        let p1 = pair_with_test(&lift, |x| poly_eval(c1, x)).expect("nonempty");
        let p2 = pair_with_test(&lift, |x| poly_eval(c2, x)).expect("nonempty");
        let combined = pair_with_test(&lift, |x| {
            a * poly_eval(c1, x) + poly_eval(c2, x)
        })
        .expect("nonempty");
        prop_assert!((combined - (a * p1 + p2)).abs() <= 1e-9 * (1.0 + a.abs()));

        let swapped = build_lift(&dm, &dp, &seq, t).expect("equal masses");
        let ps = pair_with_test(&swapped, |x| poly_eval(c1, x)).expect("nonempty");
        prop_assert!((ps + p1).abs() <= 1e-11 * (1.0 + p1.abs()));
    }

    /// Rebuilding a lift is bit-for-bit deterministic and places exactly
    /// one point of each sign at every integer height.
    #[test]
    fn lift_rebuild_is_bit_identical(
        (dp, dm) in arb_density_pair(),
        t in 20i64..=150,
    ) {
        let seq = APSequence::prime(2).expect("valid base");
        let first = build_lift(&dp, &dm, &seq, t).expect("equal masses");
        let second = build_lift(&dp, &dm, &seq, t).expect("equal masses");
        prop_assert_eq!(first.len(), second.len());
        for (u, v) in first.iter().zip(&second) {
            prop_assert_eq!(u.k, v.k);
            prop_assert_eq!(u.sign, v.sign);
            prop_assert_eq!(u.position.to_bits(), v.position.to_bits());
        }
        let mut per_height: BTreeMap<i64, (u32, u32)> = BTreeMap::new();
        for LiftPoint { k, sign, .. } in &first {
            let e = per_height.entry(*k).or_insert((0, 0));
            if *sign > 0 {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
        prop_assert_eq!(per_height.len() as i64, 2 * t + 1);
        for counts in per_height.values() {
            prop_assert_eq!(*counts, (1u32, 1u32));
        }
    }
}

// ---------------------------------------------------------------------
// phase means and strip zero counts
// ---------------------------------------------------------------------

/// Random short Dirichlet-style sum with indices drawn from disjoint
/// pools so they never collide.
fn arb_exp_sum() -> impl Strategy<Value = Vec<(u64, Complex64)>> {
    (
        1u64..=2,
        3u64..=4,
        prop::option::of(5u64..=6),
        prop::collection::vec((0.3f64..2.0, 0.0f64..std::f64::consts::TAU), 3),
    )
        .prop_map(|(n1, n2, n3, cs)| {
            let mut terms = vec![
                (n1, Complex64::from_polar(cs[0].0, cs[0].1)),
                (n2, Complex64::from_polar(cs[1].0, cs[1].1)),
            ];
            if let Some(n) = n3 {
                terms.push((n, Complex64::from_polar(cs[2].0, cs[2].1)));
            }
            terms
        })
}

/// Smallest |f| along the vertical segment sigma + i[-t, t].
fn min_on_vertical(f: &ExponentialSum, sigma: f64, t: f64) -> f64 {
    let steps = (2.0 * t / 0.05).ceil() as usize;
    (0..=steps)
        .map(|i| {
            let ti = -t + 2.0 * t * i as f64 / steps as f64;
            f.evaluate(Complex64::new(sigma, ti)).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Smallest |f| along the horizontal segment [s1, s2] + i*t.
fn min_on_horizontal(f: &ExponentialSum, s1: f64, s2: f64, t: f64) -> f64 {
    let steps = ((s2 - s1) / 0.02).ceil() as usize;
    (0..=steps)
        .map(|i| {
            let s = s1 + (s2 - s1) * i as f64 / steps as f64;
            f.evaluate(Complex64::new(s, t)).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Zero counts add exactly over adjacent strips. Configurations with
    /// zeros too close to a shared boundary (where counting would have
    /// to perturb the box) are discarded rather than asserted.
    #[test]
    fn jessen_adjacent_strip_counts_add(
        terms in arb_exp_sum(),
        sigma_mid in -0.9f64..0.9,
        seed in any::<u64>(),
    ) {
        let f = ExponentialSum::dirichlet(&terms).expect("valid terms");
        let t = 60.0;
        prop_assume!(min_on_vertical(&f, -2.0, t) > 0.03);
        prop_assume!(min_on_vertical(&f, 2.0, t) > 0.03);
        prop_assume!(min_on_vertical(&f, sigma_mid, t) > 0.03);
        prop_assume!(min_on_horizontal(&f, -2.0, 2.0, t) > 0.03);
        prop_assume!(min_on_horizontal(&f, -2.0, 2.0, -t) > 0.03);
        let left = zero_count(&f, -2.0, sigma_mid, t, seed).expect("clean box");
        let right = zero_count(&f, sigma_mid, 2.0, t, seed).expect("clean box");
        let whole = zero_count(&f, -2.0, 2.0, t, seed).expect("clean box");
        prop_assert_eq!(left + right, whole);
    }

    /// The phase mean of a product is the sum of the phase means, within
    /// the 2e-3 truncation budget at window 1e3.
    #[test]
    fn jessen_phase_mean_splits_products(
        ta in arb_exp_sum(),
        tb in arb_exp_sum(),
        sigma in prop_oneof![Just(-0.6f64), Just(0.8f64)],
    ) {
        let f = ExponentialSum::dirichlet(&ta).expect("valid terms");
        let g = ExponentialSum::dirichlet(&tb).expect("valid terms");
        let mut prod: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (n, c) in &ta {
            for (m, d) in &tb {
                *prod.entry(n * m).or_insert(Complex64::new(0.0, 0.0)) += c * d;
            }
        }
        let prod: Vec<(u64, Complex64)> = prod
            .into_iter()
            .filter(|(_, c)| c.norm() > 1e-12)
            .collect();
        prop_assume!(!prod.is_empty());
        let fg = ExponentialSum::dirichlet(&prod).expect("valid terms");
        // keep the evaluation line away from zeros of every factor
        prop_assume!(min_on_vertical(&f, sigma, 1e3) > 0.02);
        prop_assume!(min_on_vertical(&g, sigma, 1e3) > 0.02);
        prop_assume!(min_on_vertical(&fg, sigma, 1e3) > 0.02);
        let lhs = jessen_function(&fg, sigma, 1e3).expect("converges");
        let rhs = jessen_function(&f, sigma, 1e3).expect("converges")
            + jessen_function(&g, sigma, 1e3).expect("converges");
        prop_assert!(
            (lhs - rhs).abs() <= 2e-3,
            "phase means differ by {}",
            (lhs - rhs).abs()
        );
    }

    /// Far to the right of every frequency the phase mean follows the
    /// line log|c0| - sigma * lambda0 of the smallest frequency.
    #[test]
    fn jessen_eventual_line_asymptote(
        n0 in 1u64..=2,
        d1 in 1u64..=2,
        d2 in 1u64..=2,
        mags in prop::collection::vec(0.5f64..2.0, 3),
        phases in prop::collection::vec(0.0f64..std::f64::consts::TAU, 3),
    ) {
        let n1 = n0 + d1;
        let n2 = n1 + d2;
        let terms = vec![
            (n0, Complex64::from_polar(mags[0], phases[0])),
            (n1, Complex64::from_polar(mags[1], phases[1])),
            (n2, Complex64::from_polar(mags[2], phases[2])),
        ];
        let f = ExponentialSum::dirichlet(&terms).expect("valid terms");
        let lambda0 = (n0 as f64).ln();
        for sigma in [10.0, 20.0] {
            let phi = jessen_function(&f, sigma, 400.0).expect("converges");
            let line = mags[0].ln() - sigma * lambda0;
            prop_assert!(
                (phi - line).abs() <= 0.02,
                "phi({}) = {}, line = {}",
                sigma,
                phi,
                line
            );
        }
    }
}

/// The phase mean is convex in sigma: nonnegative second differences up
/// to the stated 1e-3 estimation slack.
#[test]
fn jessen_phase_mean_is_convex_along_sigma() {
    let f = ExponentialSum::dirichlet(&[
        (1, Complex64::new(1.0, 0.0)),
        (2, Complex64::new(-1.0, 0.0)),
    ])
    .expect("valid terms");
    let values: Vec<f64> = (0..9)
        .map(|k| {
            let sigma = -2.0 + 0.5 * k as f64;
            jessen_function(&f, sigma, 1e3).expect("converges")
        })
        .collect();
    for w in values.windows(3) {
        assert!(
            w[0] + w[2] - 2.0 * w[1] >= -1e-3,
            "second difference {} is too negative",
            w[0] + w[2] - 2.0 * w[1]
        );
    }
}

// ---------------------------------------------------------------------
// explicit-formula side
// ---------------------------------------------------------------------

fn arb_bump() -> impl Strategy<Value = TestFunction> {
    (-1.5f64..1.5, 0.08f64..0.2).prop_map(|(mu, sigma)| {
        TestFunction::gaussian_bump(mu, sigma).expect("valid bump")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// The distribution side is linear in the test function.
    #[test]
    fn weil_distribution_is_linear(
        f in arb_bump(),
        g in arb_bump(),
        c in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0],
    ) {
        let combined = f.add_scaled(&g, c).expect("compatible lattices");
        let lhs = weil_distribution(&combined).expect("converges");
        let wf = weil_distribution(&f).expect("converges");
        let wg = weil_distribution(&g).expect("converges");
        prop_assert!(
            (lhs - (wf + c * wg)).abs() <= 1e-10 * (1.0 + wf.abs() + (c * wg).abs()),
            "nonlinearity {}",
            (lhs - (wf + c * wg)).abs()
        );
    }

    /// The multiplicative involution mirrors the support exactly and is
    /// an involution on values to 1e-10.
    #[test]
    fn weil_involution_is_an_involution(f in arb_bump(), u01 in 0.05f64..0.95) {
        let g = f.involution();
        let (k0, k1) = f.k_range();
        prop_assert_eq!(g.k_range(), (-k1, -k0));
        let gg = g.involution();
        prop_assert_eq!(gg.k_range(), (k0, k1));
        let step = f.log_step();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for k in k0 + 1..k1 {
            let u = (k as f64 * step).exp();
            worst = worst.max((gg.interpolate(u) - f.interpolate(u)).abs());
            scale = scale.max(f.interpolate(u).abs());
        }
        prop_assert!(worst <= 1e-10 * (1.0 + scale));
        // pointwise defining identity at a random interior point
        let (a, b) = f.support();
        let u = a + u01 * (b - a);
        prop_assert!((g.evaluate(1.0 / u) - u * f.evaluate(u)).abs() <= 1e-12 * (1.0 + f.evaluate(u).abs()));
    }

    /// With no zeros supplied, the counting side reduces to the measure
    /// integral of f against du + d*u, matched to an independent
    /// quadrature oracle.
    #[test]
    fn weil_counting_side_matches_measure_oracle(f in arb_bump()) {
        let lhs = counting_pair(&f, &[]);
        let (a, b) = f.support();
        let rhs = adaptive_simpson(|u| f.evaluate(u) * (1.0 + 1.0 / u), a, b, 1e-12)
            .expect("smooth integrand");
        prop_assert!(
            (lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()),
            "lhs {} vs oracle {}",
            lhs,
            rhs
        );
    }
}

// ---------------------------------------------------------------------
// index group ring and scaling flow
// ---------------------------------------------------------------------

/// Exact index key 2^(a) 3^(b) q^(t) from small rationals; negative
/// exponents go through the exact inverse.
fn make_key(e2: BigRational, e3: BigRational, tau: BigRational) -> IndexKey {
    let pow = |p: u64, e: &BigRational| -> IndexKey {
        if e.is_zero() {
            IndexKey::one()
        } else {
            let base = IndexKey::from_integer(p).expect("positive integer");
            let raised = base.theta(&e.abs()).expect("positive exponent");
            if e.is_negative() {
                raised.inv()
            } else {
                raised
            }
        }
    };
    pow(2, &e2)
        .index_mul(&pow(3, &e3))
        .index_mul(&IndexKey::q_power(&(-tau)))
}

fn arb_key() -> impl Strategy<Value = IndexKey> {
    (
        (-4i64..=4, 1i64..=3),
        (-4i64..=4, 1i64..=3),
        (-2i64..=2, 1i64..=3),
    )
        .prop_map(|((a, b), (c, d), (e, f))| {
            make_key(rat(a, b), rat(c, d), rat(e, f))
        })
}

/// Element with Gaussian-integer coefficients: all ring arithmetic on
/// such elements is exact in floating point.
fn arb_exact_element() -> impl Strategy<Value = WittElement> {
    prop::collection::vec((arb_key(), -9i32..=9, -9i32..=9), 1..=3).prop_map(|terms| {
        terms.into_iter().fold(WittElement::zero(), |acc, (k, re, im)| {
            &acc + &WittElement::from_term(k, Complex64::new(re as f64, im as f64))
        })
    })
}

fn arb_float_element() -> impl Strategy<Value = WittElement> {
    prop::collection::vec((arb_key(), -2.0f64..2.0, -2.0f64..2.0), 1..=3).prop_map(
        |terms| {
            terms.into_iter().fold(WittElement::zero(), |acc, (k, re, im)| {
                &acc + &WittElement::from_term(k, Complex64::new(re, im))
            })
        },
    )
}

/// Sum of coefficient magnitudes after applying the character, used to
/// scale relative tolerances.
fn char_norm(v: &WittElement, lambda: f64) -> f64 {
    v.terms().map(|(k, c)| c.norm() * k.chi(lambda)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Commutative-ring axioms hold exactly on Gaussian-integer
    /// elements: keys are exact and every coefficient operation is
    /// integer arithmetic inside f64.
    #[test]
    fn witt_ring_axioms_hold_exactly(
        a in arb_exact_element(),
        b in arb_exact_element(),
        c in arb_exact_element(),
    ) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        let one = WittElement::one();
        prop_assert_eq!(&a * &one, a.clone());
        prop_assert_eq!(&a - &a, WittElement::zero());
    }

    /// The character is multiplicative and intertwines with the power
    /// maps: evaluating after theta_mu equals evaluating at lambda*mu.
    #[test]
    fn witt_character_multiplies_and_intertwines(
        v in arb_float_element(),
        w in arb_float_element(),
        lambda in prop_oneof![Just(0.5f64), Just(1.0), Just(1.5), Just(2.0)],
        (mn, md) in (1i64..=2, 1i64..=2),
    ) {
        let lhs = (&v * &w).chi(lambda);
        let rhs = v.chi(lambda) * w.chi(lambda);
        let scale = 1.0 + char_norm(&v, lambda) * char_norm(&w, lambda);
        prop_assert!(
            (lhs - rhs).norm() <= 1e-12 * scale,
            "character broke multiplicativity by {}",
            (lhs - rhs).norm()
        );

        let mu = rat(mn, md);
        let muf = rational_to_f64(&mu);
        let powered = v.theta(&mu).expect("positive exponent").chi(lambda);
        let direct = v.chi(lambda * muf);
        let scale = 1.0 + char_norm(&v, lambda * muf);
        prop_assert!(
            (powered - direct).norm() <= 1e-12 * scale,
            "power map broke the character by {}",
            (powered - direct).norm()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The scaling flow fixes every exponential line exactly: applying
    /// it to the q^r grid function reproduces the q^r grid function on
    /// the surviving sub-grid, keys and coefficients identical.
    #[test]
    fn witt_flow_fixes_exponential_lines(
        (rn, rd) in (1i64..=4, 1i64..=3),
        mu in prop_oneof![Just(rat(2, 1)), Just(rat(3, 1)), Just(rat(1, 2))],
    ) {
        let r = rat(rn, rd);
        let xs: Vec<BigRational> = (-4..=4).map(|j| rat(j, 8)).collect();
        let ys: Vec<BigRational> = (6..=72).map(|m| rat(m, 36)).collect();
        let q = LeafGridFunction::q_power(xs.clone(), ys.clone(), &r)
            .expect("valid grid");
        let fixed = q.frobenius_lift(&mu).expect("enough surviving nodes");
        let kept: Vec<BigRational> = ys
            .iter()
            .filter(|y| ys.binary_search(&(*y / &mu)).is_ok())
            .cloned()
            .collect();
        let expected = LeafGridFunction::q_power(xs, kept, &r).expect("valid grid");
        prop_assert_eq!(fixed, expected);
    }
}

/// Applying the scaling flow does not leave the holomorphy class: on a
/// grid where the flow keeps every other node, residuals of the image
/// stay within a factor 4 of the worst input residual, both for pure
/// exponential sums and for elements with a mobile multiplicative term.
#[test]
fn witt_flow_preserves_holomorphy_residual_class() {
    let xs: Vec<BigRational> = (-8..=8).map(|j| rat(j, 16)).collect();
    let ys: Vec<BigRational> = (8..=96).map(|m| rat(m, 32)).collect();
    let tau = std::f64::consts::TAU;

    let pure = LeafGridFunction::from_fn(xs.clone(), ys.clone(), |x, y| {
        let coeffs = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.3, -0.2),
            Complex64::new(0.1, 0.05),
        ];
        let mut acc = WittElement::zero();
        for (i, c) in coeffs.iter().enumerate() {
            let r = rat((i + 1) as i64, 1);
            let key = IndexKey::q_power(&(&r * y));
            let phase = tau * rational_to_f64(&(&r * x));
            acc = &acc + &WittElement::from_term(key, c * Complex64::from_polar(1.0, phase));
        }
        acc
    })
    .expect("valid grid");

    let mixed = LeafGridFunction::from_fn(xs, ys, |x, y| {
        let key = IndexKey::q_power(&(y * rat(1, 1)));
        let phase = tau * rational_to_f64(&(x * rat(1, 1)));
        let q_part = WittElement::from_term(key, Complex64::from_polar(1.0, phase));
        let moved = IndexKey::from_rational(&rat(3, 2))
            .expect("positive rational")
            .theta(&(y * rat(1, 4)))
            .expect("positive exponent");
        &q_part + &WittElement::from_term(moved, Complex64::new(0.05, 0.0))
    })
    .expect("valid grid");

    for f in [pure, mixed] {
        let eps = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|l| holomorphy_residual(&f, *l).expect("grid large enough"))
            .fold(0.0f64, f64::max);
        let flowed = f.frobenius_lift(&rat(2, 1)).expect("enough surviving nodes");
        for l in [0.5, 1.0, 2.0] {
            let r = holomorphy_residual(&flowed, l).expect("grid large enough");
            assert!(
                r <= 4.0 * eps,
                "residual {} at lambda {} exceeds 4 * {}",
                r,
                l,
                eps
            );
        }
    }
}

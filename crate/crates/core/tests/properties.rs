use std::sync::Arc;

use implaus::dist::Distribution;
use implaus::im::{belief, plausibility_value, u_event, AssociationModel, NestedRandomSet, OneSided, Symmetric};
use implaus::models::{BinomialModel, NormalMeanModel, NormalVarianceModel};
use implaus::pvalue::{synthesize_pvalue_set, SupConfig, TestStatistic};
use implaus::sets::{Assertion, Interval, Side};
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(1000)
}

fn model(kind: u8, n: u64) -> Arc<dyn AssociationModel> {
    match kind % 3 {
        0 => Arc::new(BinomialModel::new(n).unwrap()),
        1 => Arc::new(NormalMeanModel::new(n, 1.0 + n as f64 / 10.0).unwrap()),
        _ => Arc::new(NormalVarianceModel::new(n + 1).unwrap()),
    }
}

/// A parameter value of `m` from a position p in (0, 1).
fn theta_at(m: &dyn AssociationModel, p: f64) -> f64 {
    let s = m.param_space();
    match (s.lo.is_finite(), s.hi.is_finite()) {
        (true, true) => s.lo + (s.hi - s.lo) * p,
        (true, false) => s.lo + m.scale_hint().max(0.5) * p / (1.0 - p),
        _ => 4.0 * (p - 0.5) / (p * (1.0 - p)).sqrt(),
    }
}

/// One of: point, closed or half-open interval, half line, union of two intervals.
fn assertion(m: &dyn AssociationModel, shape: u8, a: f64, b: f64, c: f64) -> Assertion {
    let space = m.param_space();
    let (lo, hi) = (theta_at(m, a.min(b)), theta_at(m, a.max(b)));
    match shape % 5 {
        0 => Assertion::point(lo, space),
        1 => Assertion::interval(Interval::closed(lo, hi), space),
        2 => Assertion::interval(Interval::new(lo, hi, false, true), space),
        3 => Assertion::half_line(hi, if c < 0.5 { Side::Below } else { Side::Above }, c < 0.25 || c > 0.75, space),
        _ => {
            let far = theta_at(m, (a.max(b) + (1.0 - a.max(b)) * c).min(0.999));
            Assertion::union_of(
                &[
                    Assertion::interval(Interval::closed(lo, hi), space),
                    Assertion::point(far, space),
                ],
                space,
            )
        }
    }
}

fn prs(which: bool) -> Arc<dyn NestedRandomSet> {
    if which {
        Arc::new(OneSided)
    } else {
        Arc::new(Symmetric)
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn belief_below_plausibility_and_duality(
        kind in 0u8..3, n in 1u64..25, p in 0.01f64..0.99, u in 0.01f64..0.99,
        shape in 0u8..5, a in 0.02f64..0.98, b in 0.02f64..0.98, c in 0.0f64..1.0, one in any::<bool>(),
    ) {
        let m = model(kind, n);
        let x = m.generate(theta_at(m.as_ref(), p), u);
        let asr = assertion(m.as_ref(), shape, a, b, c);
        let s = prs(one);
        let bel = belief(m.as_ref(), x, s.as_ref(), &asr).unwrap();
        let pl = plausibility_value(m.as_ref(), x, s.as_ref(), &asr).unwrap();
        prop_assert!((0.0..=1.0).contains(&bel) && (0.0..=1.0).contains(&pl));
        prop_assert!(bel <= pl + TOL, "bel {} > pl {}", bel, pl);
        let pl_c = plausibility_value(m.as_ref(), x, s.as_ref(), &asr.complement()).unwrap();
        prop_assert!((bel - (1.0 - pl_c)).abs() <= TOL);
    }

    #[test]
    fn plausibility_is_monotone_in_the_assertion(
        kind in 0u8..3, n in 1u64..25, p in 0.01f64..0.99, u in 0.01f64..0.99,
        shape in 0u8..5, a in 0.02f64..0.98, b in 0.02f64..0.98, c in 0.0f64..1.0,
        extra in 0u8..5, d in 0.02f64..0.98, e in 0.02f64..0.98, one in any::<bool>(),
    ) {
        let m = model(kind, n);
        let space = m.param_space();
        let x = m.generate(theta_at(m.as_ref(), p), u);
        let small = assertion(m.as_ref(), shape, a, b, c);
        let big = Assertion::union_of(&[small.clone(), assertion(m.as_ref(), extra, d, e, c)], space);
        prop_assert!(small.is_subset_of(&big));
        let s = prs(one);
        let pl_small = plausibility_value(m.as_ref(), x, s.as_ref(), &small).unwrap();
        let pl_big = plausibility_value(m.as_ref(), x, s.as_ref(), &big).unwrap();
        prop_assert!(pl_small <= pl_big + TOL, "{} > {}", pl_small, pl_big);
        let bel_small = belief(m.as_ref(), x, s.as_ref(), &small).unwrap();
        let bel_big = belief(m.as_ref(), x, s.as_ref(), &big).unwrap();
        prop_assert!(bel_small <= bel_big + TOL);
    }

    #[test]
    fn u_event_is_focal_containment(
        kind in 0u8..3, n in 1u64..25, p in 0.01f64..0.99, u in 0.01f64..0.99, v in 0.001f64..0.999,
        shape in 1u8..5, a in 0.02f64..0.98, b in 0.02f64..0.98, c in 0.0f64..1.0,
    ) {
        let m = model(kind, n);
        let x = m.generate(theta_at(m.as_ref(), p), u);
        let asr = assertion(m.as_ref(), shape, a, b, c);
        let k = u_event(m.as_ref(), x, &asr).unwrap();
        let inside = |w: f64| {
            let f = m.focal(x, w);
            !f.is_empty() && f.is_subset_of(asr.set())
        };
        // away from the edges of the event set, membership is Θ_x(u) ⊆ A
        if k.contains(v) != inside(v) {
            prop_assert!(inside(v - 1e-7) != inside(v + 1e-7),
                "u = {}: event {} vs focal {}", v, k, m.focal(x, v));
        }
    }

    #[test]
    fn random_sets_are_nested(
        kind in 0u8..3, n in 1u64..25, bound in 0.05f64..0.95, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0,
    ) {
        let (lo, hi) = (t1.min(t2), t1.max(t2));
        for s in [prs(true), prs(false)] {
            let (a, b) = s.index_range();
            let (ta, tb) = (a + (b - a) * lo, a + (b - a) * hi);
            prop_assert!(s.support(ta).is_subset_of(&s.support(tb)));
            prop_assert!(s.measure_of(ta) <= s.measure_of(tb));
        }
        let m = model(kind, n);
        let null = Assertion::half_line(theta_at(m.as_ref(), bound), Side::Below, true, m.param_space());
        let s = synthesize_pvalue_set(m.as_ref(), &TestStatistic::identity(), &null, &SupConfig::default()).unwrap();
        let span = if m.is_discrete() { n as f64 + 2.0 } else { 40.0 };
        let offset = if kind % 3 == 1 { -20.0 } else { -1.0 };
        let (ta, tb) = (offset + span * lo, offset + span * hi);
        prop_assert!(s.support(ta).is_subset_of(&s.support(tb)));
        prop_assert!(s.measure_of(ta) <= s.measure_of(tb) + TOL);
        prop_assert!((s.measure_of(ta) - s.support(ta).measure()).abs() <= 1e-9);
    }

    #[test]
    fn cdf_of_quantile_reaches_u(
        which in 0u8..4, u in 0.0f64..1.0, n in 1u64..60, p in 0.001f64..0.999, a in 0.1f64..30.0, b in 0.1f64..30.0,
        mean in -50.0f64..50.0, sd in 0.01f64..20.0,
    ) {
        let d = match which {
            0 => Distribution::binomial(n, p).unwrap(),
            1 => Distribution::beta(a, b).unwrap(),
            2 => Distribution::chi_squared(n).unwrap(),
            _ => Distribution::normal(mean, sd).unwrap(),
        };
        let q = d.quantile(u).unwrap();
        prop_assert!(d.cdf(q).unwrap() >= u, "{:?}: cdf({}) < {}", d, q, u);
        if d.is_discrete() && q > 0.0 {
            prop_assert!(d.cdf(q - 1.0).unwrap() < u);
        }
    }

    #[test]
    fn statistic_on_aux_follows_declared_monotonicity(
        kind in 0u8..3, n in 1u64..25, p1 in 0.01f64..0.99, p2 in 0.01f64..0.99, u1 in 0.001f64..0.999, u2 in 0.001f64..0.999,
    ) {
        let m = model(kind, n);
        let stat = TestStatistic::identity();
        let (th1, th2) = (theta_at(m.as_ref(), p1.min(p2)), theta_at(m.as_ref(), p1.max(p2)));
        let (ua, ub) = (u1.min(u2), u1.max(u2));
        prop_assert_eq!(stat.on_aux(m.as_ref(), th1, ua), m.generate(th1, ua));
        if m.stat_increasing_in_theta(&stat) {
            prop_assert!(stat.on_aux(m.as_ref(), th1, ua) <= stat.on_aux(m.as_ref(), th2, ua));
        }
        if m.stat_increasing_in_u(&stat) {
            prop_assert!(stat.on_aux(m.as_ref(), th1, ua) <= stat.on_aux(m.as_ref(), th1, ub));
        }
    }
}

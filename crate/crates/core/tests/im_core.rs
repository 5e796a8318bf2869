use std::sync::Arc;

use implaus::dist::{Distribution, SeededRng};
use implaus::im::{
    belief, check_admissible, combined_set, focal_set, plausibility, plausibility_region, plausibility_value,
    u_event, AssociationModel, FnNested, OneSided, Orientation, ParamGrid, Symmetric, ViolationKind,
};
use implaus::models::{BinomialModel, NormalMeanModel, NormalVarianceModel};
use implaus::par::Execution;
use implaus::sets::{Assertion, Interval, ParamSet, Side, USet};
use implaus::ImError;

fn models() -> Vec<(Arc<dyn AssociationModel>, Vec<f64>)> {
    vec![
        (Arc::new(BinomialModel::new(6).unwrap()), vec![0.0, 2.0, 6.0]),
        (Arc::new(NormalMeanModel::new(4, 1.3).unwrap()), vec![-1.0, 0.2, 2.5]),
        (Arc::new(NormalVarianceModel::new(10).unwrap()), vec![2.0, 9.0, 25.0]),
    ]
}

/// cl{u : Θ_x(u) ⊆ A} on a uniform grid of `n` midpoints, straight from the focal map.
fn grid_scan(m: &dyn AssociationModel, x: f64, a: &Assertion, n: usize) -> Vec<bool> {
    (0..n)
        .map(|i| {
            let u = (i as f64 + 0.5) / n as f64;
            let f = m.focal(x, u);
            !f.is_empty() && f.is_subset_of(a.set())
        })
        .collect()
}

#[test]
fn focal_examples() {
    let b = BinomialModel::new(5).unwrap();
    let f = focal_set(&b, 2.0, 0.5).unwrap();
    let lo = 1.0 - Distribution::beta(4.0, 2.0).unwrap().quantile(0.5).unwrap();
    let hi = 1.0 - Distribution::beta(3.0, 3.0).unwrap().quantile(0.5).unwrap();
    assert_eq!(f, ParamSet::from_interval(Interval::new(lo, hi, true, false)));

    let n = NormalMeanModel::new(1, 1.0).unwrap();
    assert!(focal_set(&n, 0.0, 0.5).unwrap().infimum().unwrap().abs() < 1e-15);
    let c = NormalMeanModel::constrained(1, 1.0, -1.0, 1.0).unwrap();
    assert!(focal_set(&c, -1.0, 0.75).unwrap().is_empty());
    assert!(matches!(focal_set(&n, 0.0, 1.5), Err(ImError::Domain(_))));
}

#[test]
fn combined_set_examples() {
    let n = NormalMeanModel::new(1, 1.0).unwrap();
    let c = combined_set(&n, 0.0, &USet::closed(0.25, 0.75)).unwrap();
    // scipy.stats.norm.ppf(0.75) = 0.6744897501960817
    let hull = c.hull();
    assert!((hull.lo + 0.674_489_750_196_081_7).abs() < 1e-9);
    assert!((hull.hi - 0.674_489_750_196_081_7).abs() < 1e-9);

    for (m, xs) in models() {
        for &x in &xs {
            let full = combined_set(m.as_ref(), x, &USet::full()).unwrap();
            let single = combined_set(m.as_ref(), x, &USet::singleton(0.4)).unwrap();
            assert_eq!(single, m.focal(x, 0.4));
            for i in 1..20 {
                let f = m.focal(x, i as f64 / 20.0);
                assert!(f.is_subset_of(&full), "{} x = {x}", m.label());
            }
        }
    }
}

#[test]
fn combined_set_is_hull_of_sampled_focal_sets() {
    let mut rng = SeededRng::new(5);
    for (m, xs) in models() {
        for &x in &xs {
            let (a, b) = (0.2, 0.7);
            let c = combined_set(m.as_ref(), x, &USet::closed(a, b)).unwrap().hull();
            let mut samples: Vec<f64> = vec![a, b];
            samples.extend((0..100).map(|_| a + (b - a) * rng.uniform()));
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for u in samples {
                let f = m.focal(x, u);
                if let (Some(l), Some(h)) = (f.infimum(), f.supremum()) {
                    lo = lo.min(l);
                    hi = hi.max(h);
                }
            }
            let tol = 1e-9 * (1.0 + hi.abs());
            assert!((c.lo - lo).abs() < tol && (c.hi - hi).abs() < tol, "{} x = {x}: {c} vs [{lo}, {hi}]", m.label());
        }
    }
}

#[test]
fn u_event_trivial_assertions() {
    for (m, xs) in models() {
        let space = m.param_space();
        for &x in &xs {
            assert_eq!(u_event(m.as_ref(), x, &Assertion::everything(space)).unwrap().measure(), 1.0);
            assert!(u_event(m.as_ref(), x, &Assertion::nothing(space)).unwrap().is_empty());
        }
    }
}

#[test]
fn u_event_inversion_matches_grid_scan() {
    let n = 10_000;
    let b = BinomialModel::new(5).unwrap();
    let a = Assertion::interval(Interval::new(0.0, 0.4, false, true), b.param_space());
    let mut cases: Vec<(Arc<dyn AssociationModel>, f64, Assertion)> = vec![(Arc::new(b), 2.0, a)];
    for (m, xs) in models() {
        let space = m.param_space();
        let mid = match m.name() {
            "binomial" => 0.45,
            "normal-variance" => 1.2,
            _ => 0.1,
        };
        for &x in &xs {
            cases.push((m.clone(), x, Assertion::half_line(mid, Side::Below, true, space)));
            cases.push((m.clone(), x, Assertion::half_line(mid, Side::Above, false, space)));
        }
    }
    for (m, x, a) in cases {
        let ev = u_event(m.as_ref(), x, &a).unwrap();
        let scan = grid_scan(m.as_ref(), x, &a, n);
        for (i, &hit) in scan.iter().enumerate() {
            let u = (i as f64 + 0.5) / n as f64;
            let near_edge = ev.parts().iter().any(|&(p, q)| (u - p).abs() < 1.0 / n as f64 || (u - q).abs() < 1.0 / n as f64);
            if !near_edge {
                assert_eq!(ev.contains(u), hit, "{} x = {x} A = {a} u = {u}", m.label());
            }
        }
    }
}

#[test]
fn belief_and_plausibility_identities() {
    let s = Symmetric;
    for (m, xs) in models() {
        let space = m.param_space();
        for &x in &xs {
            assert_eq!(belief(m.as_ref(), x, &s, &Assertion::everything(space)).unwrap(), 1.0);
            assert_eq!(belief(m.as_ref(), x, &s, &Assertion::nothing(space)).unwrap(), 0.0);
            assert_eq!(plausibility_value(m.as_ref(), x, &s, &Assertion::everything(space)).unwrap(), 1.0);
            let a = Assertion::half_line(0.5, Side::Below, true, space);
            let bel = belief(m.as_ref(), x, &s, &a).unwrap();
            let pl_c = plausibility_value(m.as_ref(), x, &s, &a.complement()).unwrap();
            assert!((bel + pl_c - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn one_sided_variance_plausibility_is_the_pvalue() {
    let m = NormalVarianceModel::new(20).unwrap();
    let chi = Distribution::chi_squared(19).unwrap();
    let t = 19.0 * 0.79;
    for &s0 in &[0.5, 1.0, 2.0] {
        let a = Assertion::half_line(s0, Side::Below, true, m.param_space());
        let r = plausibility(&m, t, &OneSided, &a).unwrap();
        assert!((r.value - (1.0 - chi.cdf(t / s0).unwrap())).abs() < 1e-12);
        assert!(r.dual_belief.unwrap() <= r.value);
    }
    let a = Assertion::half_line(1.0, Side::Below, true, m.param_space());
    assert!((plausibility_value(&m, t, &OneSided, &a).unwrap() - 0.72).abs() < 0.005);
}

#[test]
fn variance_region_lower_bound() {
    let m = NormalVarianceModel::new(20).unwrap();
    let t = 19.0 * 0.79;
    let grid = ParamGrid::logspace(0.1, 10.0, 200);
    let r = plausibility_region(&m, t, &OneSided, 0.1, &grid, Execution::Parallel).unwrap();
    let derived = t / Distribution::chi_squared(19).unwrap().quantile(0.9).unwrap();
    // scipy: 15.01 / chi2.ppf(0.9, 19)
    assert!((derived - 0.551_765_795_152_478_3).abs() < 1e-9);
    let lo = r.region.infimum().unwrap();
    assert!((lo - 0.5518).abs() < 1e-3);
    assert!((lo - derived).abs() < 1e-6, "{lo}");
    assert!(r.diagnostics.iter().any(|d| d.contains("upper end")));
}

#[test]
fn regions_shrink_with_alpha() {
    let m = NormalMeanModel::new(5, 1.0).unwrap();
    let grid = ParamGrid::linspace(-3.0, 3.0, 121);
    let r = |alpha| plausibility_region(&m, 0.4, &Symmetric, alpha, &grid, Execution::Sequential).unwrap().region;
    let (wide, narrow) = (r(0.1), r(0.2));
    assert!(narrow.is_subset_of(&wide));
    let tiny = r(0.999);
    assert!(tiny.hull().length() < 0.01);
    assert!(tiny.contains(0.4) || tiny.hull().lo - 0.4 < 0.01);
    let all = r(0.0);
    assert_eq!(all.hull(), Interval::closed(-3.0, 3.0));
    let empty = plausibility_region(&m, 0.4, &Symmetric, 0.5, &ParamGrid::linspace(5.0, 6.0, 5), Execution::Sequential)
        .unwrap();
    assert!(empty.region.is_empty() && !empty.diagnostics.is_empty());
}

#[test]
fn admissibility_examples() {
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    assert!(check_admissible(&OneSided, &grid).passed);

    let broken = FnNested::new("shifted", (0.0, 1.0), |t| {
        if t < 0.4 {
            USet::closed(0.0, t)
        } else if t < 1.0 {
            USet::closed(0.2, t.min(0.9))
        } else {
            USet::full()
        }
    })
    .with_measure(|t| if t < 0.4 { t } else if t < 1.0 { t.min(0.9) - 0.2 } else { 1.0 });
    let r = check_admissible(&broken, &[0.0, 0.3, 0.5, 1.0]);
    let v = r.first_violation.unwrap();
    assert_eq!(v.kind, ViolationKind::NotNested);
    assert_eq!((v.t, v.t_next), (0.3, Some(0.5)));

    // the literal family S_t = [F_θ₀(t), 1]: shrinking in t, measure 1 − F_θ₀(t)
    let f = Distribution::binomial(5, 0.5).unwrap();
    let upper_family = FnNested::new("[F(t), 1]", (-1.0, 5.0), move |t| USet::closed(f.cdf(t).unwrap(), 1.0))
        .with_orientation(Orientation::Decreasing)
        .with_measure(move |t| 1.0 - f.cdf(t).unwrap());
    let tg: Vec<f64> = (0..=120).map(|i| -1.0 + i as f64 / 20.0).collect();
    let r = check_admissible(&upper_family, &tg);
    assert!(r.passed, "{:?}", r.first_violation);
}

#[test]
fn constrained_model_refuses() {
    let c = NormalMeanModel::constrained(1, 1.0, -1.0, 1.0).unwrap();
    let a = Assertion::half_line(0.0, Side::Below, true, c.param_space());
    match plausibility(&c, -1.0, &OneSided, &a) {
        Err(ImError::EmptyFocal { x, witness_u, empty_u }) => {
            assert_eq!(x, -1.0);
            assert_eq!(witness_u, 0.75);
            assert!(empty_u.contains(0.9) && empty_u.contains(0.01) && !empty_u.contains(0.3));
        }
        other => panic!("expected refusal, got {other:?}"),
    }
}

//! Acceptance run: one PASS/FAIL line per criterion with the measured value,
//! its tolerance and the runtime budget. Exits 1 when any criterion fails.

use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use implaus::im::{
    belief, plausibility_region, plausibility_value, AssociationModel, Distorted, NestedRandomSet, OneSided, ParamGrid,
    Symmetric,
};
use implaus::models::{constrained_focal_diagnostic, BinomialModel, NormalMeanModel, NormalVarianceModel};
use implaus::par::Execution;
use implaus::pvalue::{plausibility_equals_pvalue, pvalue, synthesize_pvalue_set, SupConfig, SupMethod, TestStatistic};
use implaus::sets::{Assertion, Interval, Side};
use implaus::validity::{audit_region_coverage, audit_uniformity, audit_validity};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use serde_json::Value;

const ALPHAS: [f64; 7] = [0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0];
const SEED: u64 = 0;

struct Outcome {
    passed: bool,
    detail: String,
    info: Vec<String>,
}

impl Outcome {
    fn new(passed: bool, detail: String) -> Self {
        Self { passed, detail, info: Vec::new() }
    }
}

fn implaus(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_implaus"))
        .args(args)
        .env_remove("IMPLAUS_SEED")
        .output()
        .expect("binary runs");
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), v)
}

fn below(bound: f64, space: Interval) -> Assertion {
    Assertion::half_line(bound, Side::Below, true, space)
}

fn golden_pvalue() -> Outcome {
    let (code, v) = implaus(&["pval", "--model", "normal-variance", "--n", "20", "--s2", "0.79", "--sigma0-sq", "1"]);
    let p = v["pvalue"].as_f64().unwrap_or(f64::NAN);
    Outcome::new(
        code == 0 && (p - 0.72).abs() <= 0.005,
        format!("pvalue {p} (target 0.72 ± 0.005), exit {code}"),
    )
}

/// Largest |pl − p| over closed forms and largest |pl − p̂|/σ over Monte Carlo.
struct EquivalenceTally {
    cases: usize,
    closed_max: f64,
    mc_max_sigmas: f64,
    failures: Vec<String>,
}

impl EquivalenceTally {
    fn check(&mut self, m: &dyn AssociationModel, null: &Assertion, x: f64) {
        let stat = TestStatistic::identity();
        self.cases += 1;
        let exact = plausibility_equals_pvalue(m, &stat, null, x, &SupConfig::default()).expect("closed form");
        let d = exact.difference.abs();
        self.closed_max = self.closed_max.max(d);
        if d > 1e-12 {
            self.failures.push(format!("{} x = {x}: closed-form gap {d}", m.label()));
        }
        let cfg = SupConfig::default().with_seed(SEED).with_method(SupMethod::MonteCarlo);
        let mc = pvalue(m, &stat, null, x, &cfg).expect("Monte Carlo");
        let p = exact.plausibility;
        let sigma = (p * (1.0 - p) / cfg.mc_samples as f64).sqrt();
        let gap = (mc.value - p).abs();
        // a zero-variance tail can only be missed by one draw
        let ok = if sigma > 0.0 { gap <= 3.0 * sigma } else { gap <= 1.0 / cfg.mc_samples as f64 };
        if sigma > 0.0 {
            self.mc_max_sigmas = self.mc_max_sigmas.max(gap / sigma);
        }
        if !ok {
            self.failures.push(format!("{} x = {x}: Monte Carlo {} vs {p}", m.label(), mc.value));
        }
    }
}

fn equivalence_suite() -> Outcome {
    let mut t = EquivalenceTally {
        cases: 0,
        closed_max: 0.0,
        mc_max_sigmas: 0.0,
        failures: Vec::new(),
    };
    for n in [5, 20] {
        let m = BinomialModel::new(n).unwrap();
        for theta0 in [0.3, 0.5] {
            let null = below(theta0, m.param_space());
            for x in 0..=n {
                t.check(&m, &null, x as f64);
            }
        }
    }
    let mean = NormalMeanModel::new(4, 2.0).unwrap();
    let null = below(0.0, mean.param_space());
    for i in 0..50 {
        t.check(&mean, &null, -2.5 + 5.0 * i as f64 / 49.0);
    }
    let var = NormalVarianceModel::new(20).unwrap();
    let null = below(1.0, var.param_space());
    for i in 0..50 {
        t.check(&var, &null, 2.0 + 43.0 * i as f64 / 49.0);
    }
    let mut out = Outcome::new(
        t.failures.is_empty(),
        format!(
            "{} cases; max closed-form |pl − p| {:.3e} (≤ 1e-12); max Monte Carlo gap {:.2}σ (≤ 3σ, 1e5 draws)",
            t.cases, t.closed_max, t.mc_max_sigmas
        ),
    );
    out.info = t.failures;
    out
}

fn pvalue_set(m: &dyn AssociationModel, null: &Assertion) -> Arc<dyn NestedRandomSet> {
    Arc::new(synthesize_pvalue_set(m, &TestStatistic::identity(), null, &SupConfig::default()).unwrap())
}

fn validity_audits() -> Outcome {
    let cases: Vec<(Box<dyn AssociationModel>, f64)> = vec![
        (Box::new(BinomialModel::new(20).unwrap()), 0.4),
        (Box::new(NormalMeanModel::new(4, 2.0).unwrap()), 0.0),
        (Box::new(NormalVarianceModel::new(20).unwrap()), 1.0),
    ];
    let mut passed = true;
    let mut info = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    let mut controls_failed = 0;
    for (m, theta) in &cases {
        let null = below(*theta, m.param_space());
        let s = pvalue_set(m.as_ref(), &null);
        let r = audit_validity(m.as_ref(), s.as_ref(), &null, *theta, 100_000, SEED, &ALPHAS, Execution::default())
            .unwrap();
        worst = worst.max(r.max_violation);
        passed &= r.passed;
        let broken = Distorted::new(s, 0.5);
        let c = audit_validity(m.as_ref(), &broken, &null, *theta, 100_000, SEED, &ALPHAS, Execution::default())
            .unwrap();
        if !c.passed {
            controls_failed += 1;
        }
        info.push(format!(
            "{} at θ = {theta}: {} (max violation {:.4}); negative control {} (max violation {:.4})",
            r.model,
            if r.passed { "PASS" } else { "FAIL" },
            r.max_violation,
            if c.passed { "PASS" } else { "FAIL" },
            c.max_violation
        ));
    }
    let mut out = Outcome::new(
        passed && controls_failed == cases.len(),
        format!(
            "3 boundary audits, 1e5 reps, seed 0: max exceedance − α {worst:.4} (≤ 3σ + 0.005 per α); {controls_failed}/3 negative controls fail"
        ),
    );
    out.info = info;
    out
}

fn uniformity() -> Outcome {
    let mean = NormalMeanModel::new(4, 2.0).unwrap();
    let var = NormalVarianceModel::new(20).unwrap();
    let reports = [
        audit_uniformity(&mean, pvalue_set(&mean, &Assertion::point(0.0, mean.param_space())).as_ref(), 0.0, 100_000, SEED, Execution::default()).unwrap(),
        audit_uniformity(&var, pvalue_set(&var, &Assertion::point(1.0, var.param_space())).as_ref(), 1.0, 100_000, SEED, Execution::default()).unwrap(),
    ];
    let threshold = 1.5 * 1.36 / 100_000f64.sqrt();
    let ks: Vec<String> = reports.iter().map(|r| format!("{} KS {:.5}", r.model, r.ks)).collect();
    Outcome::new(
        reports.iter().all(|r| r.ks < threshold),
        format!("{} (< {threshold:.5})", ks.join(", ")),
    )
}

fn coverage_and_bound() -> Outcome {
    let var = NormalVarianceModel::new(20).unwrap();
    let r = audit_region_coverage(&var, &OneSided, 0.1, 1.0, 10_000, SEED, Execution::default()).unwrap();
    let grid = ParamGrid::logspace(0.79 / 50.0, 0.79 * 50.0, 2001);
    let region = plausibility_region(&var, 19.0 * 0.79, &OneSided, 0.1, &grid, Execution::default()).unwrap();
    let lo = region.region.infimum().unwrap_or(f64::NAN);
    // 15.01 / scipy.stats.chi2.ppf(0.9, 19)
    let oracle = 0.551_765_795_152_478_3;
    Outcome::new(
        r.coverage >= 0.89 && (lo - 0.5518).abs() <= 1e-3,
        format!(
            "coverage {:.4} over 1e4 reps (≥ 0.89); lower bound {lo:.6} (0.5518 ± 1e-3, chi-square oracle {oracle:.6})",
            r.coverage
        ),
    )
}

fn model(kind: u8, n: u64) -> Arc<dyn AssociationModel> {
    match kind % 3 {
        0 => Arc::new(BinomialModel::new(n).unwrap()),
        1 => Arc::new(NormalMeanModel::new(n, 1.0 + n as f64 / 10.0).unwrap()),
        _ => Arc::new(NormalVarianceModel::new(n + 1).unwrap()),
    }
}

fn theta_at(m: &dyn AssociationModel, p: f64) -> f64 {
    let s = m.param_space();
    match (s.lo.is_finite(), s.hi.is_finite()) {
        (true, true) => s.lo + (s.hi - s.lo) * p,
        (true, false) => s.lo + m.scale_hint().max(0.5) * p / (1.0 - p),
        _ => 4.0 * (p - 0.5) / (p * (1.0 - p)).sqrt(),
    }
}

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
                &[Assertion::interval(Interval::closed(lo, hi), space), Assertion::point(far, space)],
                space,
            )
        }
    }
}

fn structural_properties() -> Outcome {
    const TOL: f64 = 1e-12;
    let config = Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let strategy = (
        (0u8..3, 1u64..25, 0.01f64..0.99, 0.01f64..0.99),
        (0u8..5, 0.02f64..0.98, 0.02f64..0.98, 0.0f64..1.0),
        (0u8..5, 0.02f64..0.98, 0.02f64..0.98, any::<bool>()),
    );
    let cases = AtomicUsize::new(0);
    let result = runner.run(&strategy, |((kind, n, p, u), (shape, a, b, c), (extra, d, e, one))| {
        cases.fetch_add(1, Ordering::Relaxed);
        let m = model(kind, n);
        let space = m.param_space();
        let x = m.generate(theta_at(m.as_ref(), p), u);
        let s: Arc<dyn NestedRandomSet> = if one { Arc::new(OneSided) } else { Arc::new(Symmetric) };
        let small = assertion(m.as_ref(), shape, a, b, c);
        let big = Assertion::union_of(&[small.clone(), assertion(m.as_ref(), extra, d, e, c)], space);

        let bel = belief(m.as_ref(), x, s.as_ref(), &small).unwrap();
        let pl = plausibility_value(m.as_ref(), x, s.as_ref(), &small).unwrap();
        prop_assert!(bel <= pl + TOL, "bel {} > pl {}", bel, pl);
        let pl_c = plausibility_value(m.as_ref(), x, s.as_ref(), &small.complement()).unwrap();
        prop_assert!((bel - (1.0 - pl_c)).abs() <= TOL, "bel {} vs 1 − pl(Aᶜ) {}", bel, 1.0 - pl_c);

        let pl_big = plausibility_value(m.as_ref(), x, s.as_ref(), &big).unwrap();
        prop_assert!(pl <= pl_big + TOL, "pl(A) {} > pl(A ∪ B) {}", pl, pl_big);

        let (lo, hi) = (a.min(b), a.max(b));
        let (ta, tb) = s.index_range();
        let (t1, t2) = (ta + (tb - ta) * lo, ta + (tb - ta) * hi);
        prop_assert!(s.support(t1).is_subset_of(&s.support(t2)));
        let null = below(theta_at(m.as_ref(), 0.05 + 0.9 * c), space);
        let t2set = synthesize_pvalue_set(m.as_ref(), &TestStatistic::identity(), &null, &SupConfig::default()).unwrap();
        let span = if m.is_discrete() { n as f64 + 2.0 } else { 40.0 };
        let offset = if kind % 3 == 1 { -20.0 } else { -1.0 };
        let (s1, s2) = (offset + span * lo, offset + span * hi);
        prop_assert!(t2set.support(s1).is_subset_of(&t2set.support(s2)));
        prop_assert!(t2set.measure_of(s1) <= t2set.measure_of(s2) + TOL);
        Ok(())
    });
    let cases = cases.into_inner();
    match result {
        Ok(()) => Outcome::new(
            cases >= 1000,
            format!("{cases} random models/assertions/sets: duality, bel ≤ pl, monotone pl, nesting; 0 failures"),
        ),
        Err(e) => Outcome::new(false, format!("after {cases} cases: {e}")),
    }
}

fn constraint_diagnostic() -> Outcome {
    let m = NormalMeanModel::constrained(1, 1.0, -1.0, 1.0).unwrap();
    let d = constrained_focal_diagnostic(&m, -1.0).unwrap();
    let (code, v) = implaus(&["pval", "--model", "normal-mean-constrained", "--x", "-1", "--theta0", "0"]);
    let literal = d.empty_u.parts() == [(0.5, 1.0)] && d.measure == 0.5;
    let mut out = Outcome::new(
        literal && code == 3,
        format!(
            "empty-focal u-set {} with measure {} (expected (1/2, 1] with measure 0.5 exactly); exit code {code} (expected 3)",
            d.empty_u, d.measure
        ),
    );
    out.info = vec![
        format!(
            "Θ_x(u) = {{x − Φ⁻¹(u)}} ∩ [−1, 1] at x = −1 is empty for u > 1/2 and also for u < Φ(−2) = 0.0227501319; measure 0.5 + Φ(−2) = 0.5227501319"
        ),
        format!("CLI refusal diagnostic: {}", v["diagnostic"]),
    ];
    out
}

fn coherence() -> Outcome {
    let (code, v) = implaus(&["coherence", "--null", "theta==0", "--null", "-0.82<=theta<=0.52"]);
    let reversals = v["reversal_count"].as_u64().unwrap_or(0);
    let violations = v["plausibility_violations"].as_u64().unwrap_or(u64::MAX);
    let points = v["points"].as_u64().unwrap_or(0);
    Outcome::new(
        code == 0 && points == 301 && reversals >= 1 && violations == 0,
        format!(
            "{points} grid points: {reversals} p-value reversals (≥ 1), first at x = {}; {violations} plausibility violations (0)",
            v["first_reversal"]["x"]
        ),
    )
}

type Criterion = (u8, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "golden p-value", Duration::from_secs(1), golden_pvalue),
        (2, "p-value equals random-set plausibility", Duration::from_secs(30), equivalence_suite),
        (3, "validity audits", Duration::from_secs(120), validity_audits),
        (4, "uniformity under point nulls", Duration::from_secs(60), uniformity),
        (5, "region coverage and lower bound", Duration::from_secs(120), coverage_and_bound),
        (6, "structural properties", Duration::from_secs(120), structural_properties),
        (7, "constraint diagnostic", Duration::from_secs(10), constraint_diagnostic),
        (8, "nested-null coherence", Duration::from_secs(30), coherence),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let passed = out.passed && took < budget;
        println!(
            "{} [{id}] {name}: {}; {:.2}s (< {}s)",
            if passed { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
        for line in out.info {
            println!("       {line}");
        }
        if !passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 8 criteria pass");
    } else {
        println!("acceptance: {} of 8 criteria fail: {failed:?}", failed.len());
        std::process::exit(1);
    }
}

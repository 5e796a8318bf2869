use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dist::SeededRng;
use crate::error::{ImError, Result};
use crate::im::{plausibility_value, AssociationModel, NestedRandomSet};
use crate::par::{self, Execution};
use crate::sets::Assertion;
use crate::stats::{ks_dominance, ks_uniform, three_sigma};

/// Absolute slack added to the 3σ band to absorb discreteness.
pub const SLACK: f64 = 0.005;

/// Empirical P{pl_X(A) ≤ α} per α for X drawn at a fixed θ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityAudit {
    pub model: String,
    pub random_set: String,
    pub assertion: String,
    pub theta_true: f64,
    pub n_reps: usize,
    pub seed: u64,
    pub alpha_grid: Vec<f64>,
    pub exceedance: Vec<f64>,
    /// 3σ + slack per α.
    pub allowed: Vec<f64>,
    /// max over α of exceedance − α.
    pub max_violation: f64,
    pub passed: bool,
}

/// X_i = a(θ, U_i) with U_i from stream i of `seed`, then pl_{X_i}(A; S).
/// Discrete models evaluate each distinct observation once.
fn simulate_pl(
    m: &dyn AssociationModel,
    s: &dyn NestedRandomSet,
    a: &Assertion,
    theta: f64,
    n_reps: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<f64>> {
    if n_reps == 0 {
        return Err(ImError::Config("n_reps must be positive".into()));
    }
    let xs = par::map_indexed(exec, n_reps, |i| {
        let u = SeededRng::with_stream(seed, i as u64).uniform_open();
        m.generate(theta, u)
    });
    if m.is_discrete() {
        let mut distinct: Vec<f64> = xs.clone();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        let pls = par::map_slice(exec, &distinct, |&x| plausibility_value(m, x, s, a));
        let mut table = HashMap::with_capacity(distinct.len());
        for (x, pl) in distinct.iter().zip(pls) {
            table.insert(x.to_bits(), pl?);
        }
        Ok(xs.iter().map(|x| table[&x.to_bits()]).collect())
    } else {
        par::map_slice(exec, &xs, |&x| plausibility_value(m, x, s, a))
            .into_iter()
            .collect()
    }
}

fn check_alpha_grid(alpha_grid: &[f64]) -> Result<()> {
    if alpha_grid.is_empty() {
        return Err(ImError::Config("alpha grid is empty".into()));
    }
    if alpha_grid.windows(2).any(|w| w[0] > w[1]) || alpha_grid.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(ImError::Config("alpha grid must be sorted within [0, 1]".into()));
    }
    Ok(())
}

/// The exceedance profile of pl_X(A; S) at θ without requiring θ ∈ A; this is
/// how negative controls run an audit under the wrong null.
#[allow(clippy::too_many_arguments)]
pub fn audit_exceedance(
    m: &dyn AssociationModel,
    s: &dyn NestedRandomSet,
    a: &Assertion,
    theta: f64,
    n_reps: usize,
    seed: u64,
    alpha_grid: &[f64],
    exec: Execution,
) -> Result<ValidityAudit> {
    check_alpha_grid(alpha_grid)?;
    let pls = simulate_pl(m, s, a, theta, n_reps, seed, exec)?;
    let n = n_reps as f64;
    let exceedance: Vec<f64> = alpha_grid
        .iter()
        .map(|&al| pls.iter().filter(|&&p| p <= al).count() as f64 / n)
        .collect();
    let allowed: Vec<f64> = alpha_grid.iter().map(|&al| three_sigma(al, n_reps) + SLACK).collect();
    let max_violation = exceedance
        .iter()
        .zip(alpha_grid)
        .map(|(e, al)| e - al)
        .fold(f64::NEG_INFINITY, f64::max);
    let passed = exceedance
        .iter()
        .zip(alpha_grid)
        .zip(&allowed)
        .all(|((e, al), ok)| e - al <= *ok);
    Ok(ValidityAudit {
        model: m.label(),
        random_set: s.label(),
        assertion: a.to_string(),
        theta_true: theta,
        n_reps,
        seed,
        alpha_grid: alpha_grid.to_vec(),
        exceedance,
        allowed,
        max_violation,
        passed,
    })
}

/// Checks sup_{θ ∈ A} P_θ{pl_X(A; S) ≤ α} ≤ α at one θ ∈ A: PASS iff every
/// exceedance − α is within 3√(α(1 − α)/n_reps) + 0.005.
#[allow(clippy::too_many_arguments)]
pub fn audit_validity(
    m: &dyn AssociationModel,
    s: &dyn NestedRandomSet,
    a: &Assertion,
    theta: f64,
    n_reps: usize,
    seed: u64,
    alpha_grid: &[f64],
    exec: Execution,
) -> Result<ValidityAudit> {
    if !a.contains(theta) {
        return Err(ImError::Domain(format!("theta = {theta} is not in the assertion {a}")));
    }
    audit_exceedance(m, s, a, theta, n_reps, seed, alpha_grid, exec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniformityMode {
    /// Two-sided KS distance from Unif(0, 1).
    Exact,
    /// One-sided: only P{pl ≤ α} > α counts against the model.
    Dominance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub model: String,
    pub theta0: f64,
    pub n_reps: usize,
    pub seed: u64,
    pub mode: UniformityMode,
    pub ks: f64,
    pub threshold: f64,
    pub passed: bool,
    pub notes: Vec<String>,
}

/// Distribution of pl_X({θ₀}; S) for X drawn at θ₀, against Unif(0, 1).
/// PASS iff the KS distance is below 1.5 · 1.36/√n_reps.
pub fn audit_uniformity(
    m: &dyn AssociationModel,
    s: &dyn NestedRandomSet,
    theta0: f64,
    n_reps: usize,
    seed: u64,
    exec: Execution,
) -> Result<UniformityReport> {
    let a = Assertion::point(theta0, m.param_space());
    if a.is_empty() {
        return Err(ImError::Domain(format!("theta0 = {theta0} outside the parameter space")));
    }
    let pls = simulate_pl(m, s, &a, theta0, n_reps, seed, exec)?;
    let threshold = 1.5 * 1.36 / (n_reps as f64).sqrt();
    let mut notes = Vec::new();
    let (mode, ks) = if m.is_discrete() {
        notes.push("discrete model: atoms rule out exact uniformity, checking stochastic dominance only".into());
        (UniformityMode::Dominance, ks_dominance(&pls))
    } else {
        (UniformityMode::Exact, ks_uniform(&pls))
    };
    Ok(UniformityReport {
        model: m.label(),
        theta0,
        n_reps,
        seed,
        mode,
        ks,
        threshold,
        passed: ks < threshold,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub model: String,
    pub random_set: String,
    pub alpha: f64,
    pub theta_true: f64,
    pub n_reps: usize,
    pub seed: u64,
    pub coverage: f64,
    /// 1 − α − 3√(α(1 − α)/n_reps).
    pub threshold: f64,
    pub passed: bool,
}

/// Fraction of replications with θ ∈ Π_α(X), decided through the
/// definition θ ∈ Π_α(X) ⟺ pl_X({θ}; S) > α.
pub fn audit_region_coverage(
    m: &dyn AssociationModel,
    s: &dyn NestedRandomSet,
    alpha: f64,
    theta: f64,
    n_reps: usize,
    seed: u64,
    exec: Execution,
) -> Result<CoverageReport> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(ImError::Domain(format!("alpha = {alpha} outside [0, 1)")));
    }
    let a = Assertion::point(theta, m.param_space());
    if a.is_empty() {
        return Err(ImError::Domain(format!("theta = {theta} outside the parameter space")));
    }
    let pls = simulate_pl(m, s, &a, theta, n_reps, seed, exec)?;
    let coverage = pls.iter().filter(|&&p| p > alpha).count() as f64 / n_reps as f64;
    let threshold = 1.0 - alpha - three_sigma(alpha, n_reps);
    Ok(CoverageReport {
        model: m.label(),
        random_set: s.label(),
        alpha,
        theta_true: theta,
        n_reps,
        seed,
        coverage,
        threshold,
        passed: coverage >= threshold,
    })
}

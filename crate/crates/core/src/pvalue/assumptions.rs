use serde::{Deserialize, Serialize};

use super::{common_uniforms, null_grid, Tail, TestStatistic};
use crate::im::AssociationModel;
use crate::par::{self, Execution};
use crate::sets::Assertion;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionVerdict {
    Pass,
    Fail,
    /// Holds automatically (singleton null).
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionStatus {
    pub verdict: AssumptionVerdict,
    pub detail: String,
    /// (x, u) for A1, (u, sup) for A2, (t, difference) for A3.
    pub witness: Option<(f64, f64)>,
}

impl AssumptionStatus {
    fn pass(detail: impl Into<String>) -> Self {
        Self {
            verdict: AssumptionVerdict::Pass,
            detail: detail.into(),
            witness: None,
        }
    }

    fn trivial() -> Self {
        Self {
            verdict: AssumptionVerdict::Trivial,
            detail: "singleton null".into(),
            witness: None,
        }
    }

    fn fail(detail: impl Into<String>, witness: (f64, f64)) -> Self {
        Self {
            verdict: AssumptionVerdict::Fail,
            detail: detail.into(),
            witness: Some(witness),
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict != AssumptionVerdict::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub a1: AssumptionStatus,
    pub a2: AssumptionStatus,
    pub a3: AssumptionStatus,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.a1.holds() && self.a2.holds() && self.a3.holds()
    }
}

/// Finite grids the checks run on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionGrids {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub t: Vec<f64>,
    pub theta_points: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl AssumptionGrids {
    /// Observations and statistic values generated from points of the null.
    pub fn around_null(m: &dyn AssociationModel, stat: &TestStatistic, null: &Assertion) -> Self {
        let u: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
        let thetas = null_grid(&m.param_space(), null, 3, m.scale_hint()).concat();
        let mut x: Vec<f64> = thetas
            .iter()
            .flat_map(|&th| [0.1, 0.5, 0.9].map(|q| m.generate(th, q)))
            .filter(|v| v.is_finite())
            .collect();
        x.sort_by(f64::total_cmp);
        x.dedup();
        let mut t: Vec<f64> = x.iter().map(|&v| stat.evaluate(v)).collect();
        t.sort_by(f64::total_cmp);
        t.dedup();
        Self {
            x,
            u,
            t,
            theta_points: 16,
            mc_samples: 5000,
            seed: 0,
        }
    }
}

/// Numeric checks of A1 (the equation T(x) = T(a(θ, u)) has a solution
/// θ in the parameter space), A2 (the sup over Θ₀ of T(a(θ, u)) is finite
/// and stable under grid refinement) and A3 (P_U{sup_θ T(a(θ, U)) < t} =
/// inf_θ P_θ{T(X) < t}) on the given grids.
pub fn check_assumptions(
    m: &dyn AssociationModel,
    stat: &TestStatistic,
    null: &Assertion,
    grids: &AssumptionGrids,
) -> AssumptionReport {
    let a1 = check_a1(m, stat, grids);
    if null.is_point() {
        return AssumptionReport {
            a1,
            a2: AssumptionStatus::trivial(),
            a3: AssumptionStatus::trivial(),
        };
    }
    let space = m.param_space();
    let coarse = null_grid(&space, null, grids.theta_points.max(2), m.scale_hint()).concat();
    let fine = null_grid(&space, null, 4 * grids.theta_points.max(2), m.scale_hint()).concat();
    let sup_on = |grid: &[f64], u: f64| {
        grid.iter()
            .map(|&th| stat.on_aux(m, th, u))
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let mut a2 = AssumptionStatus::pass(format!("sup finite and stable on {} u points", grids.u.len()));
    for &u in &grids.u {
        let (c, f) = (sup_on(&coarse, u), sup_on(&fine, u));
        if !c.is_finite() || !f.is_finite() || f.abs() > 1e12 {
            a2 = AssumptionStatus::fail(format!("sup over the null is not finite at u = {u}"), (u, f));
            break;
        }
        if (f - c).abs() > 1e-6 * (1.0 + f.abs()) {
            a2 = AssumptionStatus::fail(
                format!("sup over the null moves from {c} to {f} under grid refinement at u = {u}"),
                (u, f),
            );
            break;
        }
    }

    let us = common_uniforms(grids.seed, grids.mc_samples, Execution::Parallel);
    let sups = par::map_slice(Execution::Parallel, &us, |&u| sup_on(&coarse, u));
    let n = us.len() as f64;
    let mut a3 = AssumptionStatus::pass(format!("identity holds at {} t values", grids.t.len()));
    for &t in &grids.t {
        let lhs = sups.iter().filter(|&&g| g < t).count() as f64 / n;
        let rhs = coarse
            .iter()
            .map(|&th| match m.stat_tail(stat, th, t, Tail::Weak) {
                Some(tail) => 1.0 - tail,
                None => us.iter().filter(|&&u| stat.on_aux(m, th, u) < t).count() as f64 / n,
            })
            .fold(f64::INFINITY, f64::min);
        let se = (lhs * (1.0 - lhs) / n).sqrt().max(1.0 / n);
        if (lhs - rhs).abs() > 3.0 * se {
            a3 = AssumptionStatus::fail(
                format!("at t = {t}: P_U(sup T < t) = {lhs} but inf over the null of P(T < t) = {rhs}"),
                (t, lhs - rhs),
            );
            break;
        }
    }
    AssumptionReport { a1, a2, a3 }
}

fn check_a1(m: &dyn AssociationModel, stat: &TestStatistic, grids: &AssumptionGrids) -> AssumptionStatus {
    let space = m.param_space();
    let thetas = null_grid(&space, &Assertion::everything(space), 257, m.scale_hint()).concat();
    for &x in &grids.x {
        if m.validate_observation(x).is_err() {
            continue;
        }
        let target = stat.evaluate(x);
        for &u in &grids.u {
            if !m.focal(x, u).is_empty() {
                continue;
            }
            let diffs: Vec<f64> = thetas.iter().map(|&th| stat.on_aux(m, th, u) - target).collect();
            let solved = diffs.iter().any(|d| d.abs() <= 1e-12)
                || diffs.windows(2).any(|w| w[0].signum() != w[1].signum() && !m.is_discrete());
            if solved {
                continue;
            }
            let empty = m.empty_focal_uset(x);
            let witness_u = empty
                .parts()
                .iter()
                .max_by(|p, q| (p.1 - p.0).total_cmp(&(q.1 - q.0)))
                .map(|&(a, b)| 0.5 * (a + b))
                .unwrap_or(u);
            return AssumptionStatus::fail(
                format!("no θ in {space} solves T(x) = T(a(θ, u)) at x = {x}; empty-focal u-set {empty}"),
                (x, witness_u),
            );
        }
    }
    AssumptionStatus::pass(format!("{} x values by {} u values", grids.x.len(), grids.u.len()))
}

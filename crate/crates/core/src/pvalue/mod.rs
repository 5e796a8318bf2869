//! p-values sup_{θ ∈ Θ₀} P_θ{T(X) ≥ T(x)} and the predictive random set
//! whose plausibility of Θ₀ reproduces them.

mod assumptions;
mod stat;
mod pvalue_set;

use serde::{Deserialize, Serialize};

pub use assumptions::{check_assumptions, AssumptionGrids, AssumptionReport, AssumptionStatus, AssumptionVerdict};
pub use stat::{StatKind, Tail, TestStatistic};
pub use pvalue_set::{plausibility_equals_pvalue, synthesize_pvalue_set, EquivalenceReport, PvalueSet};

use crate::dist::SeededRng;
use crate::error::{ImError, Result};
use crate::im::{AssociationModel, PlausibilityReport, ReportMethod};
use crate::par::{self, Execution};
use crate::sets::{Assertion, Interval};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupMethod {
    /// Registered closed form, else per-θ closed tails on a grid, else Monte Carlo.
    #[default]
    Auto,
    ClosedForm,
    Grid,
    MonteCarlo,
}

/// Settings for sups over a composite null and for Monte Carlo tails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupConfig {
    pub grid_points: usize,
    pub refine_rounds: usize,
    pub refine_factor: usize,
    pub mc_samples: usize,
    pub seed: Option<u64>,
    pub tail: Tail,
    pub method: SupMethod,
    /// Evaluate only the upper end of Θ₀ when the model declares T(a(θ, u))
    /// nondecreasing in θ.
    pub use_boundary_shortcut: bool,
    /// Proceed with synthesis after a failed numeric A3 check.
    pub force: bool,
    pub execution: Execution,
}

impl Default for SupConfig {
    fn default() -> Self {
        Self {
            grid_points: 64,
            refine_rounds: 2,
            refine_factor: 8,
            mc_samples: 100_000,
            seed: None,
            tail: Tail::Weak,
            method: SupMethod::Auto,
            use_boundary_shortcut: true,
            force: false,
            execution: Execution::default(),
        }
    }
}

impl SupConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    pub fn with_method(mut self, method: SupMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(ImError::Config("grid_points must be at least 2".into()));
        }
        if self.refine_factor < 2 && self.refine_rounds > 0 {
            return Err(ImError::Config("refine_factor must be at least 2".into()));
        }
        if self.mc_samples == 0 {
            return Err(ImError::Config("mc_samples must be positive".into()));
        }
        Ok(())
    }
}

/// Result of maximizing a function over a null.
#[derive(Clone, Debug, PartialEq)]
pub struct SupResult {
    pub value: f64,
    pub argmax: f64,
    pub evaluations: usize,
    /// The best point is the last point of a compactified infinite end.
    pub at_open_edge: bool,
}

/// Points of the null used for grid sups; finite ends are included exactly
/// when they lie in the parameter space, infinite ends are reached through
/// a compactifying map of width `scale`.
pub fn null_grid(space: &Interval, null: &Assertion, points: usize, scale: f64) -> Vec<Vec<f64>> {
    null.set()
        .parts()
        .iter()
        .map(|part| part_grid(space, part, points.max(2), scale))
        .collect()
}

fn inward(space: &Interval, end: f64, toward: f64) -> f64 {
    // an open end of the null that is still a legal parameter value is used
    // as is: the sup over the open part is its limit there
    if space.contains(end) {
        return end;
    }
    let step = 1e-9 * end.abs().max(1.0);
    let moved = if toward > end { end + step } else { end - step };
    if (moved - end).abs() >= (toward - end).abs() {
        0.5 * (end + toward)
    } else {
        moved
    }
}

fn part_grid(space: &Interval, part: &Interval, n: usize, scale: f64) -> Vec<f64> {
    if part.is_point() {
        return vec![part.lo];
    }
    let (lo, hi) = (part.lo, part.hi);
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            let a = inward(space, lo, hi);
            let b = inward(space, hi, lo);
            (0..n)
                .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
                .collect()
        }
        (false, true) => {
            let b = inward(space, hi, f64::NEG_INFINITY);
            let mut v: Vec<f64> = (0..n)
                .map(|i| {
                    let s = i as f64 / n as f64;
                    b - scale * s / (1.0 - s)
                })
                .collect();
            v.reverse();
            v
        }
        (true, false) => {
            let a = inward(space, lo, f64::INFINITY);
            (0..n)
                .map(|i| {
                    let s = i as f64 / n as f64;
                    a + scale * s / (1.0 - s)
                })
                .collect()
        }
        (false, false) => (0..n)
            .map(|i| {
                let s = (i as f64 + 0.5) / n as f64;
                scale * (std::f64::consts::PI * (s - 0.5)).tan()
            })
            .collect(),
    }
}

/// sup of `f` over the null: a grid per component of the null, then
/// `cfg.refine_rounds` rounds of a finer grid around the running best point,
/// each shrinking the spacing by `cfg.refine_factor`.
pub fn sup_over_null(
    m: &dyn AssociationModel,
    null: &Assertion,
    cfg: &SupConfig,
    f: impl Fn(f64) -> f64 + Sync + Send,
) -> SupResult {
    let space = m.param_space();
    let grids = null_grid(&space, null, cfg.grid_points, m.scale_hint());
    let mut best = SupResult {
        value: f64::NEG_INFINITY,
        argmax: f64::NAN,
        evaluations: 0,
        at_open_edge: false,
    };
    for (grid, part) in grids.iter().zip(null.set().parts()) {
        let values = par::map_slice(cfg.execution, grid, |&th| f(th));
        best.evaluations += grid.len();
        let Some(mut i) = argmax(&values) else { continue };
        let mut local_best = (values[i], grid[i]);
        let open_edge = (i == 0 && !part.lo.is_finite()) || (i + 1 == grid.len() && !part.hi.is_finite());
        if grid.len() > 1 {
            let mut left = grid[i.saturating_sub(1)];
            let mut right = grid[(i + 1).min(grid.len() - 1)];
            for _ in 0..cfg.refine_rounds {
                let k = 2 * cfg.refine_factor;
                let fine: Vec<f64> = (0..=k).map(|j| left + (right - left) * j as f64 / k as f64).collect();
                let vals = par::map_slice(cfg.execution, &fine, |&th| f(th));
                best.evaluations += fine.len();
                i = argmax(&vals).unwrap_or(0);
                if vals[i] > local_best.0 {
                    local_best = (vals[i], fine[i]);
                }
                left = fine[i.saturating_sub(1)];
                right = fine[(i + 1).min(k)];
            }
        }
        if local_best.0 > best.value {
            best.value = local_best.0;
            best.argmax = local_best.1;
            best.at_open_edge = open_edge;
        }
    }
    best
}

fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some(b) if values[b] >= *v => {}
            _ => best = Some(i),
        }
    }
    best
}

/// The single θ at which the sup is taken when the null is a point or the
/// boundary shortcut applies.
pub(crate) fn shortcut_theta(
    m: &dyn AssociationModel,
    stat: &TestStatistic,
    null: &Assertion,
    cfg: &SupConfig,
) -> Option<f64> {
    if null.is_point() {
        return null.set().infimum();
    }
    if !(cfg.use_boundary_shortcut && m.stat_increasing_in_theta(stat)) {
        return None;
    }
    let sup = null.set().supremum()?;
    if !sup.is_finite() {
        return None;
    }
    let space = m.param_space();
    if space.contains(sup) {
        Some(sup)
    } else {
        let part = *null.set().parts().last()?;
        Some(inward(&space, sup, part.lo.max(sup - 1.0)))
    }
}

const MC_CHUNK: usize = 8192;

/// Common random numbers for Monte Carlo tails: chunk `c` of the sample is
/// drawn from stream `c` of `seed`, so the draws do not depend on how the
/// work is scheduled.
pub(crate) fn common_uniforms(seed: u64, n: usize, exec: Execution) -> Vec<f64> {
    let chunks = n.div_ceil(MC_CHUNK);
    par::map_indexed(exec, chunks, |c| {
        let mut rng = SeededRng::with_stream(seed, c as u64);
        let len = MC_CHUNK.min(n - c * MC_CHUNK);
        (0..len).map(|_| rng.uniform_open()).collect::<Vec<f64>>()
    })
    .concat()
}

pub(crate) fn mc_tail(
    m: &dyn AssociationModel,
    stat: &TestStatistic,
    theta: f64,
    t: f64,
    tail: Tail,
    us: &[f64],
    exec: Execution,
) -> f64 {
    let counts = par::map_indexed(exec, us.len().div_ceil(MC_CHUNK), |c| {
        let end = ((c + 1) * MC_CHUNK).min(us.len());
        us[c * MC_CHUNK..end]
            .iter()
            .filter(|&&u| tail.exceeds(stat.on_aux(m, theta, u), t))
            .count()
    });
    counts.iter().sum::<usize>() as f64 / us.len() as f64
}

/// sup_{θ ∈ Θ₀} P_θ{T(X) ≥ T(x)} (or `>` under the strict tail).
pub fn pvalue(
    m: &dyn AssociationModel,
    stat: &TestStatistic,
    null: &Assertion,
    x: f64,
    cfg: &SupConfig,
) -> Result<PlausibilityReport> {
    cfg.validate()?;
    if null.is_empty() {
        return Err(ImError::Domain("null hypothesis is empty".into()));
    }
    m.validate_observation(x)?;
    let t = stat.evaluate(x);
    if t.is_nan() {
        return Err(ImError::Domain(format!("statistic is undefined at x = {x}")));
    }
    let tail = cfg.tail;
    let mut diagnostics = Vec::new();

    if matches!(cfg.method, SupMethod::Auto | SupMethod::ClosedForm) {
        if let Some(p) = m.closed_form_pvalue(stat, null, x, tail) {
            return Ok(PlausibilityReport {
                value: p.clamp(0.0, 1.0),
                dual_belief: None,
                method: ReportMethod::ClosedForm,
                std_error: None,
                diagnostics,
            });
        }
        if cfg.method == SupMethod::ClosedForm {
            return Err(ImError::Unsupported(format!(
                "{} has no closed-form p-value for statistic {}",
                m.name(),
                stat.label()
            )));
        }
    }

    let probe = null.set().infimum().filter(|v| v.is_finite()).or(null.set().supremum()).unwrap_or(0.0);
    let closed_tails = cfg.method != SupMethod::MonteCarlo && m.stat_tail(stat, probe, t, tail).is_some();
    let shortcut = shortcut_theta(m, stat, null, cfg);

    if closed_tails {
        let f = |th: f64| m.stat_tail(stat, th, t, tail).unwrap_or(f64::NAN);
        let (value, points) = match shortcut {
            Some(th) => (f(th), 1),
            None => {
                let r = sup_over_null(m, null, cfg, f);
                if r.at_open_edge {
                    diagnostics.push(format!("sup reached the compactified edge of the null near θ = {}", r.argmax));
                }
                (r.value, r.evaluations)
            }
        };
        return Ok(PlausibilityReport {
            value: value.clamp(0.0, 1.0),
            dual_belief: None,
            method: ReportMethod::Grid { points },
            std_error: None,
            diagnostics,
        });
    }

    if cfg.method == SupMethod::Grid {
        return Err(ImError::Unsupported(format!(
            "{} has no closed-form tail for statistic {}",
            m.name(),
            stat.label()
        )));
    }
    let seed = cfg
        .seed
        .ok_or_else(|| ImError::Config("Monte Carlo p-value requested without a seed".into()))?;
    let us = common_uniforms(seed, cfg.mc_samples, cfg.execution);
    let value = match shortcut {
        Some(th) => mc_tail(m, stat, th, t, tail, &us, cfg.execution),
        None => {
            let serial = SupConfig {
                execution: Execution::Sequential,
                ..cfg.clone()
            };
            let r = sup_over_null(m, null, &serial, |th| mc_tail(m, stat, th, t, tail, &us, cfg.execution));
            if r.at_open_edge {
                diagnostics.push(format!("sup reached the compactified edge of the null near θ = {}", r.argmax));
            }
            diagnostics.push("sup of Monte Carlo estimates is biased upward by at most a few standard errors".into());
            r.value
        }
    };
    let n = cfg.mc_samples as f64;
    Ok(PlausibilityReport {
        value,
        dual_belief: None,
        method: ReportMethod::MonteCarlo {
            n_samples: cfg.mc_samples,
            seed,
        },
        std_error: Some((value * (1.0 - value) / n).sqrt()),
        diagnostics,
    })
}

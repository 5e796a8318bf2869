use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{null_grid, pvalue, shortcut_theta, sup_over_null, SupConfig, SupMethod, Tail, TestStatistic};
use crate::bisect;
use crate::error::{ImError, Result};
use crate::im::{containment_search, plausibility_value, AssociationModel, NestedRandomSet, ReportMethod};
use crate::par::Execution;
use crate::sets::{Assertion, USet, U_TOL};

const SUPPORT_SCAN_POINTS: usize = 1025;
const A3_TOL: f64 = 1e-3;

/// The predictive random set that turns a test into an IM:
/// S_t = cl{u : sup_{θ ∈ Θ₀} T(a(θ, u)) < t} with
/// P_U(S_t) = inf_{θ ∈ Θ₀} P_θ{T(X) < t}.
pub struct PvalueSet {
    model: Arc<dyn AssociationModel>,
    stat: TestStatistic,
    null: Assertion,
    cfg: SupConfig,
    boundary: Option<f64>,
    theta_grid: Vec<f64>,
    u_increasing: bool,
    closed_tails: bool,
    warnings: Vec<String>,
}

impl std::fmt::Debug for PvalueSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PvalueSet")
            .field("model", &self.model.label())
            .field("stat", &self.stat.label())
            .field("null", &self.null.to_string())
            .field("boundary", &self.boundary)
            .finish()
    }
}

impl PvalueSet {
    pub fn null(&self) -> &Assertion {
        &self.null
    }

    pub fn stat(&self) -> &TestStatistic {
        &self.stat
    }

    /// θ at which the sup over Θ₀ is attained for every u, when known.
    pub fn boundary(&self) -> Option<f64> {
        self.boundary
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// sup_{θ ∈ Θ₀} T(a(θ, u)).
    pub fn sup_stat(&self, u: f64) -> f64 {
        let m = self.model.as_ref();
        match self.boundary {
            Some(th) => self.stat.on_aux(m, th, u),
            None => self
                .theta_grid
                .iter()
                .map(|&th| self.stat.on_aux(m, th, u))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    fn tail_sup(&self, t: f64) -> f64 {
        let m = self.model.as_ref();
        let f = |th: f64| m.stat_tail(&self.stat, th, t, Tail::Weak).unwrap_or(f64::NAN);
        match self.boundary {
            Some(th) => f(th),
            None => {
                let cfg = SupConfig {
                    execution: Execution::Sequential,
                    ..self.cfg.clone()
                };
                sup_over_null(m, &self.null, &cfg, f).value
            }
        }
    }

    /// t*_K = sup{t : S_t ⊆ K}; `None` when no member fits.
    pub fn tstar(&self, k: &USet) -> Option<f64> {
        self.containment(k).0
    }

    fn containment(&self, k: &USet) -> (Option<f64>, f64) {
        if !(self.u_increasing && self.closed_tails) {
            return containment_search(self, k);
        }
        // every S_t is [0, u*(t)]; only the part of K anchored at 0 matters
        let Some(k0) = k.anchored_end() else {
            return (Some(f64::NEG_INFINITY), 0.0);
        };
        if k0 >= 1.0 - U_TOL {
            return (Some(f64::INFINITY), 1.0);
        }
        // a few ulps absorb rounding between the two routes to the same cdf value
        let fits = |t: f64| self.measure_of(t) <= k0 + 64.0 * f64::EPSILON;
        let (t, _) = bisect::last_true(f64::NEG_INFINITY, f64::INFINITY, fits);
        // S_t ⊆ [0, k0], so the slack never counts
        (Some(t), self.measure_of(t).min(k0))
    }
}

impl NestedRandomSet for PvalueSet {
    fn label(&self) -> String {
        format!("p-value set for {} with T = {}", self.null, self.stat.label())
    }

    fn index_range(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn support(&self, t: f64) -> USet {
        if t == f64::NEG_INFINITY {
            return USet::empty();
        }
        if t == f64::INFINITY {
            return USet::full();
        }
        let below = |u: f64| self.sup_stat(u) < t;
        if self.u_increasing {
            if !below(0.0) {
                return USet::empty();
            }
            if below(1.0) {
                return USet::full();
            }
            let (u_star, _) = bisect::last_true(0.0, 1.0, below);
            USet::closed(0.0, u_star)
        } else {
            crate::im::scan_predicate(below, SUPPORT_SCAN_POINTS)
        }
    }

    /// inf_{θ ∈ Θ₀} P_θ{T(X) < t}, from closed-form tails when the model has
    /// them and from the support length otherwise.
    fn measure_of(&self, t: f64) -> f64 {
        if t == f64::NEG_INFINITY {
            return 0.0;
        }
        if t == f64::INFINITY {
            return 1.0;
        }
        if self.closed_tails {
            (1.0 - self.tail_sup(t)).clamp(0.0, 1.0)
        } else {
            self.support(t).measure()
        }
    }

    fn containment_measure(&self, k: &USet) -> f64 {
        self.containment(k).1
    }
}

/// Builds the predictive random set of the test (T, Θ₀).
///
/// Refuses with `Unsupported` when some observation has empty focal sets.
/// When the sup over Θ₀ has to be found numerically, the identity
/// P_U{sup_θ T(a(θ, U)) < t} = inf_θ P_θ{T(X) < t} is spot-checked and a
/// mismatch is an `Assumption` error unless `cfg.force` is set.
pub fn synthesize_pvalue_set(
    m: &dyn AssociationModel,
    stat: &TestStatistic,
    null: &Assertion,
    cfg: &SupConfig,
) -> Result<PvalueSet> {
    cfg.validate()?;
    if null.is_empty() {
        return Err(ImError::Domain("null hypothesis is empty".into()));
    }
    let space = m.param_space();
    let probes = null_grid(&space, &Assertion::everything(space), 9, m.scale_hint()).concat();
    for &th in &probes {
        for u in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let x = m.generate(th, u);
            let empty = m.empty_focal_uset(x);
            if let Some(&(a, b)) = empty.parts().iter().max_by(|p, q| (p.1 - p.0).total_cmp(&(q.1 - q.0))) {
                return Err(ImError::Unsupported(format!(
                    "focal sets are empty at x = {x} for u in {empty} (witness u = {}); \
                     no predictive random set reproduces the p-value",
                    0.5 * (a + b)
                )));
            }
        }
    }

    let boundary = shortcut_theta(m, stat, null, cfg);
    let theta_grid = match boundary {
        Some(_) => Vec::new(),
        None => null_grid(&space, null, cfg.grid_points, m.scale_hint()).concat(),
    };
    let probe = null.set().infimum().filter(|v| v.is_finite()).or(null.set().supremum()).unwrap_or(0.0);
    let closed_tails = cfg.method != SupMethod::MonteCarlo && m.stat_tail(stat, probe, 0.0, Tail::Weak).is_some();
    let mut set = PvalueSet {
        model: m.shared(),
        stat: stat.clone(),
        null: null.clone(),
        cfg: cfg.clone(),
        boundary,
        theta_grid,
        u_increasing: m.stat_increasing_in_u(stat),
        closed_tails,
        warnings: Vec::new(),
    };

    if boundary.is_none() && closed_tails {
        for u in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let t = set.sup_stat(u);
            if !t.is_finite() {
                continue;
            }
            let by_tails = set.measure_of(t);
            let by_support = set.support(t).measure();
            if (by_tails - by_support).abs() > A3_TOL {
                let msg = format!(
                    "A3 fails at t = {t}: inf over the null of P(T < t) is {by_tails}, \
                     P_U(sup over the null of T < t) is {by_support}"
                );
                if !cfg.force {
                    return Err(ImError::Assumption(msg));
                }
                set.warnings.push(msg);
                break;
            }
        }
    }
    Ok(set)
}

/// Plausibility of Θ₀ under the synthesized set next to the p-value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub plausibility: f64,
    pub pvalue: f64,
    pub difference: f64,
    pub tolerance: f64,
    pub matches: bool,
    pub pvalue_method: ReportMethod,
    pub notes: Vec<String>,
}

pub fn plausibility_equals_pvalue(
    m: &dyn AssociationModel,
    stat: &TestStatistic,
    null: &Assertion,
    x: f64,
    cfg: &SupConfig,
) -> Result<EquivalenceReport> {
    let set = synthesize_pvalue_set(m, stat, null, cfg)?;
    let pl = plausibility_value(m, x, &set, null)?;
    let pv = pvalue(m, stat, null, x, cfg)?;
    let tolerance = match pv.std_error {
        Some(se) => 3.0 * se + 1.0 / cfg.mc_samples as f64,
        None => 1e-12,
    };
    let difference = pl - pv.value;
    let mut notes: Vec<String> = set.warnings.clone();
    notes.extend(pv.diagnostics.iter().cloned());
    if cfg.tail == Tail::Strict {
        let weak = pvalue(m, stat, null, x, &cfg.clone().with_tail(Tail::Weak))?;
        let atom = weak.value - pv.value;
        if atom > 0.0 {
            notes.push(format!(
                "strict tail drops the atom P(T = {}) = {atom}; the random-set plausibility equals the weak p-value {}",
                stat.evaluate(x),
                weak.value
            ));
        }
    }
    Ok(EquivalenceReport {
        plausibility: pl,
        pvalue: pv.value,
        difference,
        tolerance,
        matches: difference.abs() <= tolerance,
        pvalue_method: pv.method,
        notes,
    })
}

//! Association, prediction and combination: focal sets, predictive random
//! sets, belief and plausibility.

mod admissible;
mod eval;
mod nested;

use std::fmt;
use std::sync::Arc;

pub use admissible::{check_admissible, CheckReport, Violation, ViolationKind};
pub use eval::{
    belief, combined_set, focal_set, plausibility, plausibility_region, plausibility_value, u_event,
    u_event_by_scan, ParamGrid, PlausibilityReport, RegionReport, ReportMethod, REGION_REFINE_STEPS,
};
pub(crate) use eval::scan_predicate;
pub use nested::{
    containment_search, Distorted, FnNested, NestedRandomSet, OneSided, Orientation, Symmetric,
};

use crate::dist::Distribution;
use crate::error::Result;
use crate::pvalue::{Tail, TestStatistic};
use crate::sets::{Assertion, Interval, ParamSet, USet};

/// An association X = a(θ, U) with U ~ P_U, together with its focal sets
/// Θ_x(u) = {θ : x = a(θ, u)}.
///
/// Observations are scalar summaries (a count, a sample mean, (n − 1)S²).
/// Required methods describe the association; the defaulted ones are
/// optional fast paths that the generic machinery falls back from.
pub trait AssociationModel: Send + Sync + fmt::Debug {
    /// Registry name.
    fn name(&self) -> &'static str;

    fn label(&self) -> String;

    fn param_space(&self) -> Interval;

    fn aux_law(&self) -> Distribution {
        Distribution::Uniform01
    }

    fn is_discrete(&self) -> bool {
        false
    }

    /// Width used when an unbounded parameter range has to be compactified.
    fn scale_hint(&self) -> f64 {
        1.0
    }

    fn validate_observation(&self, x: f64) -> Result<()>;

    /// a(θ, u).
    fn generate(&self, theta: f64, u: f64) -> f64;

    /// Θ_x(u); may be empty when the parameter space is constrained.
    fn focal(&self, x: f64, u: f64) -> ParamSet;

    /// ⋃_{u ∈ [lo, hi]} Θ_x(u), for models with focal endpoints monotone in u.
    fn focal_hull(&self, _x: f64, _lo: f64, _hi: f64) -> Option<ParamSet> {
        None
    }

    /// Closure of {u : ∅ ≠ Θ_x(u) ⊆ part} by direct inversion, when available.
    fn u_event_part(&self, _x: f64, _part: &Interval) -> Option<USet> {
        None
    }

    /// Closure of {u : Θ_x(u) = ∅}.
    fn empty_focal_uset(&self, _x: f64) -> USet {
        USet::empty()
    }

    /// P_θ{T(X) ≥ t} (weak) or P_θ{T(X) > t} (strict) in closed form.
    fn stat_tail(&self, _stat: &TestStatistic, _theta: f64, _t: f64, _tail: Tail) -> Option<f64> {
        None
    }

    /// Whether T(a(θ, u)) is nondecreasing in θ for every u, so that the sup
    /// over a null is attained at its upper boundary.
    fn stat_increasing_in_theta(&self, _stat: &TestStatistic) -> bool {
        false
    }

    /// Whether T(a(θ, u)) is nondecreasing in u for every θ.
    fn stat_increasing_in_u(&self, _stat: &TestStatistic) -> bool {
        false
    }

    /// Registered closed-form p-value.
    fn closed_form_pvalue(
        &self,
        _stat: &TestStatistic,
        _null: &Assertion,
        _x: f64,
        _tail: Tail,
    ) -> Option<f64> {
        None
    }

    fn shared(&self) -> Arc<dyn AssociationModel>;
}

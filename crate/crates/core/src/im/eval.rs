use serde::{Deserialize, Serialize};

use super::{AssociationModel, NestedRandomSet};
use crate::bisect;
use crate::error::{ImError, Result};
use crate::par::{self, Execution};
use crate::sets::{Assertion, Interval, ParamSet, USet};

/// How a reported value was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportMethod {
    ClosedForm,
    /// Sup over a grid of the null with closed-form per-θ tails.
    Grid { points: usize },
    MonteCarlo { n_samples: usize, seed: u64 },
    /// u-space evaluation through a predictive random set.
    RandomSet { label: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlausibilityReport {
    pub value: f64,
    /// bel of the same assertion, when computed; never exceeds `value`.
    pub dual_belief: Option<f64>,
    pub method: ReportMethod,
    pub std_error: Option<f64>,
    pub diagnostics: Vec<String>,
}

/// Θ_x(u).
pub fn focal_set(m: &dyn AssociationModel, x: f64, u: f64) -> Result<ParamSet> {
    m.validate_observation(x)?;
    if !(0.0..=1.0).contains(&u) {
        return Err(ImError::Domain(format!("u = {u} outside [0, 1]")));
    }
    Ok(m.focal(x, u))
}

/// Θ_x(s) = ⋃_{u ∈ s} Θ_x(u).
pub fn combined_set(m: &dyn AssociationModel, x: f64, s: &USet) -> Result<ParamSet> {
    m.validate_observation(x)?;
    let mut out = ParamSet::empty();
    for &(a, b) in s.parts() {
        let piece = if a == b {
            m.focal(x, a)
        } else {
            m.focal_hull(x, a, b).ok_or_else(|| {
                ImError::Unsupported(format!("{} has no monotone focal map for interval unions", m.name()))
            })?
        };
        out = out.union(&piece);
    }
    Ok(out)
}

/// 𝕌_x(A) = cl{u : Θ_x(u) ⊆ A}.
///
/// Each part of A is handled separately (by direct inversion when the model
/// offers it, otherwise by a refined scan); pieces from different parts that
/// touch keep the excluded point between them. u with an empty focal set
/// satisfy Θ_x(u) ⊆ A vacuously and are included.
pub fn u_event(m: &dyn AssociationModel, x: f64, a: &Assertion) -> Result<USet> {
    m.validate_observation(x)?;
    let mut pieces = USet::empty();
    for part in a.set().parts() {
        let piece = match m.u_event_part(x, part) {
            Some(s) => s,
            None => scan_part(m, x, part, SCAN_POINTS),
        };
        pieces = pieces.union(&piece);
    }
    let empty = m.empty_focal_uset(x);
    if empty.is_empty() {
        Ok(pieces)
    } else {
        Ok(pieces.union_contiguous(&empty))
    }
}

/// The generic route of [`u_event`]: scan and refine, never the model's inversion.
pub fn u_event_by_scan(m: &dyn AssociationModel, x: f64, a: &Assertion, points: usize) -> Result<USet> {
    m.validate_observation(x)?;
    let mut pieces = USet::empty();
    for part in a.set().parts() {
        pieces = pieces.union(&scan_part(m, x, part, points));
    }
    let empty = m.empty_focal_uset(x);
    Ok(if empty.is_empty() { pieces } else { pieces.union_contiguous(&empty) })
}

const SCAN_POINTS: usize = 512;

fn scan_part(m: &dyn AssociationModel, x: f64, part: &Interval, points: usize) -> USet {
    let target = ParamSet::from_interval(*part);
    scan_predicate(
        |u: f64| {
            let f = m.focal(x, u);
            !f.is_empty() && f.is_subset_of(&target)
        },
        points,
    )
}

/// Closure of {u ∈ [0, 1] : pred(u)}, found on a midpoint grid and refined
/// to adjacent floats at every change of `pred`. Runs shorter than a grid
/// cell can be missed.
pub(crate) fn scan_predicate(pred: impl Fn(f64) -> bool, points: usize) -> USet {
    let n = points.max(2);
    let grid: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    let hits: Vec<bool> = grid.iter().map(|&u| pred(u)).collect();
    let bottom = f64::MIN_POSITIVE;
    let top = 1.0 - f64::EPSILON / 2.0;
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if !hits[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && hits[i + 1] {
            i += 1;
        }
        let end = i;
        let lo = if start == 0 {
            if pred(bottom) {
                0.0
            } else {
                bisect::last_true(bottom, grid[0], |u| !pred(u)).1
            }
        } else {
            bisect::last_true(grid[start - 1], grid[start], |u| !pred(u)).1
        };
        let hi = if end == n - 1 {
            if pred(top) {
                1.0
            } else {
                bisect::last_true(grid[n - 1], top, &pred).0
            }
        } else {
            bisect::last_true(grid[end], grid[end + 1], &pred).0
        };
        out.push((lo, hi));
        i += 1;
    }
    USet::from_parts(out)
}

fn refuse_if_empty_focal(m: &dyn AssociationModel, x: f64) -> Result<()> {
    let empty = m.empty_focal_uset(x);
    if empty.is_empty() {
        return Ok(());
    }
    let &(a, b) = empty
        .parts()
        .iter()
        .max_by(|p, q| (p.1 - p.0).total_cmp(&(q.1 - q.0)))
        .expect("nonempty");
    Err(ImError::EmptyFocal {
        x,
        witness_u: 0.5 * (a + b),
        empty_u: empty,
    })
}

/// bel_x(A; S) = P_S{S ⊆ 𝕌_x(A)}.
pub fn belief(
    m: &dyn AssociationModel,
    x: f64,
    s: &dyn NestedRandomSet,
    a: &Assertion,
) -> Result<f64> {
    refuse_if_empty_focal(m, x)?;
    let k = u_event(m, x, a)?;
    Ok(s.containment_measure(&k).clamp(0.0, 1.0))
}

/// pl_x(A; S) = 1 − P_S{S ⊆ 𝕌_x(Aᶜ)} only, without the dual belief.
pub fn plausibility_value(
    m: &dyn AssociationModel,
    x: f64,
    s: &dyn NestedRandomSet,
    a: &Assertion,
) -> Result<f64> {
    Ok(1.0 - belief(m, x, s, &a.complement())?)
}

/// pl_x(A; S) with bel_x(A; S) alongside.
pub fn plausibility(
    m: &dyn AssociationModel,
    x: f64,
    s: &dyn NestedRandomSet,
    a: &Assertion,
) -> Result<PlausibilityReport> {
    let pl = plausibility_value(m, x, s, a)?;
    let bel = belief(m, x, s, a)?;
    let mut diagnostics = Vec::new();
    if bel > pl + 1e-12 {
        diagnostics.push(format!(
            "belief {bel} exceeds plausibility {pl}: predictive random set is not admissible"
        ));
    }
    Ok(PlausibilityReport {
        value: pl,
        dual_belief: Some(bel),
        method: ReportMethod::RandomSet { label: s.label() },
        std_error: None,
        diagnostics,
    })
}

/// Grid of parameter values for region evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub points: Vec<f64>,
}

impl ParamGrid {
    pub fn new(mut points: Vec<f64>) -> Self {
        points.sort_by(f64::total_cmp);
        points.dedup();
        Self { points }
    }

    pub fn linspace(lo: f64, hi: f64, n: usize) -> Self {
        if n <= 1 {
            return Self::new(vec![lo]);
        }
        Self::new((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
    }

    /// Geometric spacing; `lo` and `hi` must be positive.
    pub fn logspace(lo: f64, hi: f64, n: usize) -> Self {
        let (a, b) = (lo.ln(), hi.ln());
        if n <= 1 {
            return Self::new(vec![lo]);
        }
        Self::new((0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    /// Interval hull of {θ : pl_x({θ}; S) > α}, endpoints refined.
    pub region: ParamSet,
    pub alpha: f64,
    pub grid_hits: usize,
    pub diagnostics: Vec<String>,
}

/// Bisection steps spent on each region endpoint after grid bracketing.
pub const REGION_REFINE_STEPS: usize = 40;

/// Π_α(x) = {θ : pl_x({θ}; S) > α}, evaluated on a grid and returned as an
/// interval hull whose interior endpoints are refined by bisection.
pub fn plausibility_region(
    m: &dyn AssociationModel,
    x: f64,
    s: &dyn NestedRandomSet,
    alpha: f64,
    grid: &ParamGrid,
    exec: Execution,
) -> Result<RegionReport> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(ImError::Domain(format!("alpha = {alpha} outside [0, 1)")));
    }
    if grid.points.is_empty() {
        return Err(ImError::Domain("empty parameter grid".into()));
    }
    let space = m.param_space();
    let pl_at = |theta: f64| plausibility_value(m, x, s, &Assertion::point(theta, space));
    let values = par::map_slice(exec, &grid.points, |&th| pl_at(th));
    let values = values.into_iter().collect::<Result<Vec<f64>>>()?;
    let inside: Vec<usize> = (0..values.len()).filter(|&i| values[i] > alpha).collect();
    let mut diagnostics = Vec::new();
    let (Some(&first), Some(&last)) = (inside.first(), inside.last()) else {
        diagnostics.push(format!(
            "no grid point has plausibility above {alpha}; the grid may not cover the region"
        ));
        return Ok(RegionReport {
            region: ParamSet::empty(),
            alpha,
            grid_hits: 0,
            diagnostics,
        });
    };
    if inside.len() != last - first + 1 {
        diagnostics.push("plausibility above alpha is not contiguous on the grid; reporting the hull".into());
    }
    let above = |th: f64| pl_at(th).map(|v| v > alpha).unwrap_or(false);
    let lo = if first > 0 {
        bisect::bisect_steps(grid.points[first], grid.points[first - 1], REGION_REFINE_STEPS, above).0
    } else {
        diagnostics.push("region reaches the lower end of the grid".into());
        grid.points[first]
    };
    let hi = if last + 1 < grid.points.len() {
        bisect::bisect_steps(grid.points[last], grid.points[last + 1], REGION_REFINE_STEPS, above).0
    } else {
        diagnostics.push("region reaches the upper end of the grid".into());
        grid.points[last]
    };
    Ok(RegionReport {
        region: ParamSet::from_interval(Interval::closed(lo, hi)),
        alpha,
        grid_hits: inside.len(),
        diagnostics,
    })
}

use serde::{Deserialize, Serialize};

use super::{NestedRandomSet, Orientation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    UnsortedGrid,
    NotClosed,
    NotNested,
    MissingEmpty,
    MissingFull,
    MeasureMismatch,
    MeasureNotMonotone,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub t: f64,
    pub t_next: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub passed: bool,
    pub points_checked: usize,
    pub violation_count: usize,
    pub first_violation: Option<Violation>,
}

const MEASURE_TOL: f64 = 1e-9;

/// Checks P1 (closed members, total order along the index, ∅ and 𝕌 at the
/// ends of the index range) and P2 (`measure_of(t)` equals the Lebesgue
/// measure of the support) on the given index grid.
pub fn check_admissible(s: &dyn NestedRandomSet, t_grid: &[f64]) -> CheckReport {
    let mut violations: Vec<Violation> = Vec::new();
    let mut push = |kind, t, t_next, detail: String| {
        violations.push(Violation { kind, t, t_next, detail });
    };

    if t_grid.windows(2).any(|w| w[0] > w[1]) {
        push(ViolationKind::UnsortedGrid, t_grid[0], None, "index grid is not sorted".into());
    }

    let (lo, hi) = s.index_range();
    let (empty_end, full_end) = match s.orientation() {
        Orientation::Increasing => (lo, hi),
        Orientation::Decreasing => (hi, lo),
    };
    let m0 = s.support(empty_end).measure();
    if m0 > MEASURE_TOL {
        push(ViolationKind::MissingEmpty, empty_end, None, format!("smallest member has measure {m0}"));
    }
    let m1 = s.support(full_end).measure();
    if m1 < 1.0 - MEASURE_TOL {
        push(ViolationKind::MissingFull, full_end, None, format!("largest member has measure {m1}"));
    }

    let supports: Vec<_> = t_grid.iter().map(|&t| s.support(t)).collect();
    let measures: Vec<f64> = t_grid.iter().map(|&t| s.measure_of(t)).collect();

    for (i, (&t, sup)) in t_grid.iter().zip(&supports).enumerate() {
        if sup.parts().iter().any(|&(a, b)| !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b) {
            push(ViolationKind::NotClosed, t, None, format!("support {sup} is not a closed subset of [0,1]"));
        }
        let len = sup.measure();
        if (measures[i] - len).abs() > MEASURE_TOL || !(0.0..=1.0).contains(&measures[i]) {
            push(
                ViolationKind::MeasureMismatch,
                t,
                None,
                format!("measure_of = {} but support length = {len}", measures[i]),
            );
        }
    }

    for i in 1..t_grid.len() {
        let (t0, t1) = (t_grid[i - 1], t_grid[i]);
        let (small, large) = match s.orientation() {
            Orientation::Increasing => (&supports[i - 1], &supports[i]),
            Orientation::Decreasing => (&supports[i], &supports[i - 1]),
        };
        if !small.is_closed_subset_of(large) {
            push(ViolationKind::NotNested, t0, Some(t1), format!("{small} is not inside {large}"));
        }
        let grows = match s.orientation() {
            Orientation::Increasing => measures[i] + MEASURE_TOL >= measures[i - 1],
            Orientation::Decreasing => measures[i] <= measures[i - 1] + MEASURE_TOL,
        };
        if !grows {
            push(
                ViolationKind::MeasureNotMonotone,
                t0,
                Some(t1),
                format!("measure moves against the orientation: {} then {}", measures[i - 1], measures[i]),
            );
        }
    }

    CheckReport {
        passed: violations.is_empty(),
        points_checked: t_grid.len(),
        violation_count: violations.len(),
        first_violation: violations.into_iter().next(),
    }
}

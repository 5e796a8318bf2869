use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bisect;
use crate::sets::{USet, U_TOL};

/// Direction in which the family grows with its index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Increasing,
    Decreasing,
}

/// A predictive random set given by a totally ordered family {S_t} of closed
/// subsets of 𝕌 = [0, 1] and the natural measure
/// P_S{S ⊆ K} = sup{P_U(S_t) : S_t ⊆ K}.
pub trait NestedRandomSet: Send + Sync {
    fn label(&self) -> String;

    /// Closed index range; ends may be infinite.
    fn index_range(&self) -> (f64, f64);

    fn orientation(&self) -> Orientation {
        Orientation::Increasing
    }

    fn support(&self, t: f64) -> USet;

    /// P_U(S_t) as the family reports it.
    fn measure_of(&self, t: f64) -> f64 {
        self.support(t).measure()
    }

    /// P_S{S ⊆ K}.
    fn containment_measure(&self, k: &USet) -> f64 {
        containment_search(self, k).1
    }
}

/// Generic evaluation of P_S{S ⊆ K}: bisection over the index for the last
/// S_t inside K. Returns `(t*, measure)`; `t*` is `None` when no member of
/// the family fits.
pub fn containment_search<S: NestedRandomSet + ?Sized>(s: &S, k: &USet) -> (Option<f64>, f64) {
    let (lo, hi) = s.index_range();
    let inside = |t: f64| s.support(t).is_subset_of(k);
    match s.orientation() {
        Orientation::Increasing => {
            if inside(hi) {
                return (Some(hi), s.measure_of(hi));
            }
            if !inside(lo) {
                return (None, 0.0);
            }
            let (t, _) = bisect::last_true(lo, hi, inside);
            (Some(t), s.measure_of(t))
        }
        Orientation::Decreasing => {
            if inside(lo) {
                return (Some(lo), s.measure_of(lo));
            }
            if !inside(hi) {
                return (None, 0.0);
            }
            let (_, t) = bisect::last_true(lo, hi, |t| !inside(t));
            (Some(t), s.measure_of(t))
        }
    }
}

/// S = [0, U) with U ~ Unif(0, 1): S_t = [0, t], P_U(S_t) = t.
#[derive(Clone, Copy, Debug, Default)]
pub struct OneSided;

impl NestedRandomSet for OneSided {
    fn label(&self) -> String {
        "one-sided [0,U)".into()
    }

    fn index_range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn support(&self, t: f64) -> USet {
        USet::closed(0.0, t.clamp(0.0, 1.0))
    }

    fn measure_of(&self, t: f64) -> f64 {
        t.clamp(0.0, 1.0)
    }

    fn containment_measure(&self, k: &USet) -> f64 {
        k.anchored_end().unwrap_or(0.0)
    }
}

/// S = {u : |u − ½| ≤ |U − ½|}: S_r = [½ − r, ½ + r], P_U(S_r) = 2r.
#[derive(Clone, Copy, Debug, Default)]
pub struct Symmetric;

impl NestedRandomSet for Symmetric {
    fn label(&self) -> String {
        "symmetric |u-1/2|<=|U-1/2|".into()
    }

    fn index_range(&self) -> (f64, f64) {
        (0.0, 0.5)
    }

    fn support(&self, r: f64) -> USet {
        let r = r.clamp(0.0, 0.5);
        USet::closed(0.5 - r, 0.5 + r)
    }

    fn measure_of(&self, r: f64) -> f64 {
        2.0 * r.clamp(0.0, 0.5)
    }

    fn containment_measure(&self, k: &USet) -> f64 {
        k.parts()
            .iter()
            .filter(|&&(a, b)| a <= 0.5 + U_TOL && 0.5 <= b + U_TOL)
            .map(|&(a, b)| 2.0 * (0.5 - a).min(b - 0.5).clamp(0.0, 0.5))
            .fold(0.0, f64::max)
    }
}

type SupportFn = Arc<dyn Fn(f64) -> USet + Send + Sync>;
type MeasureFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A family given by closures; used for custom and deliberately broken sets.
#[derive(Clone)]
pub struct FnNested {
    label: String,
    range: (f64, f64),
    orientation: Orientation,
    support: SupportFn,
    measure: Option<MeasureFn>,
}

impl FnNested {
    pub fn new(
        label: impl Into<String>,
        range: (f64, f64),
        support: impl Fn(f64) -> USet + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            range,
            orientation: Orientation::Increasing,
            support: Arc::new(support),
            measure: None,
        }
    }

    pub fn with_orientation(mut self, o: Orientation) -> Self {
        self.orientation = o;
        self
    }

    /// Override the reported measure (otherwise the support length).
    pub fn with_measure(mut self, m: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.measure = Some(Arc::new(m));
        self
    }
}

impl NestedRandomSet for FnNested {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn index_range(&self) -> (f64, f64) {
        self.range
    }

    fn orientation(&self) -> Orientation {
        self.orientation
    }

    fn support(&self, t: f64) -> USet {
        (self.support)(t)
    }

    fn measure_of(&self, t: f64) -> f64 {
        match &self.measure {
            Some(m) => m(t),
            None => self.support(t).measure(),
        }
    }
}

/// Same supports as `inner`, measure replaced by P_U(S_t)^power.
///
/// Breaks P2 for any power ≠ 1; power < 1 inflates P_S{S ⊆ K} and so
/// deflates plausibility, which is what a validity audit must catch.
#[derive(Clone)]
pub struct Distorted {
    inner: Arc<dyn NestedRandomSet>,
    power: f64,
}

impl Distorted {
    pub fn new(inner: Arc<dyn NestedRandomSet>, power: f64) -> Self {
        Self { inner, power }
    }
}

impl NestedRandomSet for Distorted {
    fn label(&self) -> String {
        format!("distorted^{} {}", self.power, self.inner.label())
    }

    fn index_range(&self) -> (f64, f64) {
        self.inner.index_range()
    }

    fn orientation(&self) -> Orientation {
        self.inner.orientation()
    }

    fn support(&self, t: f64) -> USet {
        self.inner.support(t)
    }

    fn measure_of(&self, t: f64) -> f64 {
        self.inner.measure_of(t).powf(self.power)
    }

    fn containment_measure(&self, k: &USet) -> f64 {
        self.inner.containment_measure(k).powf(self.power)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic<S: NestedRandomSet>(s: &S, k: &USet) -> f64 {
        containment_search(s, k).1
    }

    #[test]
    fn fast_paths_agree_with_generic_search() {
        let ks = [
            USet::empty(),
            USet::full(),
            USet::closed(0.0, 0.37),
            USet::closed(0.2, 0.9),
            USet::from_parts([(0.0, 0.61), (0.61, 1.0)]),
            USet::from_parts([(0.0, 0.3), (0.45, 0.8)]),
            USet::from_parts([(0.0, 0.5), (0.5, 1.0)]),
        ];
        for k in &ks {
            assert!((OneSided.containment_measure(k) - generic(&OneSided, k)).abs() < 1e-12, "{k}");
            assert!((Symmetric.containment_measure(k) - generic(&Symmetric, k)).abs() < 1e-12, "{k}");
        }
    }

    #[test]
    fn point_hole_gives_two_sided_measure() {
        let k = USet::from_parts([(0.0, 0.8), (0.8, 1.0)]);
        assert!((Symmetric.containment_measure(&k) - 0.6).abs() < 1e-15);
        assert!((OneSided.containment_measure(&k) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn decreasing_family_search() {
        // S_t = [t, 1], t ∈ [0, 1]
        let s = FnNested::new("upper", (0.0, 1.0), |t| USet::closed(t, 1.0))
            .with_orientation(Orientation::Decreasing);
        let k = USet::closed(0.25, 1.0);
        let (t, m) = containment_search(&s, &k);
        assert!((t.unwrap() - 0.25).abs() < 1e-12);
        assert!((m - 0.75).abs() < 1e-12);
    }

    #[test]
    fn distortion_inflates_containment() {
        let d = Distorted::new(Arc::new(OneSided), 0.5);
        let k = USet::closed(0.0, 0.25);
        assert!((d.containment_measure(&k) - 0.5).abs() < 1e-15);
    }
}

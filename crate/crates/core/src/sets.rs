//! Sets on the parameter line and on the auxiliary space 𝕌 = [0, 1].
//!
//! [`ParamSet`] is a normalized finite union of intervals with open or closed
//! ends and is the representation behind both focal sets and [`Assertion`]s.
//! [`USet`] is a finite union of closed intervals in [0, 1].

use std::fmt;

use serde::{Deserialize, Serialize};

/// One interval of the real line. Infinite ends are always open.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Self {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn point(x: f64) -> Self {
        Self::closed(x, x)
    }

    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn empty() -> Self {
        Self::open(0.0, 0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_nan()
            || self.hi.is_nan()
            || self.lo > self.hi
            || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn is_point(&self) -> bool {
        !self.is_empty() && self.lo == self.hi
    }

    pub fn length(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        Interval::new(lo, hi, lo_closed, hi_closed)
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        if self.is_empty() {
            return true;
        }
        if other.is_empty() {
            return false;
        }
        let lo_ok = other.lo < self.lo || (other.lo == self.lo && (other.lo_closed || !self.lo_closed));
        let hi_ok = self.hi < other.hi || (other.hi == self.hi && (other.hi_closed || !self.hi_closed));
        lo_ok && hi_ok
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        if self.is_point() {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Normalized finite union of intervals: sorted, disjoint, no empty parts,
/// and no two parts whose union is itself an interval.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    parts: Vec<Interval>,
}

impl ParamSet {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn from_interval(i: Interval) -> Self {
        Self::from_intervals([i])
    }

    pub fn point(x: f64) -> Self {
        Self::from_interval(Interval::point(x))
    }

    pub fn from_intervals(parts: impl IntoIterator<Item = Interval>) -> Self {
        let mut v: Vec<Interval> = parts.into_iter().filter(|i| !i.is_empty()).collect();
        v.sort_by(|a, b| {
            a.lo.total_cmp(&b.lo)
                .then_with(|| b.lo_closed.cmp(&a.lo_closed))
        });
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for next in v {
            if let Some(cur) = out.last_mut() {
                let joins = next.lo < cur.hi || (next.lo == cur.hi && (cur.hi_closed || next.lo_closed));
                if joins {
                    if next.hi > cur.hi {
                        cur.hi = next.hi;
                        cur.hi_closed = next.hi_closed;
                    } else if next.hi == cur.hi {
                        cur.hi_closed |= next.hi_closed;
                    }
                    continue;
                }
            }
            out.push(next);
        }
        Self { parts: out }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    pub fn union(&self, other: &ParamSet) -> ParamSet {
        Self::from_intervals(self.parts.iter().chain(other.parts.iter()).copied())
    }

    pub fn intersect(&self, other: &ParamSet) -> ParamSet {
        let mut v = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                v.push(a.intersect(b));
            }
        }
        Self::from_intervals(v)
    }

    pub fn intersect_interval(&self, i: &Interval) -> ParamSet {
        Self::from_intervals(self.parts.iter().map(|p| p.intersect(i)))
    }

    /// Complement within `ambient`.
    pub fn complement_within(&self, ambient: &Interval) -> ParamSet {
        let mut gaps = Vec::with_capacity(self.parts.len() + 1);
        let mut lo = f64::NEG_INFINITY;
        let mut lo_closed = false;
        for p in &self.parts {
            gaps.push(Interval::new(lo, p.lo, lo_closed, !p.lo_closed));
            lo = p.hi;
            lo_closed = !p.hi_closed;
        }
        gaps.push(Interval::new(lo, f64::INFINITY, lo_closed, false));
        Self::from_intervals(gaps.iter().map(|g| g.intersect(ambient)))
    }

    pub fn is_subset_of(&self, other: &ParamSet) -> bool {
        self.parts
            .iter()
            .all(|p| other.parts.iter().any(|q| p.is_subset_of(q)))
    }

    /// Smallest interval containing the set.
    pub fn hull(&self) -> Interval {
        match (self.parts.first(), self.parts.last()) {
            (Some(a), Some(b)) => Interval::new(a.lo, b.hi, a.lo_closed, b.hi_closed),
            _ => Interval::empty(),
        }
    }

    pub fn infimum(&self) -> Option<f64> {
        self.parts.first().map(|p| p.lo)
    }

    pub fn supremum(&self) -> Option<f64> {
        self.parts.last().map(|p| p.hi)
    }

    pub fn is_point(&self) -> bool {
        self.parts.len() == 1 && self.parts[0].is_point()
    }

    /// Euclidean distance from `x` to the set (0 inside, ∞ if empty).
    pub fn distance(&self, x: f64) -> f64 {
        self.parts
            .iter()
            .map(|p| {
                if x < p.lo {
                    p.lo - x
                } else if x > p.hi {
                    x - p.hi
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Which side of the bound a half-line lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
}

/// An assertion A ⊆ Θ (also used for null hypotheses Θ₀), always held
/// intersected with its ambient parameter space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    set: ParamSet,
    ambient: Interval,
}

impl Assertion {
    pub fn new(set: ParamSet, ambient: Interval) -> Self {
        Self {
            set: set.intersect_interval(&ambient),
            ambient,
        }
    }

    pub fn point(theta: f64, ambient: Interval) -> Self {
        Self::new(ParamSet::point(theta), ambient)
    }

    pub fn interval(i: Interval, ambient: Interval) -> Self {
        Self::new(ParamSet::from_interval(i), ambient)
    }

    pub fn half_line(bound: f64, side: Side, closed: bool, ambient: Interval) -> Self {
        let i = match side {
            Side::Below => Interval::new(f64::NEG_INFINITY, bound, false, closed),
            Side::Above => Interval::new(bound, f64::INFINITY, closed, false),
        };
        Self::interval(i, ambient)
    }

    pub fn union_of(items: &[Assertion], ambient: Interval) -> Self {
        let set = items
            .iter()
            .fold(ParamSet::empty(), |acc, a| acc.union(&a.set));
        Self::new(set, ambient)
    }

    pub fn everything(ambient: Interval) -> Self {
        Self::interval(ambient, ambient)
    }

    pub fn nothing(ambient: Interval) -> Self {
        Self::new(ParamSet::empty(), ambient)
    }

    pub fn set(&self) -> &ParamSet {
        &self.set
    }

    pub fn ambient(&self) -> Interval {
        self.ambient
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.set.contains(theta)
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn is_point(&self) -> bool {
        self.set.is_point()
    }

    pub fn complement(&self) -> Assertion {
        Assertion {
            set: self.set.complement_within(&self.ambient),
            ambient: self.ambient,
        }
    }

    pub fn is_subset_of(&self, other: &Assertion) -> bool {
        self.set.is_subset_of(&other.set)
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.set)
    }
}

/// Finite union of closed intervals in [0, 1].
///
/// Parts that overlap are merged. Parts that only touch at a point are kept
/// apart: the shared point is an excluded hole of the set the parts close
/// (for example U_x({θ}ᶜ) around the single u that maps onto θ).
/// Containment of a closed interval is judged on its interior, so a
/// positive-length interval is inside when it sits within a single part.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct USet {
    parts: Vec<(f64, f64)>,
}

/// Slack for endpoint comparisons on [0, 1].
pub const U_TOL: f64 = 1e-14;

impl USet {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn full() -> Self {
        Self { parts: vec![(0.0, 1.0)] }
    }

    pub fn closed(a: f64, b: f64) -> Self {
        Self::from_parts([(a, b)])
    }

    pub fn singleton(u: f64) -> Self {
        Self::closed(u, u)
    }

    /// Parts are clipped to [0, 1]; overlapping parts merge, touching parts do not.
    pub fn from_parts(parts: impl IntoIterator<Item = (f64, f64)>) -> Self {
        Self::build(parts, false)
    }

    /// As [`USet::from_parts`] but touching parts are also merged.
    pub fn from_parts_contiguous(parts: impl IntoIterator<Item = (f64, f64)>) -> Self {
        Self::build(parts, true)
    }

    fn build(parts: impl IntoIterator<Item = (f64, f64)>, merge_touching: bool) -> Self {
        let mut v: Vec<(f64, f64)> = parts
            .into_iter()
            .map(|(a, b)| (a.max(0.0), b.min(1.0)))
            .filter(|(a, b)| a <= b)
            .collect();
        v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (a, b) in v {
            if let Some(cur) = out.last_mut() {
                let overlaps = a < cur.1 || (a == cur.1 && (merge_touching || a == b || cur.0 == cur.1));
                if overlaps {
                    cur.1 = cur.1.max(b);
                    continue;
                }
            }
            out.push((a, b));
        }
        Self { parts: out }
    }

    pub fn union(&self, other: &USet) -> USet {
        Self::from_parts(self.parts.iter().chain(other.parts.iter()).copied())
    }

    pub fn union_contiguous(&self, other: &USet) -> USet {
        Self::from_parts_contiguous(self.parts.iter().chain(other.parts.iter()).copied())
    }

    pub fn parts(&self) -> &[(f64, f64)] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// P_U measure for U ~ Unif(0, 1).
    pub fn measure(&self) -> f64 {
        self.parts.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, u: f64) -> bool {
        self.parts.iter().any(|&(a, b)| a <= u && u <= b)
    }

    /// Whether the closed interval `[a, b]` lies inside, judged on its interior.
    pub fn contains_interval(&self, a: f64, b: f64) -> bool {
        if b - a <= 0.0 {
            return true;
        }
        self.parts
            .iter()
            .any(|&(p, q)| p <= a + U_TOL && b <= q + U_TOL)
    }

    /// Right end of the widest part starting at 0 (within `U_TOL`): the
    /// largest t with [0, t] inside.
    pub fn anchored_end(&self) -> Option<f64> {
        self.parts
            .iter()
            .filter(|&&(a, _)| a <= U_TOL)
            .map(|&(_, b)| b)
            .reduce(f64::max)
    }

    pub fn is_subset_of(&self, other: &USet) -> bool {
        self.parts.iter().all(|&(a, b)| other.contains_interval(a, b))
    }

    /// Strict set inclusion of the closed parts, endpoints included.
    pub fn is_closed_subset_of(&self, other: &USet) -> bool {
        self.parts.iter().all(|&(a, b)| {
            other
                .parts
                .iter()
                .any(|&(p, q)| p <= a + U_TOL && b <= q + U_TOL)
        })
    }
}

impl fmt::Display for USet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (i, (a, b)) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "[{a}, {b}]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_merges_overlaps_and_covered_touches() {
        let s = ParamSet::from_intervals([
            Interval::new(0.0, 1.0, true, false),
            Interval::new(1.0, 2.0, true, true),
            Interval::closed(5.0, 6.0),
            Interval::closed(5.5, 7.0),
        ]);
        assert_eq!(s.parts().len(), 2);
        assert_eq!(s.parts()[0], Interval::closed(0.0, 2.0));
        assert_eq!(s.parts()[1], Interval::closed(5.0, 7.0));
        // [0,1) ∪ (1,2] has a hole at 1
        let h = ParamSet::from_intervals([Interval::new(0.0, 1.0, true, false), Interval::new(1.0, 2.0, false, true)]);
        assert_eq!(h.parts().len(), 2);
        assert!(!h.contains(1.0));
    }

    #[test]
    fn complement_of_point_and_half_line() {
        let amb = Interval::open(0.0, 1.0);
        let a = Assertion::point(0.4, amb);
        let c = a.complement();
        assert_eq!(c.set().parts(), &[Interval::open(0.0, 0.4), Interval::open(0.4, 1.0)]);
        let h = Assertion::half_line(0.4, Side::Below, true, amb);
        assert_eq!(h.set().parts(), &[Interval::new(0.0, 0.4, false, true)]);
        assert_eq!(h.complement().set().parts(), &[Interval::open(0.4, 1.0)]);
        assert_eq!(h.complement().complement(), h);
    }

    #[test]
    fn subset_respects_open_ends() {
        let a = Interval::new(0.0, 1.0, false, true);
        assert!(Interval::open(0.0, 1.0).is_subset_of(&a));
        assert!(!Interval::closed(0.0, 1.0).is_subset_of(&a));
        assert!(Interval::empty().is_subset_of(&a));
    }

    #[test]
    fn uset_touching_parts_stay_apart() {
        let k = USet::from_parts([(0.0, 0.3), (0.3, 1.0)]);
        assert_eq!(k.parts().len(), 2);
        assert!(k.contains_interval(0.0, 0.3));
        assert!(!k.contains_interval(0.2, 0.4));
        assert!(k.contains_interval(0.3, 0.3));
        let m = USet::from_parts_contiguous([(0.0, 0.3), (0.3, 1.0)]);
        assert_eq!(m, USet::full());
        assert!((k.measure() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn distance_to_set() {
        let s = ParamSet::from_interval(Interval::closed(-0.82, 0.52));
        assert_eq!(s.distance(0.0), 0.0);
        assert!((s.distance(1.0) - 0.48).abs() < 1e-15);
        assert!((s.distance(-1.0) - 0.18).abs() < 1e-15);
    }
}

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dist::special::{norm_cdf, norm_sf};
use crate::dist::Distribution;
use crate::error::{ImError, Result};
use crate::im::AssociationModel;
use crate::pvalue::{StatKind, Tail, TestStatistic};
use crate::sets::{Assertion, Interval, ParamSet, USet};

/// X̄ = θ + σ n^{−1/2} Φ⁻¹(U), optionally with θ restricted to a box.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalMeanModel {
    n: u64,
    sigma: f64,
    bounds: Option<(f64, f64)>,
}

impl NormalMeanModel {
    pub fn new(n: u64, sigma: f64) -> Result<Self> {
        if n == 0 {
            return Err(ImError::Domain("sample size must be positive".into()));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ImError::Domain(format!("sigma = {sigma} must be positive")));
        }
        Ok(Self { n, sigma, bounds: None })
    }

    pub fn constrained(n: u64, sigma: f64, lo: f64, hi: f64) -> Result<Self> {
        let mut m = Self::new(n, sigma)?;
        if !(lo < hi) || lo.is_nan() || hi.is_nan() {
            return Err(ImError::Domain(format!("constraint box [{lo}, {hi}] is empty")));
        }
        m.bounds = Some((lo, hi));
        Ok(m)
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    /// σ / √n.
    pub fn scale(&self) -> f64 {
        self.sigma / (self.n as f64).sqrt()
    }

    fn z(u: f64) -> f64 {
        Distribution::std_normal().quantile_unchecked(u)
    }

    fn u_of(&self, x: f64, theta: f64) -> f64 {
        // θ = x − c Φ⁻¹(u)  ⟺  u = Φ((x − θ)/c)
        if theta == f64::INFINITY {
            0.0
        } else if theta == f64::NEG_INFINITY {
            1.0
        } else {
            norm_cdf((x - theta) / self.scale())
        }
    }

    fn distance_tail(&self, set: &ParamSet, theta: f64, t: f64, tail: Tail) -> Option<f64> {
        let [part] = set.parts() else { return None };
        let (a, b) = (part.lo, part.hi);
        let c = self.scale();
        let below = |v: f64| if v == f64::NEG_INFINITY { 0.0 } else { norm_cdf((v - theta) / c) };
        let above = |v: f64| if v == f64::INFINITY { 0.0 } else { norm_sf((v - theta) / c) };
        Some(if t < 0.0 || (t == 0.0 && tail == Tail::Weak) {
            1.0
        } else {
            below(a - t) + above(b + t)
        })
    }
}

/// 1 − Φ(√n (x̄ − θ₀)/σ).
pub fn normal_mean_one_sided_pl(n: u64, sigma: f64, theta0: f64, xbar: f64) -> Result<f64> {
    let m = NormalMeanModel::new(n, sigma)?;
    if !theta0.is_finite() || !xbar.is_finite() {
        return Err(ImError::Domain("theta0 and xbar must be finite".into()));
    }
    Ok(norm_sf((xbar - theta0) / m.scale()))
}

/// Where the focal sets of a constrained normal mean are empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FocalDiagnostic {
    pub x: f64,
    pub empty_u: USet,
    pub measure: f64,
    /// Midpoint of the longest empty stretch.
    pub witness_u: Option<f64>,
    pub notes: Vec<String>,
}

/// The u-set on which Θ_x(u) = ∅ and its P_U-measure.
pub fn constrained_focal_diagnostic(m: &NormalMeanModel, x: f64) -> Result<FocalDiagnostic> {
    m.validate_observation(x)?;
    let empty_u = m.empty_focal_uset(x);
    let witness_u = empty_u
        .parts()
        .iter()
        .max_by(|p, q| (p.1 - p.0).total_cmp(&(q.1 - q.0)))
        .map(|&(a, b)| 0.5 * (a + b));
    let mut notes = Vec::new();
    match m.bounds {
        None => notes.push("no constraint: every focal set is a single point".into()),
        Some((lo, hi)) => {
            for &(a, b) in empty_u.parts() {
                let side = if a <= 0.0 { format!("above {hi}") } else { format!("below {lo}") };
                notes.push(format!("u in [{a}, {b}] puts x − cΦ⁻¹(u) {side}"));
            }
        }
    }
    Ok(FocalDiagnostic {
        x,
        measure: empty_u.measure(),
        empty_u,
        witness_u,
        notes,
    })
}

impl AssociationModel for NormalMeanModel {
    fn name(&self) -> &'static str {
        if self.bounds.is_some() {
            "normal-mean-constrained"
        } else {
            "normal-mean"
        }
    }

    fn label(&self) -> String {
        match self.bounds {
            Some((lo, hi)) => format!("normal mean (n = {}, sigma = {}, theta in [{lo}, {hi}])", self.n, self.sigma),
            None => format!("normal mean (n = {}, sigma = {})", self.n, self.sigma),
        }
    }

    fn param_space(&self) -> Interval {
        match self.bounds {
            Some((lo, hi)) => Interval::closed(lo, hi),
            None => Interval::real_line(),
        }
    }

    fn scale_hint(&self) -> f64 {
        self.scale()
    }

    fn validate_observation(&self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(ImError::Domain(format!("sample mean {x} is not finite")));
        }
        Ok(())
    }

    fn generate(&self, theta: f64, u: f64) -> f64 {
        theta + self.scale() * Self::z(u)
    }

    fn focal(&self, x: f64, u: f64) -> ParamSet {
        let theta = x - self.scale() * Self::z(u);
        if theta.is_finite() && self.param_space().contains(theta) {
            ParamSet::point(theta)
        } else {
            ParamSet::empty()
        }
    }

    fn focal_hull(&self, x: f64, lo: f64, hi: f64) -> Option<ParamSet> {
        let c = self.scale();
        let i = Interval::closed(x - c * Self::z(hi), x - c * Self::z(lo));
        Some(ParamSet::from_interval(i.intersect(&self.param_space())))
    }

    fn u_event_part(&self, x: f64, part: &Interval) -> Option<USet> {
        let part = part.intersect(&self.param_space());
        if part.is_empty() {
            return Some(USet::empty());
        }
        if part.is_point() {
            return Some(USet::singleton(self.u_of(x, part.lo)));
        }
        Some(USet::closed(self.u_of(x, part.hi), self.u_of(x, part.lo)))
    }

    fn empty_focal_uset(&self, x: f64) -> USet {
        let Some((lo, hi)) = self.bounds else {
            return USet::empty();
        };
        let mut parts = Vec::new();
        let top = self.u_of(x, hi);
        if top > 0.0 {
            parts.push((0.0, top));
        }
        let bottom = self.u_of(x, lo);
        if bottom < 1.0 {
            parts.push((bottom, 1.0));
        }
        USet::from_parts(parts)
    }

    fn stat_tail(&self, stat: &TestStatistic, theta: f64, t: f64, tail: Tail) -> Option<f64> {
        match stat.kind() {
            StatKind::Identity => Some(if t == f64::NEG_INFINITY {
                1.0
            } else {
                norm_sf((t - theta) / self.scale())
            }),
            StatKind::DistanceTo(set) => self.distance_tail(set, theta, t, tail),
            StatKind::Custom(_) => None,
        }
    }

    fn stat_increasing_in_theta(&self, stat: &TestStatistic) -> bool {
        stat.is_identity()
    }

    fn stat_increasing_in_u(&self, stat: &TestStatistic) -> bool {
        stat.is_identity()
    }

    fn closed_form_pvalue(&self, stat: &TestStatistic, null: &Assertion, x: f64, _tail: Tail) -> Option<f64> {
        if !stat.is_identity() {
            return None;
        }
        let sup = null.set().supremum()?;
        Some(if sup == f64::INFINITY { 1.0 } else { norm_sf((x - sup) / self.scale()) })
    }

    fn shared(&self) -> Arc<dyn AssociationModel> {
        Arc::new(self.clone())
    }
}

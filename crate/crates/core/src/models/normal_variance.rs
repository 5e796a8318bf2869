use std::sync::Arc;

use crate::dist::Distribution;
use crate::error::{ImError, Result};
use crate::im::AssociationModel;
use crate::pvalue::{StatKind, Tail, TestStatistic};
use crate::sets::{Assertion, Interval, ParamSet, USet};

/// Marginal association for σ²: T = (n − 1)S² = σ² F⁻¹(U), F the
/// ChiSq(n − 1) CDF. The observation is T itself.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalVarianceModel {
    n: u64,
    chi: Distribution,
}

impl NormalVarianceModel {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(ImError::Domain(format!("normal variance needs n >= 2, got {n}")));
        }
        Ok(Self {
            n,
            chi: Distribution::ChiSquared { df: n - 1 },
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// (n − 1)S², the observation this model works with.
    pub fn observation(&self, s2: f64) -> f64 {
        (self.n - 1) as f64 * s2
    }

    fn f(&self, v: f64) -> f64 {
        if v == f64::INFINITY {
            1.0
        } else if v <= 0.0 {
            0.0
        } else {
            self.chi.cdf_unchecked(v)
        }
    }

    fn sf(&self, v: f64) -> f64 {
        if v == f64::INFINITY {
            0.0
        } else if v <= 0.0 {
            1.0
        } else {
            self.chi.sf_unchecked(v)
        }
    }

    fn f_inv(&self, u: f64) -> f64 {
        self.chi.quantile_unchecked(u)
    }
}

/// 1 − F((n − 1)s²/σ₀²), F the ChiSq(n − 1) CDF.
pub fn normal_variance_pl(n: u64, s2: f64, sigma0_sq: f64) -> Result<f64> {
    let m = NormalVarianceModel::new(n)?;
    if !(s2 > 0.0 && s2.is_finite()) {
        return Err(ImError::Domain(format!("s2 = {s2} must be positive")));
    }
    if !(sigma0_sq > 0.0) {
        return Err(ImError::Domain(format!("sigma0_sq = {sigma0_sq} must be positive")));
    }
    Ok(m.sf(m.observation(s2) / sigma0_sq))
}

impl AssociationModel for NormalVarianceModel {
    fn name(&self) -> &'static str {
        "normal-variance"
    }

    fn label(&self) -> String {
        format!("normal variance (n = {})", self.n)
    }

    fn param_space(&self) -> Interval {
        Interval::open(0.0, f64::INFINITY)
    }

    fn validate_observation(&self, x: f64) -> Result<()> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(ImError::Domain(format!("(n - 1)S^2 = {x} must be positive and finite")));
        }
        Ok(())
    }

    fn generate(&self, theta: f64, u: f64) -> f64 {
        theta * self.f_inv(u)
    }

    fn focal(&self, x: f64, u: f64) -> ParamSet {
        let q = self.f_inv(u);
        let theta = x / q;
        if q > 0.0 && theta > 0.0 && theta.is_finite() {
            ParamSet::point(theta)
        } else {
            ParamSet::empty()
        }
    }

    fn focal_hull(&self, x: f64, lo: f64, hi: f64) -> Option<ParamSet> {
        let (a, b) = (x / self.f_inv(hi), x / self.f_inv(lo));
        Some(ParamSet::from_interval(Interval::new(a, b, a > 0.0, b.is_finite())))
    }

    fn u_event_part(&self, x: f64, part: &Interval) -> Option<USet> {
        if part.is_empty() {
            return Some(USet::empty());
        }
        // σ² = x / F⁻¹(u) ∈ (p, q)  ⟺  F(x/q) < u < F(x/p)
        if part.is_point() {
            return Some(USet::singleton(self.f(x / part.lo)));
        }
        Some(USet::closed(self.f(x / part.hi), self.f(x / part.lo)))
    }

    fn stat_tail(&self, stat: &TestStatistic, theta: f64, t: f64, _tail: Tail) -> Option<f64> {
        match stat.kind() {
            StatKind::Identity => Some(self.sf(t / theta)),
            _ => None,
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
        Some(self.sf(x / sup))
    }

    fn shared(&self) -> Arc<dyn AssociationModel> {
        Arc::new(self.clone())
    }
}

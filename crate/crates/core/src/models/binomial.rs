use std::sync::Arc;

use crate::dist::{binomial_cdf, binomial_sf, Distribution};
use crate::error::{ImError, Result};
use crate::im::AssociationModel;
use crate::pvalue::{StatKind, Tail, TestStatistic};
use crate::sets::{Assertion, Interval, ParamSet, USet};

/// X ~ Binomial(n, θ) through F_θ(X − 1) ≤ U < F_θ(X), U ~ Unif(0, 1).
///
/// Focal sets are Θ_x(u) = [1 − G⁻¹_{n−x+1,x}(u), 1 − G⁻¹_{n−x,x+1}(u)),
/// with G_{a,b} the Beta(a, b) CDF; at x = 0 the lower end is 0 and at
/// x = n the upper end is 1, both open.
#[derive(Clone, Debug, PartialEq)]
pub struct BinomialModel {
    n: u64,
}

impl BinomialModel {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(ImError::Domain("binomial n must be positive".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// F_θ(x), extended to θ ∈ {0, 1} by continuity.
    pub fn cdf(&self, theta: f64, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else if x >= self.n as f64 || theta <= 0.0 {
            1.0
        } else if theta >= 1.0 {
            0.0
        } else {
            binomial_cdf(self.n, theta, x)
        }
    }

    /// P_θ{X ≥ t} (weak) or P_θ{X > t} (strict).
    pub fn tail(&self, theta: f64, t: f64, tail: Tail) -> f64 {
        let below = match tail {
            Tail::Weak => t.ceil() - 1.0,
            Tail::Strict => t.floor(),
        };
        if below < 0.0 || theta >= 1.0 {
            1.0
        } else if below >= self.n as f64 || theta <= 0.0 {
            0.0
        } else if below + 1.0 < self.n as f64 * theta {
            // upper tail holds most of the mass: subtract the short lower sum
            1.0 - binomial_cdf(self.n, theta, below)
        } else {
            binomial_sf(self.n, theta, below)
        }
    }

    fn lower(&self, x: u64, u: f64) -> f64 {
        if x == 0 {
            return 0.0;
        }
        let g = Distribution::Beta {
            a: (self.n - x + 1) as f64,
            b: x as f64,
        };
        1.0 - g.quantile_unchecked(u)
    }

    fn upper(&self, x: u64, u: f64) -> f64 {
        if x == self.n {
            return 1.0;
        }
        let g = Distribution::Beta {
            a: (self.n - x) as f64,
            b: (x + 1) as f64,
        };
        1.0 - g.quantile_unchecked(u)
    }

    fn interval(&self, lo: f64, hi: f64) -> ParamSet {
        if lo >= hi {
            return ParamSet::empty();
        }
        ParamSet::from_interval(Interval::new(lo, hi, lo > 0.0, false))
    }
}

/// One-sided p-value for Θ₀ = (0, θ₀] with T(X) = X: 1 − F_θ₀(x − 1) under
/// the weak tail, 1 − F_θ₀(x) under the strict one.
pub fn binomial_one_sided_pl(n: u64, theta0: f64, x: u64, tail: Tail) -> Result<f64> {
    let m = BinomialModel::new(n)?;
    if !(theta0 > 0.0 && theta0 < 1.0) {
        return Err(ImError::Domain(format!("theta0 = {theta0} outside (0, 1)")));
    }
    if x > n {
        return Err(ImError::Domain(format!("x = {x} outside 0..={n}")));
    }
    Ok(m.tail(theta0, x as f64, tail))
}

impl AssociationModel for BinomialModel {
    fn name(&self) -> &'static str {
        "binomial"
    }

    fn label(&self) -> String {
        format!("binomial(n = {})", self.n)
    }

    fn param_space(&self) -> Interval {
        Interval::open(0.0, 1.0)
    }

    fn is_discrete(&self) -> bool {
        true
    }

    fn scale_hint(&self) -> f64 {
        0.1
    }

    fn validate_observation(&self, x: f64) -> Result<()> {
        if x.fract() != 0.0 || !(0.0..=self.n as f64).contains(&x) {
            return Err(ImError::Domain(format!("binomial observation {x} is not an integer in 0..={}", self.n)));
        }
        Ok(())
    }

    fn generate(&self, theta: f64, u: f64) -> f64 {
        if theta <= 0.0 {
            return 0.0;
        }
        if theta >= 1.0 {
            return self.n as f64;
        }
        let mut acc = 0.0;
        for k in 0..self.n {
            acc += crate::dist::binomial_pmf(self.n, theta, k);
            if acc > u && binomial_cdf(self.n, theta, k as f64) > u {
                return k as f64;
            }
        }
        self.n as f64
    }

    fn focal(&self, x: f64, u: f64) -> ParamSet {
        let x = x as u64;
        self.interval(self.lower(x, u), self.upper(x, u))
    }

    fn focal_hull(&self, x: f64, lo: f64, hi: f64) -> Option<ParamSet> {
        let x = x as u64;
        // both endpoints decrease in u
        Some(self.interval(self.lower(x, hi), self.upper(x, lo)))
    }

    fn u_event_part(&self, x: f64, part: &Interval) -> Option<USet> {
        // [L(u), R(u)) ⊆ part ⟺ F_q(x) ≤ u ≤ F_p(x − 1), closure taken
        let (p, q) = (part.lo, part.hi);
        if part.is_empty() {
            return Some(USet::empty());
        }
        let from = if q >= 1.0 { 0.0 } else { self.cdf(q, x) };
        let to = if p <= 0.0 { 1.0 } else { self.cdf(p, x - 1.0) };
        Some(if from <= to && !part.is_point() {
            USet::closed(from, to)
        } else {
            USet::empty()
        })
    }

    fn stat_tail(&self, stat: &TestStatistic, theta: f64, t: f64, tail: Tail) -> Option<f64> {
        match stat.kind() {
            StatKind::Identity => Some(self.tail(theta, t, tail)),
            _ => None,
        }
    }

    fn stat_increasing_in_theta(&self, stat: &TestStatistic) -> bool {
        stat.is_identity()
    }

    fn stat_increasing_in_u(&self, stat: &TestStatistic) -> bool {
        stat.is_identity()
    }

    fn closed_form_pvalue(&self, stat: &TestStatistic, null: &Assertion, x: f64, tail: Tail) -> Option<f64> {
        if !stat.is_identity() {
            return None;
        }
        let sup = null.set().supremum()?;
        Some(self.tail(sup, x, tail))
    }

    fn shared(&self) -> Arc<dyn AssociationModel> {
        Arc::new(self.clone())
    }
}

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::im::AssociationModel;
use crate::sets::ParamSet;

/// Which of P{T ≥ t} (weak, the definition of the p-value) or P{T > t}
/// (strict) is reported. The two differ only at atoms of T.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    #[default]
    Weak,
    Strict,
}

impl Tail {
    pub fn exceeds(self, value: f64, t: f64) -> bool {
        match self {
            Tail::Weak => value >= t,
            Tail::Strict => value > t,
        }
    }
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tail::Weak => "weak",
            Tail::Strict => "strict",
        })
    }
}

impl std::str::FromStr for Tail {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "weak" => Ok(Tail::Weak),
            "strict" => Ok(Tail::Strict),
            other => Err(format!("unknown tail convention {other:?}; expected weak or strict")),
        }
    }
}

#[derive(Clone)]
pub enum StatKind {
    /// T(x) = x.
    Identity,
    /// T(x) = distance from x to the set.
    DistanceTo(ParamSet),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A test statistic T with the convention that large values are evidence
/// against the null.
#[derive(Clone)]
pub struct TestStatistic {
    kind: StatKind,
    label: String,
}

impl TestStatistic {
    pub fn identity() -> Self {
        Self {
            kind: StatKind::Identity,
            label: "identity".into(),
        }
    }

    pub fn distance_to(set: ParamSet) -> Self {
        let label = format!("distance to {set}");
        Self {
            kind: StatKind::DistanceTo(set),
            label,
        }
    }

    pub fn custom(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            kind: StatKind::Custom(Arc::new(f)),
            label: label.into(),
        }
    }

    pub fn kind(&self) -> &StatKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, StatKind::Identity)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        match &self.kind {
            StatKind::Identity => x,
            StatKind::DistanceTo(set) => set.distance(x),
            StatKind::Custom(f) => f(x),
        }
    }

    /// T(a(θ, u)).
    pub fn on_aux(&self, m: &dyn AssociationModel, theta: f64, u: f64) -> f64 {
        self.evaluate(m.generate(theta, u))
    }
}

impl fmt::Debug for TestStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestStatistic").field("label", &self.label).finish()
    }
}

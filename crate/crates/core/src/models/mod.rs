//! Concrete associations: binomial, normal mean (optionally constrained)
//! and normal variance.

mod binomial;
mod normal_mean;
mod normal_variance;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use binomial::{binomial_one_sided_pl, BinomialModel};
pub use normal_mean::{constrained_focal_diagnostic, normal_mean_one_sided_pl, FocalDiagnostic, NormalMeanModel};
pub use normal_variance::{normal_variance_pl, NormalVarianceModel};

use crate::error::{ImError, Result};
use crate::im::AssociationModel;

pub const MODEL_NAMES: [&str; 4] = ["binomial", "normal-mean", "normal-variance", "normal-mean-constrained"];

/// Everything the registry needs to build any model; unused fields are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: u64,
    pub sigma: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            n: 1,
            sigma: 1.0,
            lo: -1.0,
            hi: 1.0,
        }
    }
}

pub fn build(name: &str, p: &ModelParams) -> Result<Arc<dyn AssociationModel>> {
    Ok(match name {
        "binomial" => Arc::new(BinomialModel::new(p.n)?),
        "normal-mean" => Arc::new(NormalMeanModel::new(p.n, p.sigma)?),
        "normal-variance" => Arc::new(NormalVarianceModel::new(p.n)?),
        "normal-mean-constrained" => Arc::new(NormalMeanModel::constrained(p.n, p.sigma, p.lo, p.hi)?),
        other => {
            return Err(ImError::Domain(format!(
                "unknown model {other:?}; known models: {}",
                MODEL_NAMES.join(", ")
            )))
        }
    })
}

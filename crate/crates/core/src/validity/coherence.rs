use serde::{Deserialize, Serialize};

use crate::error::{ImError, Result};
use crate::im::{plausibility_value, NestedRandomSet};
use crate::models::NormalMeanModel;
use crate::par::{self, Execution};
use crate::pvalue::{pvalue, SupConfig, TestStatistic};
use crate::sets::Assertion;

const ORDER_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceRow {
    pub x: f64,
    /// p-value of each null, each with its own statistic T(x) = dist(x, Θ₀).
    pub pvalues: Vec<f64>,
    /// pl_x(Θ₀; S) of each null under one fixed random set.
    pub plausibilities: Vec<f64>,
    /// Indices i with Θ₀ᵢ ⊆ Θ₀ᵢ₊₁ but pval(Θ₀ᵢ) > pval(Θ₀ᵢ₊₁).
    pub reversals: Vec<usize>,
    pub plausibility_monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub nulls: Vec<String>,
    pub random_set: String,
    pub rows: Vec<CoherenceRow>,
    pub reversal_count: usize,
    pub plausibility_violations: usize,
}

fn check_nested(nulls: &[Assertion]) -> Result<()> {
    if nulls.len() < 2 {
        return Err(ImError::Domain("need at least two nested nulls".into()));
    }
    for w in nulls.windows(2) {
        if !w[0].is_subset_of(&w[1]) {
            return Err(ImError::Domain(format!("{} is not contained in {}", w[0], w[1])));
        }
    }
    Ok(())
}

/// p-values of nested nulls, each tested with its own distance statistic,
/// next to plausibilities of the same nulls under one random set.
pub fn coherence_demo(
    m: &NormalMeanModel,
    x: f64,
    nested_nulls: &[Assertion],
    s: &dyn NestedRandomSet,
    cfg: &SupConfig,
) -> Result<CoherenceRow> {
    check_nested(nested_nulls)?;
    let mut pvalues = Vec::with_capacity(nested_nulls.len());
    let mut plausibilities = Vec::with_capacity(nested_nulls.len());
    for null in nested_nulls {
        let stat = TestStatistic::distance_to(null.set().clone());
        pvalues.push(pvalue(m, &stat, null, x, cfg)?.value);
        plausibilities.push(plausibility_value(m, x, s, null)?);
    }
    let reversals = (0..nested_nulls.len() - 1)
        .filter(|&i| pvalues[i] > pvalues[i + 1] + ORDER_TOL)
        .collect();
    let plausibility_monotone = plausibilities.windows(2).all(|w| w[0] <= w[1] + ORDER_TOL);
    Ok(CoherenceRow {
        x,
        pvalues,
        plausibilities,
        reversals,
        plausibility_monotone,
    })
}

/// [`coherence_demo`] over a grid of observations.
pub fn coherence_scan(
    m: &NormalMeanModel,
    xs: &[f64],
    nested_nulls: &[Assertion],
    s: &dyn NestedRandomSet,
    cfg: &SupConfig,
) -> Result<CoherenceReport> {
    check_nested(nested_nulls)?;
    let inner = SupConfig {
        execution: Execution::Sequential,
        ..cfg.clone()
    };
    let rows = par::map_slice(cfg.execution, xs, |&x| coherence_demo(m, x, nested_nulls, s, &inner))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherenceReport {
        nulls: nested_nulls.iter().map(|a| a.to_string()).collect(),
        random_set: s.label(),
        reversal_count: rows.iter().filter(|r| !r.reversals.is_empty()).count(),
        plausibility_violations: rows.iter().filter(|r| !r.plausibility_monotone).count(),
        rows,
    })
}

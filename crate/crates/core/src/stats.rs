//! Sample summaries and goodness-of-fit distances used by the audits.

use serde::{Deserialize, Serialize};

use crate::error::{ImError, Result};

/// n, mean and the (n − 1)-divisor sample variance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub s2: f64,
}

/// Welford's one-pass mean and variance. Needs at least two finite values.
pub fn summarize(data: &[f64]) -> Result<Summary> {
    if data.len() < 2 {
        return Err(ImError::Domain(format!(
            "need at least 2 observations for a sample variance, got {}",
            data.len()
        )));
    }
    if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
        return Err(ImError::Domain(format!("non-finite observation {bad}")));
    }
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, &v) in data.iter().enumerate() {
        let d = v - mean;
        mean += d / (i + 1) as f64;
        m2 += d * (v - mean);
    }
    Ok(Summary {
        n: data.len(),
        mean,
        s2: m2 / (data.len() - 1) as f64,
    })
}

/// sup_α |F_n(α) − α| for a sample in [0, 1].
pub fn ks_uniform(sample: &[f64]) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let x = x.clamp(0.0, 1.0);
            ((i + 1) as f64 / n - x).max(x - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// sup_α (F_n(α) − α): how far the sample sits below Unif(0, 1) in the
/// stochastic order. Zero or negative values mean dominance holds.
pub fn ks_dominance(sample: &[f64]) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    // F_n jumps at ties; use the top of each run of equal values
    let mut worst = f64::NEG_INFINITY;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        worst = worst.max((j + 1) as f64 / n - v[i].clamp(0.0, 1.0));
        i = j + 1;
    }
    worst
}

/// 3 binomial-proportion standard errors at level α over n replications.
pub fn three_sigma(alpha: f64, n: usize) -> f64 {
    3.0 * (alpha * (1.0 - alpha) / n as f64).sqrt()
}

//! Sample-statistics aggregation, the noise schedule for the objective GP,
//! and the mean-variance objective.
//!
//! Each optimization iteration queries `k` raw objective observations; their
//! sample mean becomes the objective target and their unbiased sample
//! variance becomes a target for the variance surrogate.  The objective GP's
//! per-point noise variances are then the variance surrogate's upper
//! confidence bounds divided by `k` (the sample-mean correction).

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::gp::GpModel;

/// One iteration's raw draws: `k` objective observations plus a single
/// constraint observation.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub x: DVector<f64>,
    pub values: Vec<f64>,
    pub constraint: f64,
}

impl SampleBatch {
    pub fn k(&self) -> usize {
        self.values.len()
    }
}

/// Risk and confidence-bound parameters shared by the optimization loops.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskConfig {
    /// Coefficient of absolute risk tolerance `α ≥ 0`.
    pub alpha: f64,
    /// Objective evaluations per iteration (`k ≥ 2`).
    pub k: usize,
    pub beta_f: f64,
    pub beta_var: f64,
    pub beta_q: f64,
    /// Floor applied to the variance ucb before the `1/k` division.
    pub var_floor: f64,
}

impl RiskConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) {
            return Err(Error::invalid("alpha must be >= 0"));
        }
        if self.k < 2 {
            return Err(Error::invalid("k must be >= 2 for sample variances"));
        }
        for (name, v) in [
            ("beta_f", self.beta_f),
            ("beta_var", self.beta_var),
            ("beta_q", self.beta_q),
            ("var_floor", self.var_floor),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be >= 0 and finite")));
            }
        }
        Ok(())
    }
}

impl Default for RiskConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            k: 10,
            beta_f: 3.0,
            beta_var: 3.0,
            beta_q: 3.0,
            var_floor: 1e-12,
        }
    }
}

/// Sample mean and unbiased sample variance of a batch.
pub fn aggregate(batch: &SampleBatch) -> Result<(f64, f64)> {
    let k = batch.k();
    if k < 2 {
        return Err(Error::invalid(format!(
            "sample variance requires k >= 2 observations, got {k}"
        )));
    }
    let mean = batch.values.iter().sum::<f64>() / k as f64;
    let ss: f64 = batch.values.iter().map(|y| (y - mean) * (y - mean)).sum();
    Ok((mean, ss / (k - 1) as f64))
}

/// Per-point noise variances for the objective GP:
/// `max(ucb_var(x_i), v_min) / k`.
pub fn noise_schedule(
    var_model: &GpModel,
    xs: &[DVector<f64>],
    k: usize,
    beta_var: f64,
    v_min: f64,
) -> Result<Vec<f64>> {
    let preds = var_model.predict_many(xs)?;
    Ok(preds
        .iter()
        .map(|(mean, var)| (mean + beta_var * var.sqrt()).max(v_min) / k as f64)
        .collect())
}

/// Mean-variance value `f + α·ρ²`.
pub fn mv_value(f_val: f64, var_val: f64, alpha: f64) -> f64 {
    f_val + alpha * var_val
}

//! One-dimensional synthetic test problem with three global cost minima: one
//! violating the constraint, one in the low-noise region and one in the
//! high-noise region.
//!
//! Closed forms: `f(x) = cos(2πx/3)` with minima at 1.5, 4.5 and 7.5;
//! `ρ²(x) = 0.01 + 0.19/(1+exp(−3(x−3)))` rising past the first minimum;
//! `q(x) = 6/(1+exp(−2(x−6.5)))` crossing the threshold `c = 3` at `x = 6.5`.

use std::sync::Arc;

use nalgebra::DVector;
use rand::RngCore;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::optimizer::{ProblemDefinition, ProblemOracle};
use crate::risk::SampleBatch;

pub const SYNTHETIC_DOMAIN: (f64, f64) = (0.0, 10.0);
pub const SYNTHETIC_THRESHOLD: f64 = 3.0;
pub const SYNTHETIC_SIGMA_Q: f64 = 0.1;

/// The synthetic problem's closed-form oracles.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticProblem {
    pub sigma_q: f64,
}

impl Default for SyntheticProblem {
    fn default() -> Self {
        Self {
            sigma_q: SYNTHETIC_SIGMA_Q,
        }
    }
}

impl SyntheticProblem {
    pub fn objective(x: f64) -> f64 {
        (2.0 * std::f64::consts::PI * x / 3.0).cos()
    }

    pub fn noise_var(x: f64) -> f64 {
        0.01 + 0.19 / (1.0 + (-3.0 * (x - 3.0)).exp())
    }

    pub fn constraint(x: f64) -> f64 {
        6.0 / (1.0 + (-2.0 * (x - 6.5)).exp())
    }

    /// Mean-variance optimum over the true safe set `{x : q(x) <= c}` for a
    /// given weight: `(f(x*), ρ²(x*))` by fine grid search.
    pub fn mv_optimum(weight: f64) -> (f64, f64) {
        let mut best_x = SYNTHETIC_DOMAIN.0;
        let mut best = f64::INFINITY;
        let n = 650_000usize;
        for i in 0..=n {
            let x = SYNTHETIC_DOMAIN.0
                + (SYNTHETIC_DOMAIN.1 - SYNTHETIC_DOMAIN.0) * i as f64 / n as f64;
            if Self::constraint(x) > SYNTHETIC_THRESHOLD {
                continue;
            }
            let mv = Self::objective(x) + weight * Self::noise_var(x);
            if mv < best {
                best = mv;
                best_x = x;
            }
        }
        (Self::objective(best_x), Self::noise_var(best_x))
    }
}

/// One noisy draw of the objective and the constraint at `x`.
pub fn synthetic_eval(x: f64, rng: &mut dyn RngCore) -> Result<(f64, f64)> {
    if !(SYNTHETIC_DOMAIN.0..=SYNTHETIC_DOMAIN.1).contains(&x) {
        return Err(Error::invalid(format!(
            "x = {x} outside the domain [{}, {}]",
            SYNTHETIC_DOMAIN.0, SYNTHETIC_DOMAIN.1
        )));
    }
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let y = SyntheticProblem::objective(x)
        + unit.sample(rng) * SyntheticProblem::noise_var(x).sqrt();
    let m = SyntheticProblem::constraint(x) + unit.sample(rng) * SYNTHETIC_SIGMA_Q;
    Ok((y, m))
}

impl ProblemOracle for SyntheticProblem {
    fn evaluate_batch(
        &self,
        x: &DVector<f64>,
        k: usize,
        rng: &mut dyn RngCore,
    ) -> Result<SampleBatch> {
        let unit = Normal::new(0.0, 1.0).expect("unit normal");
        let sigma = SyntheticProblem::noise_var(x[0]).sqrt();
        if !(SYNTHETIC_DOMAIN.0..=SYNTHETIC_DOMAIN.1).contains(&x[0]) {
            return Err(Error::invalid(format!("x = {} outside the domain", x[0])));
        }
        let f = SyntheticProblem::objective(x[0]);
        let values = (0..k).map(|_| f + unit.sample(rng) * sigma).collect();
        let m = SyntheticProblem::constraint(x[0]) + unit.sample(rng) * self.sigma_q;
        Ok(SampleBatch {
            x: x.clone(),
            values,
            constraint: m,
        })
    }

    fn true_objective(&self, x: &DVector<f64>) -> Option<f64> {
        Some(SyntheticProblem::objective(x[0]))
    }

    fn true_noise_var(&self, x: &DVector<f64>) -> Option<f64> {
        Some(SyntheticProblem::noise_var(x[0]))
    }

    fn true_constraint(&self, x: &DVector<f64>) -> Option<f64> {
        Some(SyntheticProblem::constraint(x[0]))
    }
}

/// Five evenly spaced safe-seed points in [0, 1].
pub fn synthetic_seeds() -> Vec<DVector<f64>> {
    (0..5)
        .map(|i| DVector::from_vec(vec![i as f64 * 0.25]))
        .collect()
}

pub fn synthetic_problem() -> ProblemDefinition {
    ProblemDefinition {
        name: "synthetic".into(),
        bounds: vec![SYNTHETIC_DOMAIN],
        seeds: synthetic_seeds(),
        threshold: SYNTHETIC_THRESHOLD,
        constraint_noise_std: SYNTHETIC_SIGMA_Q,
        oracle: Arc::new(SyntheticProblem::default()),
    }
}

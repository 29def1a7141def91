//! Safe risk-averse Bayesian optimization under heteroscedastic noise.
//!
//! The crate provides the RAGoOSE optimization loop together with the GoOSE
//! and constrained-BO (CBO) baselines, built from:
//!
//! * [`gp`] — Gaussian-process regression with per-observation noise
//!   variances, confidence bounds, posterior-mean gradients and marginal
//!   likelihood hyperparameter tuning,
//! * [`risk`] — sample-statistics aggregation, the variance surrogate over
//!   the input-dependent noise, and the mean-variance objective,
//! * [`safety`] — discretized safe-set bookkeeping (safe set, boundary,
//!   expanders and the noisy expansion operator),
//! * [`acquisition`] — acquisition functions and the particle-swarm
//!   optimizer restricted to the safe region,
//! * [`optimizer`] — the end-to-end optimization loops and run traces,
//! * [`benchmarks`] — the synthetic test problem and the simulated
//!   precision-motion-axis controller-tuning problem.

pub mod acquisition;
pub mod benchmarks;
pub mod error;
pub mod gp;
pub mod optimizer;
pub mod risk;
pub mod safety;

pub use error::{Error, Result};

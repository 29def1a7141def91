//! Simulated precision-motion-axis controller-tuning problem.
//!
//! The tunable gains are `(Kp, Vki)` in the two-parameter mode (velocity P
//! gain fixed, no acceleration feedforward) or `(Kp, Vkp, Vki, Aff)` in the
//! four-parameter mode.  The cost is the settle-phase tracking feature, the
//! constraint is the in-band velocity-error spectrum peak, and input-dependent
//! cost noise keyed on `Vki` makes the problem heteroscedastic.

use std::sync::Arc;

use nalgebra::DVector;
use rand::RngCore;

use crate::error::Result;
use crate::optimizer::{ProblemDefinition, ProblemOracle};
use crate::risk::SampleBatch;

use super::features::{
    cost_with_filter, stability_metric, DeltaConfig, XiFilter, STABILITY_BAND_HZ,
};
use super::plant::{simulate_axis, ControllerGains, MotionSignals, PlantModel};
use super::reference::{scurve_reference, ReferenceTrajectory};

/// Which gains are optimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisMode {
    /// Optimize `(Kp, Vki)`; `Vkp` fixed, no acceleration feedforward.
    Numeric2d,
    /// Optimize `(Kp, Vkp, Vki, Aff)`.
    Full4d,
}

/// Default move: 10 mm in 100 ms followed by a 300 ms settle phase.
pub const MOVE_DISTANCE_M: f64 = 0.010;
pub const MOVE_TIME_S: f64 = 0.100;
pub const SETTLE_TIME_S: f64 = 0.300;

/// Velocity P gain held fixed in the two-parameter mode.
pub const FIXED_VKP: f64 = 600.0;

/// Threshold calibration factor over the worst seed-gain stability metric.
pub const THRESHOLD_FACTOR: f64 = 3.0;

/// The axis benchmark oracle.
pub struct AxisBenchmark {
    pub plant: PlantModel,
    pub reference: ReferenceTrajectory,
    pub mode: AxisMode,
    pub delta: DeltaConfig,
    pub xi: XiFilter,
    pub band: (f64, f64),
    pub vff: f64,
}

impl AxisBenchmark {
    pub fn new(mode: AxisMode) -> Result<Self> {
        let plant = PlantModel::default();
        let reference = scurve_reference(
            MOVE_DISTANCE_M,
            MOVE_TIME_S,
            SETTLE_TIME_S,
            plant.sample_rate,
        )?;
        Ok(Self {
            plant,
            reference,
            mode,
            delta: DeltaConfig { enabled: true },
            xi: XiFilter::default(),
            band: STABILITY_BAND_HZ,
            vff: 1.0,
        })
    }

    pub fn gains_from(&self, x: &DVector<f64>) -> ControllerGains {
        match self.mode {
            AxisMode::Numeric2d => ControllerGains {
                kp: x[0],
                vkp: FIXED_VKP,
                vki: x[1],
                vff: self.vff,
                aff: 0.0,
            },
            AxisMode::Full4d => ControllerGains {
                kp: x[0],
                vkp: x[1],
                vki: x[2],
                vff: self.vff,
                aff: x[3],
            },
        }
    }

    fn simulate(&self, gains: &ControllerGains, sim_seed: u64) -> Result<MotionSignals> {
        simulate_axis(&self.plant, gains, &self.reference, sim_seed)
    }

    /// Deterministic noise-free features at a gain combination.
    pub fn noise_free_features(&self, x: &DVector<f64>) -> Result<(f64, f64)> {
        let mut quiet = self.plant.clone();
        quiet.pos_noise_std = 0.0;
        quiet.vel_noise_std = 0.0;
        let gains = self.gains_from(x);
        let sig = simulate_axis(&quiet, &gains, &self.reference, 0)?;
        let mut no_rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        use rand::SeedableRng;
        let cost = cost_with_filter(
            &sig,
            &self.xi,
            &gains,
            DeltaConfig { enabled: false },
            &mut no_rng,
        )?;
        let metric = stability_metric(&sig, self.band, &self.xi)?;
        Ok((cost, metric))
    }
}

impl ProblemOracle for AxisBenchmark {
    fn evaluate_batch(
        &self,
        x: &DVector<f64>,
        k: usize,
        rng: &mut dyn RngCore,
    ) -> Result<SampleBatch> {
        let gains = self.gains_from(x);
        let mut values = Vec::with_capacity(k);
        let mut constraint = f64::NAN;
        for i in 0..k {
            let sim_seed = rng.next_u64();
            let sig = self.simulate(&gains, sim_seed)?;
            values.push(cost_with_filter(&sig, &self.xi, &gains, self.delta, rng)?);
            if i == 0 {
                // The constraint observation comes from the first
                // repetition's signals.
                constraint = stability_metric(&sig, self.band, &self.xi)?;
            }
        }
        Ok(SampleBatch {
            x: x.clone(),
            values,
            constraint,
        })
    }

    fn true_objective(&self, x: &DVector<f64>) -> Option<f64> {
        self.noise_free_features(x).ok().map(|(cost, _)| cost)
    }

    fn true_constraint(&self, x: &DVector<f64>) -> Option<f64> {
        self.noise_free_features(x).ok().map(|(_, metric)| metric)
    }
}

/// Gain-space bounds per mode.
pub fn axis_bounds(mode: AxisMode) -> Vec<(f64, f64)> {
    match mode {
        AxisMode::Numeric2d => vec![(50.0, 500.0), (200.0, 2200.0)],
        AxisMode::Full4d => vec![
            (50.0, 500.0),
            (150.0, 1200.0),
            (200.0, 2200.0),
            (0.0, 1.6),
        ],
    }
}

/// Safe seed gains per mode.
pub fn axis_seeds(mode: AxisMode) -> Vec<DVector<f64>> {
    match mode {
        AxisMode::Numeric2d => vec![
            DVector::from_vec(vec![200.0, 1000.0]),
            DVector::from_vec(vec![300.0, 1000.0]),
            DVector::from_vec(vec![200.0, 1500.0]),
        ],
        AxisMode::Full4d => vec![DVector::from_vec(vec![200.0, 600.0, 1000.0, 0.0])],
    }
}

/// Assemble the axis problem; the threshold is calibrated as
/// [`THRESHOLD_FACTOR`] times the worst noise-free seed-gain stability
/// metric.
pub fn axis_problem(mode: AxisMode) -> Result<ProblemDefinition> {
    let benchmark = AxisBenchmark::new(mode)?;
    let seeds = axis_seeds(mode);
    let mut worst = 0.0f64;
    for seed in &seeds {
        let (_, metric) = benchmark.noise_free_features(seed)?;
        worst = worst.max(metric);
    }
    let threshold = THRESHOLD_FACTOR * worst;
    Ok(ProblemDefinition {
        name: match mode {
            AxisMode::Numeric2d => "axis-2d".into(),
            AxisMode::Full4d => "axis-4d".into(),
        },
        bounds: axis_bounds(mode),
        seeds,
        threshold,
        constraint_noise_std: 0.1,
        oracle: Arc::new(benchmark),
    })
}

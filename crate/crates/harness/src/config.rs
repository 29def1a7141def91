//! Experiment configuration: TOML-serializable, with per-problem presets.
//!
//! Presets carry the GP hyperparameters used by the benchmark experiments
//! ("numeric" for the simulated axis, "real"-style lengthscales for the
//! four-gain mode) and the tuned-per-iteration setup for the synthetic
//! problem.

use serde::{Deserialize, Serialize};

use ragoose::acquisition::PsoConfig;
use ragoose::benchmarks::axis::{axis_problem, AxisMode};
use ragoose::benchmarks::synthetic::synthetic_problem;
use ragoose::error::{Error, Result};
use ragoose::gp::{KernelConfig, TuneBounds};
use ragoose::optimizer::{GpSettings, ProblemDefinition, RunSettings, TunePolicy};
use ragoose::risk::RiskConfig;
use ragoose::safety::DEFAULT_CELL_BUDGET;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProblemId {
    #[serde(rename = "synthetic")]
    Synthetic,
    #[serde(rename = "axis-2d")]
    Axis2d,
    #[serde(rename = "axis-4d")]
    Axis4d,
}

impl ProblemId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "synthetic" => Ok(Self::Synthetic),
            "axis-2d" => Ok(Self::Axis2d),
            "axis-4d" => Ok(Self::Axis4d),
            other => Err(Error::invalid(format!(
                "unknown problem {other:?} (expected synthetic, axis-2d or axis-4d)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Synthetic => "synthetic",
            Self::Axis2d => "axis-2d",
            Self::Axis4d => "axis-4d",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgorithmId {
    #[serde(rename = "ragoose")]
    Ragoose,
    #[serde(rename = "goose")]
    Goose,
    #[serde(rename = "cbo")]
    Cbo,
}

impl AlgorithmId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ragoose" => Ok(Self::Ragoose),
            "goose" => Ok(Self::Goose),
            "cbo" => Ok(Self::Cbo),
            other => Err(Error::invalid(format!(
                "unknown algorithm {other:?} (expected ragoose, goose or cbo)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ragoose => "ragoose",
            Self::Goose => "goose",
            Self::Cbo => "cbo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub signal_std: f64,
    pub lengthscales: Vec<f64>,
    pub prior_mean: f64,
    pub prior_scale: f64,
}

impl KernelSpec {
    pub fn to_kernel(&self) -> KernelConfig {
        KernelConfig::new(
            self.signal_std,
            self.lengthscales.clone(),
            self.prior_mean,
            self.prior_scale,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpConfig {
    pub f: KernelSpec,
    pub q: KernelSpec,
    pub var: KernelSpec,
    /// Homoscedastic constraint observation noise variance σ_q².
    pub q_noise_var: f64,
    /// Homoscedastic variance-observation noise variance σ_var².
    pub var_noise_var: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsSpec {
    pub signal_std: (f64, f64),
    pub lengthscales: Vec<(f64, f64)>,
}

impl BoundsSpec {
    fn to_bounds(&self) -> TuneBounds {
        TuneBounds {
            signal_std: self.signal_std,
            lengthscales: self.lengthscales.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneConfig {
    pub every: usize,
    pub f_bounds: BoundsSpec,
    pub q_bounds: BoundsSpec,
    pub var_bounds: BoundsSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoSettings {
    pub particles: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub velocity_clamp: f64,
}

impl Default for PsoSettings {
    fn default() -> Self {
        let d = PsoConfig::default();
        Self {
            particles: d.particles,
            iterations: d.iterations,
            inertia: d.inertia,
            cognitive: d.cognitive,
            social: d.social,
            velocity_clamp: d.velocity_clamp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskSettings {
    pub beta_f: f64,
    pub beta_var: f64,
    pub beta_q: f64,
    pub var_floor: f64,
}

impl Default for RiskSettings {
    fn default() -> Self {
        Self {
            beta_f: 3.0,
            beta_var: 3.0,
            beta_q: 3.0,
            var_floor: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemId,
    pub algorithm: AlgorithmId,
    pub alpha: f64,
    pub iterations: usize,
    pub k: usize,
    pub repetitions: usize,
    pub base_seed: u64,
    pub output_dir: String,
    /// Worker pool size; 0 means the number of available cores.
    pub workers: usize,
    /// Mean-variance weight used in regret reporting.
    pub regret_weight: f64,
    pub pso: PsoSettings,
    pub risk: RiskSettings,
    pub gp: GpConfig,
    pub tune: Option<TuneConfig>,
    pub cell_budget: usize,
}

fn kernel(signal_std: f64, lengthscales: &[f64], prior_mean: f64, prior_scale: f64) -> KernelSpec {
    KernelSpec {
        signal_std,
        lengthscales: lengthscales.to_vec(),
        prior_mean,
        prior_scale,
    }
}

impl ExperimentConfig {
    /// Per-problem defaults; `alpha` and run-shape fields are set by the
    /// caller afterwards.
    pub fn preset(problem: ProblemId, algorithm: AlgorithmId) -> Self {
        let (gp, tune) = match problem {
            ProblemId::Synthetic => {
                let gp = GpConfig {
                    f: kernel(1.0, &[1.0], 0.0, 0.0),
                    q: kernel(2.0, &[1.0], 3.0, 0.0),
                    var: kernel(0.05, &[1.0], 0.1, 0.0),
                    q_noise_var: 0.01,
                    var_noise_var: 2.5e-3,
                };
                let span = |lo: f64, hi: f64| (lo, hi);
                let tune = TuneConfig {
                    every: 1,
                    f_bounds: BoundsSpec {
                        signal_std: span(0.05, 5.0),
                        lengthscales: vec![span(0.3, 5.0)],
                    },
                    q_bounds: BoundsSpec {
                        signal_std: span(0.1, 6.0),
                        lengthscales: vec![span(0.3, 5.0)],
                    },
                    var_bounds: BoundsSpec {
                        signal_std: span(0.005, 2.0),
                        lengthscales: vec![span(0.3, 5.0)],
                    },
                };
                (gp, Some(tune))
            }
            ProblemId::Axis2d => {
                let ls = [50.0, 200.0];
                let gp = GpConfig {
                    f: kernel(2.0, &ls, 6.0, 0.0),
                    q: kernel(4.0, &ls, 6.0, 0.0),
                    var: kernel(0.1, &ls, 0.3, 0.0),
                    q_noise_var: 1e-2,
                    var_noise_var: 1e-10,
                };
                (gp, None)
            }
            ProblemId::Axis4d => {
                let ls = [50.0, 100.0, 200.0, 0.5];
                let gp = GpConfig {
                    f: kernel(2.0, &ls, 6.0, 0.0),
                    q: kernel(4.0, &ls, 6.0, 0.0),
                    var: kernel(0.1, &ls, 0.3, 0.0),
                    q_noise_var: 1e-2,
                    var_noise_var: 1e-10,
                };
                (gp, None)
            }
        };
        Self {
            problem,
            algorithm,
            alpha: 0.0,
            iterations: 200,
            k: 10,
            repetitions: 30,
            base_seed: 42,
            output_dir: "out".into(),
            workers: 0,
            regret_weight: 50.0,
            pso: PsoSettings::default(),
            risk: RiskSettings::default(),
            gp,
            tune,
            cell_budget: DEFAULT_CELL_BUDGET,
        }
    }

    pub fn label(&self) -> String {
        match self.algorithm {
            AlgorithmId::Ragoose => format!("ragoose(alpha={})", self.alpha),
            AlgorithmId::Goose => "goose".into(),
            AlgorithmId::Cbo => "cbo".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 1 {
            return Err(Error::invalid("at least one repetition required"));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("at least one iteration required"));
        }
        if self.k < 2 {
            return Err(Error::invalid("k must be >= 2"));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::invalid("alpha must be >= 0"));
        }
        self.build_problem()?;
        self.run_settings(0)?.validate(&self.build_problem()?)?;
        Ok(())
    }

    pub fn build_problem(&self) -> Result<ProblemDefinition> {
        match self.problem {
            ProblemId::Synthetic => Ok(synthetic_problem()),
            ProblemId::Axis2d => axis_problem(AxisMode::Numeric2d),
            ProblemId::Axis4d => axis_problem(AxisMode::Full4d),
        }
    }

    /// Core-loop settings for one repetition.
    pub fn run_settings(&self, rep: usize) -> Result<RunSettings> {
        Ok(RunSettings {
            risk: RiskConfig {
                alpha: self.alpha,
                k: self.k,
                beta_f: self.risk.beta_f,
                beta_var: self.risk.beta_var,
                beta_q: self.risk.beta_q,
                var_floor: self.risk.var_floor,
            },
            pso: PsoConfig {
                particles: self.pso.particles,
                iterations: self.pso.iterations,
                inertia: self.pso.inertia,
                cognitive: self.pso.cognitive,
                social: self.pso.social,
                velocity_clamp: self.pso.velocity_clamp,
                seed: 0,
            },
            gp: GpSettings {
                f_kernel: self.gp.f.to_kernel(),
                q_kernel: self.gp.q.to_kernel(),
                var_kernel: self.gp.var.to_kernel(),
                q_noise_var: self.gp.q_noise_var,
                var_noise_var: self.gp.var_noise_var,
            },
            tune: self.tune.as_ref().map(|t| TunePolicy {
                every: t.every,
                f_bounds: t.f_bounds.to_bounds(),
                q_bounds: t.q_bounds.to_bounds(),
                var_bounds: t.var_bounds.to_bounds(),
            }),
            iterations: self.iterations,
            seed: self.base_seed + rep as u64,
            cell_budget: self.cell_budget,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::invalid(format!("config encode: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("config parse: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for problem in [ProblemId::Synthetic, ProblemId::Axis2d] {
            for algo in [AlgorithmId::Ragoose, AlgorithmId::Goose, AlgorithmId::Cbo] {
                let mut cfg = ExperimentConfig::preset(problem, algo);
                cfg.alpha = 10.0;
                cfg.repetitions = 1;
                cfg.iterations = 1;
                cfg.validate().unwrap();
            }
        }
    }

    #[test]
    fn toml_round_trip_is_identical() {
        let mut cfg = ExperimentConfig::preset(ProblemId::Synthetic, AlgorithmId::Ragoose);
        cfg.alpha = 30.0;
        cfg.repetitions = 3;
        let text = cfg.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn axis_preset_carries_experiment_lengthscales() {
        let cfg = ExperimentConfig::preset(ProblemId::Axis2d, AlgorithmId::Ragoose);
        assert_eq!(cfg.gp.f.lengthscales, vec![50.0, 200.0]);
        assert_eq!(cfg.gp.f.signal_std, 2.0);
        assert_eq!(cfg.gp.f.prior_mean, 6.0);
        assert_eq!(cfg.gp.q.signal_std, 4.0);
        assert_eq!(cfg.gp.q.prior_mean, 6.0);
        assert_eq!(cfg.gp.var.prior_mean, 0.3);
        let cfg4 = ExperimentConfig::preset(ProblemId::Axis4d, AlgorithmId::Ragoose);
        assert_eq!(cfg4.gp.f.lengthscales, vec![50.0, 100.0, 200.0, 0.5]);
    }

    #[test]
    fn rejects_unknown_ids() {
        assert!(ProblemId::parse("bogus").is_err());
        assert!(AlgorithmId::parse("bogus").is_err());
    }
}

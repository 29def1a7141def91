//! Evaluation problems: the synthetic suite and the simulated
//! precision-motion axis.

pub mod axis;
pub mod features;
pub mod plant;
pub mod reference;
pub mod synthetic;

pub use axis::{axis_problem, AxisBenchmark, AxisMode};
pub use features::{
    inject_delta, stability_metric, tracking_cost, DeltaConfig, XiFilter, STABILITY_BAND_HZ,
};
pub use plant::{simulate_axis, ControllerGains, MotionSignals, PlantModel};
pub use reference::{scurve_reference, ReferenceTrajectory};
pub use synthetic::{synthetic_eval, synthetic_problem, SyntheticProblem};

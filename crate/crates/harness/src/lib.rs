//! Experiment harness: configuration presets, repetition management with
//! seeding, trace persistence, summary statistics and plot-data export.

pub mod config;
pub mod plotdata;
pub mod runner;

pub use config::{AlgorithmId, ExperimentConfig, ProblemId};
pub use plotdata::{export_plot_data, PlotKind};
pub use runner::{compare, load_summary, run_experiment, SummaryReport};

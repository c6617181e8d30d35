//! Experiment runner for the `ehs` schedulers: seeded parameter sweeps,
//! Monte-Carlo averages written as CSV, and SVG line charts.

pub mod config;
pub mod plot;
pub mod runner;
pub mod stats;

pub use config::{Algorithm, Axis, ExperimentConfig};
pub use runner::{run_experiment, to_csv, ResultRow};

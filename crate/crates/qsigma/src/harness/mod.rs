//! Experiment harness: declarative configs, seeded parallel batch execution,
//! aggregate statistics, and CSV emission.

mod config;
mod csv;
mod runner;
mod stats;

pub use config::{ExperimentConfig, Measurement, SigmaSpec};
pub use csv::{episode_csv, sweep_csv, write_episode_csv, write_sweep_csv};
pub use runner::{action_values_for, run_experiment, sweep_alpha, AlphaPoint};
pub use stats::RunStatistics;

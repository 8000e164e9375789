//! Experiment orchestration: configs, seeded parallel runs, artifacts.

mod config;
mod output;
mod run;

use std::path::{Path, PathBuf};

pub use config::{
    parse_config, validate_config, AlgorithmKind, AlgorithmSpec, EnvironmentSpec, ExperimentConfig, RegretMode,
};
pub use output::{error_json, experiment_dir, summary_json, write_artifacts, SCHEMA_VERSION};
pub use run::{
    run_bandit, run_convex, run_in_memory, BanditTrace, ConvexTrace, ExperimentResults, RegretReport, RunOutput,
    Trace,
};

use crate::error::Result;

/// Output root when neither the command line nor the config names one.
pub const DEFAULT_OUTPUT_DIR: &str = "results";

/// Runs the experiment and writes its artifacts under `root`; returns the
/// experiment directory and the results.
pub fn run_experiment(config: &ExperimentConfig, root: &Path, workers: usize) -> Result<(PathBuf, ExperimentResults)> {
    let results = run_in_memory(config, workers)?;
    let dir = write_artifacts(&results, root)?;
    Ok((dir, results))
}

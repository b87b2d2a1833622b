//! Config-driven verification scenarios for the congestion-window chain and
//! its scaling limits, with deterministic parallel replication and CSV/JSON
//! reporting. See [`config::ExperimentConfig`] for the input format and
//! [`scenarios::run_scenario`] for the entry point.

pub mod config;
pub mod report;
pub mod scenarios;

use std::path::PathBuf;
use thiserror::Error;

pub use config::{ConfigError, ExperimentConfig, ParamsConfig, PGrid, Scenario, Thresholds, W0Policy};
pub use report::{Check, Metric, ScenarioOutput, ScenarioReport, Timings};
pub use scenarios::run_scenario;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Params(#[from] paradigm_core::ParamError),
    #[error(transparent)]
    Chain(#[from] paradigm_core::ChainError),
    #[error(transparent)]
    Limit(#[from] paradigm_core::LimitError),
    #[error(transparent)]
    Stats(#[from] paradigm_core::StatsError),
    #[error("failed to write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

//! Experiment orchestration: episodes, training runs, the preset grid, CSV output.

mod config;
mod episode;
mod setting;
mod suite;
mod training;

use thiserror::Error;

use crate::domain::DomainError;
use crate::error_model::ConfigError;

pub use config::LabConfig;
pub use episode::{run_episode, trace_line, Controller, Episode, EpisodeRngs, Lab};
pub use setting::{preset, preset_names, AgentKind, ExperimentSetting, PRESETS};
pub use suite::{
    curve_rows, evaluate_rule_baseline, mean_curves, read_curve_csv, run_suite, write_curve_csv, CurveRow, MeanRow, SuiteOutput,
    SuiteRun,
};
pub use training::{final_success, run_training, EpochMetrics, LearningCurve, RunResult, FINAL_WINDOW};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("unknown setting {0}")]
    UnknownSetting(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    ErrorModel(#[from] ConfigError),
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Csv(e.to_string())
    }
}

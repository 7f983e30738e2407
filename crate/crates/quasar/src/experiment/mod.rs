//! Paired-method experiment orchestration.
//!
//! A run takes one [`ExperimentConfig`], sweeps the configured sampling
//! rates for every method, and writes a self-contained run directory:
//! config snapshot, results CSV, raw complex dumps, preview images, and
//! a plain-text report. Identical config and seed reproduce identical
//! bytes.

mod config;
mod runner;
mod validate;

pub use config::{
    AperturePattern, ApertureSpec, DebiasSetting, EtaSetting, ExperimentConfig, GainTaper,
    MethodName, NoiseSpec, RadarNominal, RotationSetting, Scatterer, SceneSpec, SolverSpec,
};
pub use runner::{global_rmse, rate_tag, run_experiment, ResultRow, RunSummary};
pub use validate::{has_errors, validate_config, Diagnostic, Severity};

/// Anything that can stop an experiment before or during the sweep.
#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    /// Unreadable, unparsable, or invalid configuration.
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Artifact(#[from] crate::io::IoError),
    #[error(transparent)]
    Pipeline(#[from] crate::pipeline::PipelineError),
    #[error(transparent)]
    Radar(#[from] crate::radar::RadarError),
}

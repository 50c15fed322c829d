use std::io;
use std::path::PathBuf;

use fcfs_match_core::{AnalyticError, SimError, ValidationErrors};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write output: {0}")]
    Write(#[from] io::Error),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: malformed model file: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Invalid(ValidationErrors),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{failed} of {checked} quantities have |z| > {z_max}")]
    VerifyFailed {
        failed: usize,
        checked: usize,
        z_max: f64,
    },
}

impl CliError {
    /// 0 ok, 2 invalid input, 3 unstable, 4 size cap, 5 verification
    /// failure; anything else is 1.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. }
            | CliError::Parse { .. }
            | CliError::Invalid(_)
            | CliError::Config(_)
            | CliError::Sim(_) => 2,
            CliError::Analytic(e) => match e {
                AnalyticError::UnstableModel { .. } | AnalyticError::UnstableGridPoint { .. } => 3,
                AnalyticError::TooManyTypes { .. } => 4,
                AnalyticError::InvalidGrid(_) | AnalyticError::Model(_) => 2,
                AnalyticError::ZeroRate { .. } | AnalyticError::DomainError { .. } => 1,
            },
            CliError::VerifyFailed { .. } => 5,
            CliError::Write(_) | CliError::Csv(_) => 1,
        }
    }
}

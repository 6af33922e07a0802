//! Experiment configs and the `simulate`, `verify`, `curves` and `exponent`
//! commands. `main.rs` is a thin clap wrapper around [`run`].

pub mod commands;
pub mod config;

use std::path::PathBuf;

use thiserror::Error;

pub use commands::{run, Command, Options};
pub use config::{CurveRequest, ExperimentConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl From<bandit_bounds::Error> for CliError {
    fn from(e: bandit_bounds::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

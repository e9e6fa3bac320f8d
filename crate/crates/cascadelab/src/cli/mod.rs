//! Experiment orchestration: declarative configs in, CSV (and optional
//! SVG) artifacts out.

pub mod commands;
pub mod config;
pub mod csvout;
pub mod svg;

pub use commands::{cmd_cascade, cmd_generate, cmd_simulate, cmd_theory, CommandContext};
pub use config::ExperimentConfig;

use thiserror::Error;

/// Failures grouped by exit code: config errors exit 2, numerical
/// non-convergence exits 3, I/O failures exit 4.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

//! Experiment runner for the hyperbolic `C_n` Sutherland laboratory.
//!
//! Every subcommand reads a JSON config, writes CSV/JSON artifacts into an
//! output directory and reports whether its residuals are within bounds.

pub mod commands;
pub mod config;

use std::path::Path;

use thiserror::Error;

pub use config::{RunConfig, Validated};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] sutherland_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), source }
    }
}

//! Batch front end for the grid-puzzle benchmark toolkit: file formats
//! (PNG, JSONL, manifests), the dataset pipeline behind each CLI
//! subcommand, and the optional HTTP elaboration client.
//!
//! All algorithmic substance lives in [`cotforge_core`]; this crate only
//! adds IO, orchestration, and parallelism.

pub use cotforge_core as core;

pub mod config;
pub mod jsonl;
pub mod pipeline;
pub mod png;
pub mod remote;

use std::process::ExitCode;

/// Pipeline failures mapped onto the documented exit codes.
#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    /// Exit code 2: bad flags, config files, or designs.
    #[error("config error: {0}")]
    Config(String),
    /// Exit code 3: missing or malformed data files.
    #[error("data error: {0}")]
    Data(String),
    /// Exit code 4: remote elaboration failed and fallback was disallowed.
    #[error("elaboration unavailable: {0}")]
    Elaboration(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            PipelineError::Config(_) => ExitCode::from(2),
            PipelineError::Data(_) => ExitCode::from(3),
            PipelineError::Elaboration(_) => ExitCode::from(4),
        }
    }

    pub fn config(msg: impl std::fmt::Display) -> Self {
        PipelineError::Config(msg.to_string())
    }

    pub fn data(msg: impl std::fmt::Display) -> Self {
        PipelineError::Data(msg.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PipelineError>;

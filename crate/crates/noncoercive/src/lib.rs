//! Configuration-driven runs of the `noncoercive-core` solver: presets,
//! configuration files, tabulated fields, CSV artifacts and the command-line
//! entry points.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;
pub mod tabulated;

pub use noncoercive_core;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot parse configuration: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("cannot read {0}")]
    Io(String),
    #[error("problem data rejected: {0}")]
    Problem(noncoercive_core::Error),
}

pub use run::RunError;

//! Config-file parsing and the run manifest.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

use crate::error::SimError;
use crate::experiment::ExperimentConfig;

/// Errors surfaced while loading a run configuration. These map to the
/// "config error" exit code in the command-line front end.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Malformed document, wrong field type, or an unknown key (unknown keys
    /// are rejected by name).
    #[error("config file does not match the schema: {0}")]
    Schema(#[from] serde_json::Error),

    #[error(transparent)]
    Invariant(#[from] SimError),
}

/// Parses a JSON experiment config, filling defaults and checking every
/// invariant. Unknown keys are rejected with their names in the message.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig = serde_json::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}

/// Everything needed to replicate a finished run: the fully resolved config,
/// the binary version, and wall-clock bracketing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_echo: ExperimentConfig,
    pub tool_version: String,
    pub started_at: String,
    pub finished_at: String,
    pub master_seed: u64,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialization cannot fail")
    }
}

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::SolverConfig;

/// Settings read from a TOML file; command-line flags override them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    /// Complex literal `a+bi`.
    pub tau: Option<String>,
    /// `u0,u1,v0,v1`.
    pub region: Option<String>,
    pub step: Option<f64>,
    /// Exponent grid for the pressure command.
    pub t: Option<String>,
    pub solver: SolverConfig,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
}

pub fn parse_run_config(text: &str) -> Result<RunConfig> {
    toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
}

pub fn load_run_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_run_config(&text)
}

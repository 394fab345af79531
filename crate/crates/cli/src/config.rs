//! Optional JSON config file supplying defaults for flags. Flags win.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    pub family: Option<String>,
    pub n: Option<u32>,
    pub dim: Option<u32>,
    pub genus: Option<u32>,
    pub chi: Option<i64>,
    pub max_word_length: Option<usize>,
    pub max_length: Option<f64>,
    pub n_max: Option<usize>,
    pub margin: Option<f64>,
    pub entropy: Option<f64>,
    pub presentation: Option<PathBuf>,
    pub spectrum: Option<PathBuf>,
    pub sequential: Option<bool>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config { path: path.into(), reason: e.to_string() })
    }
}

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;
use vts_core::scenario::ConfigError;
use vts_core::ScenarioConfig;

use crate::files::{self, FileError};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: invalid value")]
    Invalid {
        path: PathBuf,
        #[source]
        source: ConfigError,
    },
    #[error(transparent)]
    File(#[from] FileError),
}

/// Parses scenario TOML without touching the filesystem.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string().trim_end().to_string())
}

/// Reads, resolves and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
    let mut config =
        parse_scenario(&text).map_err(|message| LoadError::Parse { path: path.to_path_buf(), message })?;
    let base = path.parent().unwrap_or(Path::new("."));
    resolve_files(&mut config, base)?;
    config.validate().map_err(|source| LoadError::Invalid { path: path.to_path_buf(), source })?;
    Ok(config)
}

/// Inlines the trace file and credibility table named by `config`.
pub fn resolve_files(config: &mut ScenarioConfig, base: &Path) -> Result<(), FileError> {
    if let Some(trace) = config.fleet.trace_file.take() {
        let vehicles = files::read_trace(&base.join(trace))?;
        config.fleet.vehicles.extend(vehicles);
    }
    if let Some(table) = config.credibility.table_file.take() {
        let values = files::read_credibility_table(&base.join(table))?;
        config.credibility.values.extend(values);
    }
    Ok(())
}

//! Mobility trace and credibility table files.
//!
//! A trace is TOML with one `[[vehicle]]` table per vehicle:
//!
//! ```toml
//! [[vehicle]]
//! id = 1
//! credibility = 0.9          # optional
//! waypoints = [[0.0, -50.0, 0.0, 0.0], [10.0, 150.0, 0.0, 0.0]]   # [t, x, y, z]
//! ```
//!
//! A credibility table is CSV with a `vehicle_id,credibility` header.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;
use vts_core::scenario::VehicleSpec;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceFile {
    #[serde(default)]
    vehicle: Vec<VehicleSpec>,
}

pub fn parse_trace(text: &str) -> Result<Vec<VehicleSpec>, String> {
    toml::from_str::<TraceFile>(text).map(|t| t.vehicle).map_err(|e| e.to_string().trim_end().to_string())
}

pub fn read_trace(path: &Path) -> Result<Vec<VehicleSpec>, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io { path: path.into(), source })?;
    parse_trace(&text).map_err(|message| FileError::Format { path: path.into(), message })
}

#[derive(Deserialize)]
struct TableRow {
    vehicle_id: u32,
    credibility: f64,
}

pub fn parse_credibility_table<R: std::io::Read>(reader: R) -> Result<Vec<(u32, f64)>, csv::Error> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader)
        .deserialize::<TableRow>()
        .map(|row| row.map(|r| (r.vehicle_id, r.credibility)))
        .collect()
}

pub fn read_credibility_table(path: &Path) -> Result<Vec<(u32, f64)>, FileError> {
    let file = fs::File::open(path).map_err(|source| FileError::Io { path: path.into(), source })?;
    parse_credibility_table(file).map_err(|e| FileError::Format { path: path.into(), message: e.to_string() })
}

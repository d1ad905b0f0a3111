//! Scenario files, experiment sweeps and event logs for `vts-core`.
//!
//! Scenarios are TOML documents deserialized into [`ScenarioConfig`]. A
//! scenario may point at a mobility trace file and a credibility table; both
//! paths are resolved relative to the scenario file.

pub mod config;
pub mod eventlog;
pub mod experiment;
pub mod files;

pub use config::{load_scenario, parse_scenario, LoadError};
pub use eventlog::{LogFormat, LogRecord};
pub use experiment::{run_experiment, Experiment, RunRow, SummaryRow};
pub use vts_core::ScenarioConfig;

//! Seed sweeps and their aggregation.

use anyhow::{anyhow, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vts_core::scenario::{self, RunOutput};
use vts_core::{ScenarioConfig, Strategy};

use crate::eventlog::{self, LogRecord};

/// Metrics of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub variable: String,
    pub value: Option<f64>,
    pub strategy: Strategy,
    pub seed: u64,
    pub reports_sent: u64,
    pub reports_received: u64,
    pub collisions: u64,
    pub rlr: f64,
    pub ard: Option<f64>,
}

/// Mean and sample standard deviation over the seeds of one sweep point.
/// ARD statistics only cover runs in which some report arrived (`ard_runs`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variable: String,
    pub value: Option<f64>,
    pub strategy: Strategy,
    pub seeds: usize,
    pub mean_rlr: f64,
    pub std_rlr: f64,
    pub mean_ard: Option<f64>,
    pub std_ard: Option<f64>,
    pub ard_runs: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Experiment {
    pub runs: Vec<RunRow>,
    pub summary: Vec<SummaryRow>,
    /// Empty unless the log was requested.
    pub log: Vec<LogRecord>,
}

impl Experiment {
    pub fn summary_for(&self, strategy: Strategy) -> impl Iterator<Item = &SummaryRow> {
        self.summary.iter().filter(move |r| r.strategy == strategy)
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn run_row(variable: &str, value: Option<f64>, out: &RunOutput) -> RunRow {
    RunRow {
        variable: variable.to_string(),
        value,
        strategy: out.strategy,
        seed: out.seed,
        reports_sent: out.metrics.reports_sent,
        reports_received: out.metrics.reports_received,
        collisions: out.metrics.collisions,
        rlr: out.metrics.rlr,
        ard: out.metrics.ard,
    }
}

/// Runs every sweep point, strategy and seed of `config`. Runs execute in
/// parallel; rows come back ordered by point, then strategy, then seed.
pub fn run_experiment(config: &ScenarioConfig, keep_log: bool) -> Result<Experiment> {
    config.validate().map_err(|e| anyhow!("invalid scenario: {e}"))?;
    let variable = config.sweep.as_ref().map_or("", |s| s.variable.as_str());
    let points = config.sweep_points().map_err(|e| anyhow!("invalid scenario: {e}"))?;

    let mut tasks = Vec::new();
    for (p, (value, _)) in points.iter().enumerate() {
        for &strategy in &config.strategies {
            for seed in config.seeds.seeds() {
                tasks.push((p, *value, strategy, seed));
            }
        }
    }

    let results: Vec<(RunRow, Vec<LogRecord>)> = tasks
        .par_iter()
        .map(|&(p, value, strategy, seed)| {
            let out = scenario::run(&points[p].1, strategy, seed)
                .map_err(|e| anyhow!("{strategy} seed {seed}: {e}"))?;
            let log = if keep_log { eventlog::records(&out, variable, value) } else { Vec::new() };
            Ok((run_row(variable, value, &out), log))
        })
        .collect::<Result<_>>()?;

    let mut exp = Experiment::default();
    for (row, log) in results {
        exp.runs.push(row);
        exp.log.extend(log);
    }

    for chunk in exp.runs.chunk_by(|a, b| a.strategy == b.strategy && a.value.map(f64::to_bits) == b.value.map(f64::to_bits)) {
        let rlr: Vec<f64> = chunk.iter().map(|r| r.rlr).collect();
        let ard: Vec<f64> = chunk.iter().filter_map(|r| r.ard).collect();
        let (mean_rlr, std_rlr) = mean_std(&rlr);
        let (mean_ard, std_ard) = if ard.is_empty() {
            (None, None)
        } else {
            let (m, s) = mean_std(&ard);
            (Some(m), Some(s))
        };
        exp.summary.push(SummaryRow {
            variable: variable.to_string(),
            value: chunk[0].value,
            strategy: chunk[0].strategy,
            seeds: chunk.len(),
            mean_rlr,
            std_rlr,
            mean_ard,
            std_ard,
            ard_runs: ard.len(),
        });
    }
    Ok(exp)
}

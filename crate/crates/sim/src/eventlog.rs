//! Event log: one record per frame outcome, as CSV or JSON lines.
//!
//! | column        | meaning                                            |
//! |---------------|----------------------------------------------------|
//! | `variable`    | swept variable, empty without a sweep              |
//! | `value`       | sweep value of the run, empty without a sweep      |
//! | `strategy`    | `vts`, `broadcast_all` or `nearby_report`          |
//! | `seed`        | run seed                                           |
//! | `frame`       | frame id, unique within a run                      |
//! | `kind`        | `report` or `hello`                                |
//! | `src`, `dst`  | `rsu`, `v<id>` or (`dst` only) `broadcast`         |
//! | `receiver`    | node this outcome belongs to                       |
//! | `size`        | bytes                                              |
//! | `enqueue_ns`  | time the frame was handed to the MAC               |
//! | `tx_start_ns` | start of transmission                              |
//! | `time_ns`     | end of transmission, when the outcome is decided   |
//! | `outcome`     | `DELIVERED`, `COLLIDED`, `OUT_OF_RANGE`, `SENDER_UNSENSED` |
//!
//! All times are integer nanoseconds of simulated time, so replaying a log
//! reproduces the run's metrics exactly.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use vts_core::netsim::{FrameId, FrameRecord};
use vts_core::scenario::RunOutput;
use vts_core::{RunMetrics, SimTime, Strategy};

use crate::experiment::RunRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum LogFormat {
    #[default]
    Csv,
    Jsonl,
}

impl LogFormat {
    pub fn extension(self) -> &'static str {
        match self {
            LogFormat::Csv => "csv",
            LogFormat::Jsonl => "jsonl",
        }
    }

    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(LogFormat::Csv),
            "jsonl" | "ndjson" => Some(LogFormat::Jsonl),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub variable: String,
    pub value: Option<f64>,
    pub strategy: Strategy,
    pub seed: u64,
    pub frame: u32,
    pub kind: String,
    pub src: String,
    pub dst: String,
    pub receiver: String,
    pub size: u32,
    pub enqueue_ns: u64,
    pub tx_start_ns: u64,
    pub time_ns: u64,
    pub outcome: String,
}

/// Log records of one run, in frame order then receiver order.
pub fn records(run: &RunOutput, variable: &str, value: Option<f64>) -> Vec<LogRecord> {
    let mut out = Vec::new();
    for f in &run.frames {
        let (Some(start), Some(end)) = (f.tx_start, f.tx_end) else { continue };
        for (receiver, outcome) in &f.outcomes {
            out.push(LogRecord {
                variable: variable.to_string(),
                value,
                strategy: run.strategy,
                seed: run.seed,
                frame: f.id.0,
                kind: f.kind.as_str().to_string(),
                src: f.src.to_string(),
                dst: f.dst.to_string(),
                receiver: receiver.to_string(),
                size: f.size,
                enqueue_ns: f.enqueue_time.as_nanos(),
                tx_start_ns: start.as_nanos(),
                time_ns: end.as_nanos(),
                outcome: outcome.as_str().to_string(),
            });
        }
    }
    out
}

pub fn write_rows<T: Serialize, W: Write>(writer: W, format: LogFormat, rows: &[T]) -> Result<()> {
    match format {
        LogFormat::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        LogFormat::Jsonl => {
            let mut w = BufWriter::new(writer);
            for row in rows {
                serde_json::to_writer(&mut w, row)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn read_rows<T: DeserializeOwned, R: Read>(reader: R, format: LogFormat) -> Result<Vec<T>> {
    match format {
        LogFormat::Csv => csv::Reader::from_reader(reader)
            .deserialize()
            .enumerate()
            .map(|(i, row)| row.with_context(|| format!("record {}", i + 1)))
            .collect(),
        LogFormat::Jsonl => BufReader::new(reader)
            .lines()
            .enumerate()
            .filter(|(_, line)| line.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .map(|(i, line)| {
                let line = line?;
                serde_json::from_str(&line).with_context(|| format!("line {}", i + 1))
            })
            .collect(),
    }
}

pub fn write_file<T: Serialize>(path: &Path, format: LogFormat, rows: &[T]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    write_rows(file, format, rows).with_context(|| format!("writing {}", path.display()))
}

/// Reads a log, taking the format from `format` or else the file extension.
pub fn read_log(path: &Path, format: Option<LogFormat>) -> Result<Vec<LogRecord>> {
    let format = format
        .or_else(|| LogFormat::from_path(path))
        .ok_or_else(|| anyhow!("cannot tell the format of {}; pass --format", path.display()))?;
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_rows(file, format).with_context(|| format!("reading {}", path.display()))
}

/// Rebuilds each run's frames from its records and recomputes its metrics.
/// Runs come back in order of first appearance.
pub fn replay(records: &[LogRecord]) -> Result<Vec<RunRow>> {
    let mut runs: Vec<(&LogRecord, BTreeMap<u32, FrameRecord>)> = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let same = |k: &LogRecord| {
            k.strategy == r.strategy
                && k.seed == r.seed
                && k.variable == r.variable
                && k.value.map(f64::to_bits) == r.value.map(f64::to_bits)
        };
        let idx = match runs.iter().position(|(k, _)| same(k)) {
            Some(idx) => idx,
            None => {
                runs.push((r, BTreeMap::new()));
                runs.len() - 1
            }
        };
        let frames = &mut runs[idx].1;
        let parse = || -> Result<_> {
            Ok((
                r.receiver.parse().map_err(|e| anyhow!("receiver: {e}"))?,
                r.outcome.parse().map_err(|e| anyhow!("outcome: {e}"))?,
            ))
        };
        let outcome = parse().with_context(|| format!("record {}", i + 1))?;
        if let Some(f) = frames.get_mut(&r.frame) {
            f.outcomes.push(outcome);
            continue;
        }
        let frame = FrameRecord {
            id: FrameId(r.frame),
            kind: r.kind.parse().map_err(|e| anyhow!("record {}: kind: {e}", i + 1))?,
            src: r.src.parse().map_err(|e| anyhow!("record {}: src: {e}", i + 1))?,
            dst: r.dst.parse().map_err(|e| anyhow!("record {}: dst: {e}", i + 1))?,
            size: r.size,
            enqueue_time: SimTime(r.enqueue_ns),
            tx_start: Some(SimTime(r.tx_start_ns)),
            tx_end: Some(SimTime(r.time_ns)),
            outcomes: vec![outcome],
        };
        if r.time_ns < r.enqueue_ns {
            bail!("record {}: frame ends before it was enqueued", i + 1);
        }
        frames.insert(r.frame, frame);
    }
    runs.into_iter()
        .map(|(key, frames)| {
            let m = RunMetrics::from_frames(frames.values()).map_err(|e| anyhow!("{e}"))?;
            Ok(RunRow {
                variable: key.variable.clone(),
                value: key.value,
                strategy: key.strategy,
                seed: key.seed,
                reports_sent: m.reports_sent,
                reports_received: m.reports_received,
                collisions: m.collisions,
                rlr: m.rlr,
                ard: m.ard,
            })
        })
        .collect()
}

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use vts_core::geometry::{build_tiling_capped, DEFAULT_ZONE_CAP};
use vts_core::TilingMode;
use vts_sim::eventlog::{self, LogFormat};
use vts_sim::experiment::{run_experiment, Experiment};
use vts_sim::load_scenario;

/// Vehicle transmission scheduling simulator.
#[derive(Parser)]
#[command(name = "vts", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a tiling and print its statistics.
    Tile {
        /// Coverage radius in metres.
        #[arg(long = "r", default_value_t = 1000.0)]
        radius: f64,
        /// Accurate detection distance in metres.
        #[arg(long = "d", default_value_t = 100.0)]
        detection: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Disc)]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_ZONE_CAP)]
        cap: usize,
    },
    /// Run a scenario at its base point (any sweep is ignored).
    Run(RunArgs),
    /// Run every point of a scenario's sweep.
    Sweep(RunArgs),
    /// Recompute per-run metrics from an event log.
    Replay {
        eventlog: PathBuf,
        /// Log format; guessed from the extension when omitted.
        #[arg(long, value_enum)]
        format: Option<LogFormat>,
    },
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Base seed, overriding the scenario's.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of seeds, overriding the scenario's.
    #[arg(long)]
    seeds: Option<u32>,
    /// Write summary, per-run metrics and the event log here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = LogFormat::Csv)]
    format: LogFormat,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Line,
    Disc,
    Ball,
}

impl From<ModeArg> for TilingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Line => TilingMode::Line,
            ModeArg::Disc => TilingMode::Disc,
            ModeArg::Ball => TilingMode::Ball,
        }
    }
}

fn tile(radius: f64, detection: f64, mode: TilingMode, cap: usize) -> Result<()> {
    let tiling = build_tiling_capped(radius, detection, mode, cap)?;
    let mut out = io::stdout().lock();
    writeln!(out, "mode: {mode}")?;
    writeln!(out, "radius: {radius}")?;
    writeln!(out, "detection_distance: {detection}")?;
    writeln!(out, "side: {}", tiling.side())?;
    writeln!(out, "zones: {}", tiling.len())?;
    Ok(())
}

fn simulate(args: &RunArgs, sweep: bool) -> Result<()> {
    let mut config = load_scenario(&args.config)?;
    if let Some(seed) = args.seed {
        config.seeds.base = seed;
    }
    if let Some(n) = args.seeds {
        config.seeds.count = n;
    }
    if !sweep {
        config.sweep = None;
    }
    let exp = run_experiment(&config, args.out_dir.is_some())?;

    eventlog::write_rows(io::stdout().lock(), args.format, &exp.summary)?;
    if let Some(dir) = &args.out_dir {
        write_outputs(dir, args.format, &exp)?;
    }
    Ok(())
}

fn write_outputs(dir: &Path, format: LogFormat, exp: &Experiment) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let ext = format.extension();
    eventlog::write_file(&dir.join(format!("summary.{ext}")), format, &exp.summary)?;
    eventlog::write_file(&dir.join(format!("runs.{ext}")), format, &exp.runs)?;
    eventlog::write_file(&dir.join(format!("events.{ext}")), format, &exp.log)?;
    Ok(())
}

fn replay(path: &Path, format: Option<LogFormat>) -> Result<()> {
    let records = eventlog::read_log(path, format)?;
    let runs = eventlog::replay(&records)?;
    eventlog::write_rows(io::stdout().lock(), LogFormat::Csv, &runs)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Tile { radius, detection, mode, cap } => tile(*radius, *detection, (*mode).into(), *cap),
        Command::Run(args) => simulate(args, false),
        Command::Sweep(args) => simulate(args, true),
        Command::Replay { eventlog, format } => replay(eventlog, *format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

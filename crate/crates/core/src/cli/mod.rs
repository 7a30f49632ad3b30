//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error (bad arguments, unknown scenario or
//! sweep parameter, invalid config), 2 data error (unreadable or malformed
//! log, bad snapshot, I/O failure).

pub mod config;
pub mod log;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::embedding::RawContext;
use crate::engine::{Engine, EngineConfig};
use crate::error::Error;
use crate::evaluation::{replay_with, sweep, ReplayOptions, SweepParam};
use crate::nodestore;
use crate::seqmetric::{IntentRegistry, IntentSequence};
use crate::synthgen::{generate, Scenario};

use self::config::FlatConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "intentspace", version, about = "Replay, predict and generate intent event logs")]
pub struct Cli {
    /// Flat TOML config; unset keys keep their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for synthetic generation.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads for per-user replay (0 = all cores).
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Output directory (replay) or file (sweep, generate).
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prequential replay of an event log.
    Replay {
        log: PathBuf,
        /// Also write one snapshot per user into this directory.
        #[arg(long)]
        snapshot_dir: Option<PathBuf>,
    },
    /// Rank intents for one context against a snapshot.
    Predict {
        snapshot: PathBuf,
        /// Local time, YYYY-MM-DDTHH:MM[:SS].
        #[arg(long)]
        at: String,
        #[arg(long, allow_negative_numbers = true)]
        lat: f64,
        #[arg(long, allow_negative_numbers = true)]
        lon: f64,
        /// Preceding intents, most recent first.
        #[arg(long, num_args = 0.., value_delimiter = ',')]
        recent: Vec<String>,
    },
    /// Write a synthetic event log for a canned scenario.
    Generate {
        /// steady, gradual_drift, sudden_shift, branching_sequence or one_off_noise.
        scenario: String,
        /// Number of users; user i is seeded with seed + i.
        #[arg(long, default_value_t = 1)]
        users: u64,
        /// Override the scenario length in days.
        #[arg(long)]
        days: Option<u32>,
    },
    /// Replay once per parameter value.
    Sweep {
        log: PathBuf,
        /// decay_k or cutoff_c.
        #[arg(long)]
        param: String,
        /// Comma list (0.4,0.6) or inclusive range start:end:step.
        #[arg(long)]
        values: String,
    },
    /// Describe a snapshot file.
    SnapshotInfo { snapshot: PathBuf },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::UnknownScenario(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

fn engine_config(cli: &Cli) -> CliResult<EngineConfig> {
    let flat = match &cli.config {
        Some(path) => FlatConfig::load(path).map_err(|e| match e {
            Error::Io(io) => CliError::Usage(format!("{}: {io}", path.display())),
            other => CliError::Usage(format!("{}: {other}", path.display())),
        })?,
        None => FlatConfig::default(),
    };
    Ok(flat.apply(EngineConfig::default())?)
}

fn options(cli: &Cli) -> ReplayOptions {
    ReplayOptions { jobs: cli.jobs }
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match &cli.command {
        Command::Replay { log, snapshot_dir } => cmd_replay(cli, log, snapshot_dir.as_deref(), out, err),
        Command::Predict { snapshot, at, lat, lon, recent } => {
            cmd_predict(cli, snapshot, at, *lat, *lon, recent, out)
        }
        Command::Generate { scenario, users, days } => cmd_generate(cli, scenario, *users, *days, out),
        Command::Sweep { log, param, values } => cmd_sweep(cli, log, param, values, out, err),
        Command::SnapshotInfo { snapshot } => cmd_snapshot_info(snapshot, out),
    }
}

fn load_log(path: &Path, err: &mut dyn Write) -> CliResult<Vec<crate::event::ContextEvent>> {
    let (events, warnings) = log::read_log(path)?;
    for w in warnings {
        writeln!(err, "warning: {w}")?;
    }
    Ok(events)
}

/// Replaces characters that are unsafe in file names.
fn file_stem(user: &str) -> String {
    user.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn cmd_replay(
    cli: &Cli,
    log_path: &Path,
    snapshot_dir: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let config = engine_config(cli)?;
    let events = load_log(log_path, err)?;
    let report = replay_with(&events, &config, options(cli))?;
    match &cli.report {
        Some(dir) => report::write_report_dir(dir, &report)?,
        None => {
            report::write_per_day(&mut *out, &report)?;
            out.write_all(report::summary_json(&report).as_bytes())?;
            out.write_all(report::timing_json(&report).as_bytes())?;
        }
    }
    if let Some(dir) = snapshot_dir {
        std::fs::create_dir_all(dir)?;
        for u in &report.users {
            let path = dir.join(format!("{}.wime", file_stem(&u.user_id)));
            std::fs::write(path, u.engine.snapshot())?;
        }
    }
    Ok(())
}

fn cmd_predict(
    cli: &Cli,
    snapshot: &Path,
    at: &str,
    lat: f64,
    lon: f64,
    recent: &[String],
    out: &mut dyn Write,
) -> CliResult {
    let config = engine_config(cli)?;
    let timestamp = log::parse_timestamp(at)
        .ok_or_else(|| CliError::Usage(format!("bad timestamp {at:?}")))?;
    let raw = RawContext::new(timestamp, lat, lon).map_err(|e| CliError::Usage(e.to_string()))?;
    let bytes = std::fs::read(snapshot)?;
    let engine = Engine::from_snapshot(&bytes, config.predictor, config.window_minutes)?;

    // Labels the snapshot has never seen get fresh ids so they match nothing.
    let mut registry: IntentRegistry = engine.registry().clone();
    let items = recent.iter().filter(|l| !l.is_empty()).map(|l| registry.intern(l)).collect();
    let recent = IntentSequence::new(items, config.window_minutes);

    let result = engine.predict_with(&raw, &recent)?;
    if result.ranked.is_empty() {
        writeln!(out, "no prediction")?;
        return Ok(());
    }
    writeln!(out, "rank\tintent\tspatial_score\tseq_similarity\tdistance\tweight")?;
    for (i, r) in result.ranked.iter().take(config.predictor.top_n).enumerate() {
        writeln!(
            out,
            "{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
            i + 1,
            engine.label(r.intent)?,
            r.spatial_score,
            r.seq_similarity,
            r.distance,
            r.weight
        )?;
    }
    Ok(())
}

fn cmd_generate(cli: &Cli, name: &str, users: u64, days: Option<u32>, out: &mut dyn Write) -> CliResult {
    let scenario: Scenario = name.parse()?;
    if users == 0 {
        return Err(CliError::Usage("--users must be at least 1".into()));
    }
    let (spec, drifts) = scenario.spec();
    let mut events = Vec::new();
    for i in 0..users {
        let mut s = spec.clone().with_seed(cli.seed.wrapping_add(i));
        if users > 1 {
            s = s.with_user(&format!("u{i}"));
        }
        if let Some(d) = days {
            s = s.with_duration(d);
        }
        events.extend(generate(&s, &drifts)?);
    }
    match &cli.report {
        Some(path) => log::write_log(std::fs::File::create(path)?, &events)?,
        None => log::write_log(&mut *out, &events)?,
    }
    Ok(())
}

/// Parses `a,b,c` or an inclusive `start:end:step` range.
pub fn parse_values(spec: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad number {s:?}"));
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, end, step] = parts[..] else {
            return Err(format!("range must be start:end:step, got {spec:?}"));
        };
        let (start, end, step) = (num(start)?, num(end)?, num(step)?);
        if step.is_nan() || step <= 0.0 || end < start {
            return Err(format!("empty or infinite range {spec:?}"));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize + 1;
        // Round to the step's precision so 0.4 + 3 * 0.1 prints as 0.7.
        (0..count)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect()
    } else {
        spec.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>()?
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(format!("no usable values in {spec:?}"));
    }
    Ok(values)
}

fn cmd_sweep(
    cli: &Cli,
    log_path: &Path,
    param: &str,
    values: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let config = engine_config(cli)?;
    let param: SweepParam = param.parse()?;
    let values = parse_values(values).map_err(CliError::Usage)?;
    for &v in &values {
        param.apply(&config, v).validate()?;
    }
    let events = load_log(log_path, err)?;
    let rows = sweep(&events, &config, param, &values, options(cli))?;
    let mut text = format!("{},overall_hit_ratio\n", param.name());
    for (v, r) in rows {
        text.push_str(&format!("{v},{r:.6}\n"));
    }
    match &cli.report {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_snapshot_info(snapshot: &Path, out: &mut dyn Write) -> CliResult {
    let bytes = std::fs::read(snapshot)?;
    let (store, registry) = nodestore::restore(&bytes)?;
    let e = store.embedding();
    let c = store.config();
    writeln!(out, "format_version\t{}", nodestore::SNAPSHOT_VERSION)?;
    writeln!(out, "bytes\t{}", bytes.len())?;
    writeln!(out, "dims\t{}", e.dims)?;
    writeln!(out, "geo_scale\t{}", e.geo_scale)?;
    writeln!(out, "time_weight\t{}", e.time_weight)?;
    writeln!(out, "week_weight\t{}", e.week_weight)?;
    writeln!(out, "decay_k\t{}", c.decay_k)?;
    writeln!(out, "prune_threshold\t{}", c.prune_threshold)?;
    writeln!(out, "fusion_radius\t{}", c.fusion_radius)?;
    writeln!(out, "nodes\t{}", store.len())?;
    writeln!(out, "intents\t{}", registry.len())?;
    let mut counts = vec![(0usize, 0.0f64); registry.len()];
    for n in store.nodes() {
        if let Some(slot) = counts.get_mut(n.intent.0 as usize) {
            slot.0 += 1;
            slot.1 += n.weight;
        }
    }
    writeln!(out, "intent\tnodes\ttotal_weight")?;
    for (label, (n, w)) in registry.labels().iter().zip(counts) {
        writeln!(out, "{label}\t{n}\t{w:.6}")?;
    }
    Ok(())
}

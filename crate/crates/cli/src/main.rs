//! `sbw`: run steering scenarios, compare controllers and report delay margins.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use sbw_core::analysis::{delay_report, DelayBoundInputs, Improvement, Metrics};
use sbw_core::config::ScenarioConfig;
use sbw_core::controllers::{ArtdcDesign, ControllerConfig};
use sbw_core::sim::{parallel_map, run_scenario_partial, RunOutcome, TraceFormat};

#[derive(Parser)]
#[command(name = "sbw", version, about = "Steer-by-wire controller simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory; overrides `output.dir` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Keep every N-th trace row (metrics always use the full trace).
    #[arg(long, global = true)]
    every: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the single controller listed in the config.
    Simulate { config: PathBuf },
    /// Run every listed variant on identical inputs and compare them.
    Compare { config: PathBuf },
    /// Print the delay-bound report for an ARTDC gain design.
    DelayBound { config: PathBuf },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Invalid(#[from] sbw_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("run `{label}` became unstable: {source}")]
    Unstable {
        label: String,
        source: sbw_core::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Unstable { .. } => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Deserializes with the failing field path and source position in the message.
fn parse<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        CliError::Config(format!(
            "{}:{}:{}: config error at `{}`: {}",
            path.display(),
            inner.line(),
            inner.column(),
            field,
            inner
        ))
    })
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

struct Output {
    dir: PathBuf,
    every: usize,
    format: TraceFormat,
}

impl Output {
    fn resolve(cli: &Cli, cfg: &ScenarioConfig<f64>) -> CliResult<Self> {
        let every = cli.every.unwrap_or(cfg.output.every);
        if every == 0 {
            return Err(CliError::Config("--every must be at least 1".into()));
        }
        let format = match cli.format {
            Some(Format::Csv) => TraceFormat::Csv,
            Some(Format::Json) => TraceFormat::Json,
            None => cfg.output.format,
        };
        let dir = cli
            .out
            .clone()
            .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        Ok(Self { dir, every, format })
    }

    fn write_file(
        &self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(file);
        body(&mut w)
            .and_then(|_| w.flush())
            .map_err(io_err(&path))?;
        Ok(path)
    }

    fn write_json(&self, name: &str, value: &impl Serialize) -> CliResult<PathBuf> {
        self.write_file(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::other)?;
            writeln!(w)
        })
    }

    /// Trace file plus `<label>_metrics.json`. Metrics come from the full trace.
    fn write_run(&self, out: &RunOutcome<f64>) -> CliResult<Metrics> {
        let label = &out.trace.meta.label;
        let ext = match self.format {
            TraceFormat::Csv => "csv",
            TraceFormat::Json => "json",
        };
        self.write_file(&format!("{label}.{ext}"), |w| {
            out.trace.write(w, self.every, self.format)
        })?;
        let metrics = if out.trace.is_empty() {
            empty_metrics(out)
        } else {
            Metrics::from_trace(&out.trace, out.error.is_some())?
        };
        self.write_json(&format!("{label}_metrics.json"), &metrics)?;
        Ok(metrics)
    }
}

/// A run that failed before recording its first sample.
fn empty_metrics(out: &RunOutcome<f64>) -> Metrics {
    let n = out.trace.meta.gain_names.len();
    Metrics {
        label: out.trace.meta.label.clone(),
        controller: out.trace.meta.controller.clone(),
        samples: 0,
        rms_error_deg: f64::NAN,
        rms_torque: f64::NAN,
        gain_names: out.trace.meta.gain_names.clone(),
        gain_min: vec![f64::NAN; n],
        gain_max: vec![f64::NAN; n],
        instability: true,
        gain_ceiling_hit: out.trace.meta.gain_ceiling_hit,
    }
}

fn load_scenarios(path: &Path) -> CliResult<ScenarioConfig<f64>> {
    parse(path, &read(path)?)
}

fn simulate(cli: &Cli, path: &Path) -> CliResult<()> {
    let cfg = load_scenarios(path)?;
    let scenario = cfg.single()?;
    let output = Output::resolve(cli, &cfg)?;
    let run = run_scenario_partial(&scenario)?;
    let m = output.write_run(&run)?;
    println!(
        "{}: rms error {:.4} deg, rms torque {:.4} N·m ({} samples) -> {}",
        m.label,
        m.rms_error_deg,
        m.rms_torque,
        m.samples,
        output.dir.display()
    );
    match run.error {
        Some(source) => Err(CliError::Unstable {
            label: m.label,
            source,
        }),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct ComparisonRow {
    #[serde(flatten)]
    metrics: Metrics,
    /// Percentage reduction relative to the baseline; positive is better.
    improvement: Option<Improvement>,
    partial: bool,
    error: Option<String>,
}

#[derive(Serialize)]
struct Comparison {
    baseline: String,
    partial: bool,
    variants: Vec<ComparisonRow>,
}

fn compare(cli: &Cli, path: &Path) -> CliResult<()> {
    let cfg = load_scenarios(path)?;
    let (scenarios, baseline) = cfg.comparison()?;
    let output = Output::resolve(cli, &cfg)?;
    let indices: Vec<usize> = (0..scenarios.len()).collect();
    let runs = parallel_map(&indices, |i| run_scenario_partial::<f64>(&scenarios[i]));
    // writing stays on this thread, in config order
    let mut rows = Vec::with_capacity(runs.len());
    let mut first_failure = None;
    for (run, sc) in runs.into_iter().zip(&scenarios) {
        let run = run?;
        let metrics = output.write_run(&run)?;
        if let (Some(e), None) = (&run.error, &first_failure) {
            first_failure = Some((sc.label.clone(), e.clone()));
        }
        rows.push(ComparisonRow {
            metrics,
            improvement: None,
            partial: run.error.is_some(),
            error: run.error.map(|e| e.to_string()),
        });
    }
    let base = rows[baseline].metrics.clone();
    for (i, row) in rows.iter_mut().enumerate() {
        if i != baseline {
            row.improvement = Some(Improvement::of(&row.metrics, &base));
        }
    }
    let report = Comparison {
        baseline: base.label.clone(),
        partial: first_failure.is_some(),
        variants: rows,
    };
    output.write_json("comparison.json", &report)?;
    print_table(&report);
    match first_failure {
        Some((label, source)) => Err(CliError::Unstable { label, source }),
        None => Ok(()),
    }
}

fn print_table(report: &Comparison) {
    println!(
        "{:<20} {:>14} {:>14} {:>10} {:>10}",
        "variant", "rms err [deg]", "rms tau [N·m]", "err gain", "tau gain"
    );
    for row in &report.variants {
        let m = &row.metrics;
        let (de, dt) = match &row.improvement {
            Some(imp) => (
                format!("{:+.1}%", imp.error_pct),
                format!("{:+.1}%", imp.torque_pct),
            ),
            None => ("baseline".into(), String::new()),
        };
        let mark = if row.partial { " (partial)" } else { "" };
        println!(
            "{:<20} {:>14.4} {:>14.4} {:>10} {:>10}{mark}",
            m.label, m.rms_error_deg, m.rms_torque, de, dt
        );
    }
}

/// A delay-bound file is either a bare ARTDC design or a scenario file, in
/// which case the first ARTDC variant is used.
fn load_design(path: &Path) -> CliResult<ArtdcDesign<f64>> {
    let text = read(path)?;
    let is_scenario = matches!(
        serde_json::from_str::<Value>(&text),
        Ok(Value::Object(ref m)) if m.contains_key("controllers")
    );
    if !is_scenario {
        return parse(path, &text);
    }
    let cfg: ScenarioConfig<f64> = parse(path, &text)?;
    cfg.controllers
        .iter()
        .find_map(|v| match &v.controller {
            ControllerConfig::Artdc(d) => Some(*d),
            _ => None,
        })
        .ok_or_else(|| CliError::Config(format!("{}: no ARTDC controller listed", path.display())))
}

fn delay_bound(path: &Path) -> CliResult<()> {
    let design = load_design(path)?;
    let inputs = DelayBoundInputs::new(design.lyapunov_pair()?, design.razumikhin_r, design.eta)?;
    let report = delay_report(&inputs)?;
    let text =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Config(e.to_string()))?;
    // a closed pipe (`| head`) is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { config } => simulate(&cli, config),
        Command::Compare { config } => compare(&cli, config),
        Command::DelayBound { config } => delay_bound(config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

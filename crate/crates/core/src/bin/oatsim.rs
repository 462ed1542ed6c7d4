//! `oatsim`: run OAT scenarios from presets or TOML configs.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 numerical-invariant violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oat_core::experiments::{preset_by_name, presets, run_scenario, run_scenario_timestamped, run_sweep, ScenarioConfig, SWEEP_AXES};
use oat_core::Error;

#[derive(Parser)]
#[command(name = "oatsim", version, about = "One-axis-twisting scenarios for the driven Tavis-Cummings model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in preset name (see `list-presets`)
    #[arg(long)]
    scenario: Option<String>,
    /// TOML scenario file
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    /// Output CSV (run) or directory (sweep)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps
    #[arg(long)]
    workers: Option<usize>,
    /// Override the Fock cutoff of the cavity mode
    #[arg(long)]
    nmax: Option<usize>,
    /// Leave the generation time out of the JSON sidecar
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario
    Run {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
    },
    /// Run a scenario once per value of one parameter
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Parameter to vary
        #[arg(long)]
        axis: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Print the built-in presets
    ListPresets,
}

enum Failure {
    Config(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("i/o: {e}"))
    }
}

fn load(source: &Source, common: &Common) -> Result<ScenarioConfig, Failure> {
    let mut cfg = match (&source.scenario, &source.config) {
        (Some(name), _) => preset_by_name(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            ScenarioConfig::from_toml(&text)?
        }
        (None, None) => return Err(Failure::Config("one of --scenario or --config is required".into())),
    };
    if let Some(n) = common.nmax {
        cfg.n_max = Some(n);
    }
    if let Some(w) = common.workers {
        cfg.workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(source: Source, common: Common) -> Result<(), Failure> {
    let cfg = load(&source, &common)?;
    let series = if common.no_timestamp { run_scenario(&cfg)? } else { run_scenario_timestamped(&cfg)? };
    let out = common
        .out
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.id)));
    series.write(&out)?;
    println!(
        "{}: {} samples, min xi2 = {:.6}, max GHZ fidelity = {:.6} -> {}",
        cfg.id,
        series.rows.len(),
        series.min_xi2(),
        series.max_fidelity(),
        out.display()
    );
    Ok(())
}

fn sanitize(value: f64) -> String {
    format!("{value}").replace('-', "m")
}

fn sweep(source: Source, axis: String, values: Vec<f64>, common: Common) -> Result<(), Failure> {
    if !SWEEP_AXES.contains(&axis.as_str()) {
        return Err(Failure::Config(format!("unknown sweep axis '{axis}'; expected one of {}", SWEEP_AXES.join(", "))));
    }
    if values.is_empty() {
        return Err(Failure::Config("--values needs at least one number".into()));
    }
    let cfg = load(&source, &common)?;
    let result = run_sweep(&cfg, &axis, &values, cfg.workers, !common.no_timestamp)?;
    let dir = common.out.unwrap_or_else(|| PathBuf::from(format!("{}_{axis}", cfg.id)));
    std::fs::create_dir_all(&dir)?;
    for point in &result.points {
        if let Ok(series) = &point.result {
            series.write(&dir.join(format!("{axis}_{}.csv", sanitize(point.value))))?;
        }
    }
    std::fs::write(Path::new(&dir).join("summary.csv"), result.summary_csv())?;
    print!("{}", result.summary_csv());
    let failures = result.failures();
    for (value, err) in &failures {
        eprintln!("{axis}={value}: {err}");
    }
    match failures.iter().find(|(_, e)| e.is_numerical()) {
        Some((v, e)) => Err(Failure::Numerical(format!("{axis}={v}: {e}"))),
        None if !failures.is_empty() => Err(Failure::Config(format!("{} of {} sweep points failed", failures.len(), values.len()))),
        None => Ok(()),
    }
}

fn list_presets() {
    for p in presets() {
        let model = serde_json::to_value(p.model).map(|v| v["kind"].as_str().unwrap_or("").to_string()).unwrap_or_default();
        println!("{:<24} N={:<3} model={:<10} t_end={:.4} steps={}", p.id, p.n_atoms, model, p.time.t_end, p.time.steps);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { source, common } => run(source, common),
        Command::Sweep { source, axis, values, common } => sweep(source, axis, values, common),
        Command::ListPresets => {
            list_presets();
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical invariant violated: {msg}");
            ExitCode::from(2)
        }
    }
}

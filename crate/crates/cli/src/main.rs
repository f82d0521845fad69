//! `aaqc` command line: spectrum scans, adiabatic passages, gap sweeps,
//! clock-circuit demos, and sweep-discretization studies, with JSON configs
//! in and CSV/JSON artifacts out.

mod commands;
mod config;
mod error;
mod model;
mod output;
mod pool;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use error::CliError;

#[derive(Parser)]
#[command(
    name = "aaqc",
    about = "Quasienergy-passage simulations of kicked Floquet operators",
    version
)]
struct Cli {
    /// JSON configuration file (defaults apply when omitted)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output artifact path (per-command default in the working directory)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override a config entry, e.g. --set N=1000 or --set model=two_level
    /// (repeatable; dotted paths address nested keys)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,

    /// Worker threads for sweeps (default: AAQC_THREADS or 1)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track eigenangle curves over the kick strength and report the
    /// anholonomy shift and minimum gap
    Spectrum,
    /// Run discrete adiabatic passages and search the running time
    Passage,
    /// Sweep the fair-kick minimum gap over database sizes
    GapScan,
    /// Compose a gate circuit into a kicked system and run it end to end
    ClockDemo,
    /// Convergence of the discretized continuous-time sweep
    Discretize,
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_stderr_json());
            e.exit_code()
        }
    });
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("AAQC_THREADS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(1)
        .max(1);
    let base_dir = cli
        .config
        .as_deref()
        .and_then(Path::parent)
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();

    let raw = load_raw_config(cli.config.as_deref(), &cli.sets)?;
    let out_default = |name: &str| cli.out.clone().unwrap_or_else(|| PathBuf::from(name));

    match cli.command {
        Command::Spectrum => {
            let raw = with_default_model(raw);
            config::validate_model_config_keys(&raw, config::SPECTRUM_KEYS)
                .map_err(|m| CliError::config("BadConfig", m))?;
            let cfg: config::SpectrumConfig = parse_config(raw)?;
            commands::cmd_spectrum(&cfg, &out_default("spectrum.csv"), threads, &base_dir)
        }
        Command::Passage => {
            let raw = with_default_model(raw);
            config::validate_model_config_keys(&raw, config::PASSAGE_KEYS)
                .map_err(|m| CliError::config("BadConfig", m))?;
            let cfg: config::PassageConfig = parse_config(raw)?;
            commands::cmd_passage(&cfg, &out_default("passage.json"), threads, &base_dir)
        }
        Command::GapScan => {
            let cfg: config::GapScanConfig = parse_config(raw)?;
            commands::cmd_gap_scan(&cfg, &out_default("gap_scan.csv"), threads)
        }
        Command::ClockDemo => {
            let cfg: config::ClockDemoConfig = parse_config(raw)?;
            commands::cmd_clock_demo(&cfg, &out_default("clock_demo.json"), threads)
        }
        Command::Discretize => {
            let cfg: config::DiscretizeConfig = parse_config(raw)?;
            commands::cmd_discretize(&cfg, &out_default("discretize.csv"), threads)
        }
    }
}

fn load_raw_config(path: Option<&Path>, sets: &[String]) -> Result<serde_json::Value, CliError> {
    let mut value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::config("BadConfig", format!("cannot read {}: {e}", p.display()))
            })?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::config("BadConfig", format!("invalid JSON in {}: {e}", p.display()))
            })?
        }
        None => serde_json::json!({}),
    };
    if !value.is_object() {
        return Err(CliError::config(
            "BadConfig",
            "config root must be a JSON object".into(),
        ));
    }
    for entry in sets {
        let (key, raw_val) = entry.split_once('=').ok_or_else(|| {
            CliError::config("BadConfig", format!("--set needs KEY=VALUE, got {entry}"))
        })?;
        let parsed: serde_json::Value = serde_json::from_str(raw_val)
            .unwrap_or_else(|_| serde_json::Value::String(raw_val.to_string()));
        let mut cursor = &mut value;
        let parts: Vec<&str> = key.split('.').collect();
        for part in &parts[..parts.len() - 1] {
            cursor = cursor
                .as_object_mut()
                .ok_or_else(|| {
                    CliError::config("BadConfig", format!("--set path {key} crosses a non-object"))
                })?
                .entry(part.to_string())
                .or_insert_with(|| serde_json::json!({}));
        }
        cursor
            .as_object_mut()
            .ok_or_else(|| {
                CliError::config("BadConfig", format!("--set path {key} crosses a non-object"))
            })?
            .insert(parts[parts.len() - 1].to_string(), parsed);
    }
    Ok(value)
}

fn with_default_model(mut raw: serde_json::Value) -> serde_json::Value {
    if let Some(map) = raw.as_object_mut() {
        map.entry("model".to_string())
            .or_insert_with(|| serde_json::json!("grover_optimal"));
    }
    raw
}

fn parse_config<T: DeserializeOwned>(raw: serde_json::Value) -> Result<T, CliError> {
    serde_json::from_value(raw)
        .map_err(|e| CliError::config("BadConfig", format!("invalid config: {e}")))
}

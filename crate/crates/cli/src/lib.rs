//! Command-line front end for `nmqubit`.
//!
//! Times are dimensionless (`tau = gamma t`) and `R = |lambda2|/gamma` is
//! the primary knob; `--gamma0 --gamma` is accepted instead of `--R`.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nmqubit::{Execution, Method};
use serde_json::{json, Value};

use crate::commands::{
    describe_params, kernel_bath, run_compare, run_evolve, run_figure1, run_kernel_check, run_scan,
    ScanRequest,
};
use crate::config::{
    mode_name, parse_format, parse_mode, ConfigFile, Format, MethodList, Scenario,
};
pub use crate::error::CliError;
use crate::table::Table;

#[derive(Debug, Parser)]
#[command(name = "nmqubit", version, about = "Non-Markovian qubit dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the state trajectory of one or more methods.
    Evolve(ScenarioArgs),
    /// Population differences between methods (and against the oracle).
    Compare(ScenarioArgs),
    /// Write the three R = 5, 1, 0.05 comparison datasets.
    Figure1(Figure1Args),
    /// Positivity scan over a range of R.
    Scan(ScanArgs),
    /// Closed-form against quadrature reservoir correlation kernel.
    KernelCheck(KernelArgs),
}

#[derive(Debug, Default, Args)]
pub struct ScenarioArgs {
    /// markovian, post-markovian, memory-kernel or exact; repeatable.
    #[arg(long = "method")]
    pub method: Vec<String>,
    #[arg(long = "R")]
    pub r: Option<f64>,
    #[arg(long)]
    pub gamma0: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long = "N")]
    pub n: Option<f64>,
    /// excited, ground, plus-x or wx,wy,wz.
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    /// consistent or paper.
    #[arg(long = "coherence-arg")]
    pub coherence_arg: Option<String>,
    #[arg(long)]
    pub tau_start: Option<f64>,
    #[arg(long)]
    pub tau_stop: Option<f64>,
    #[arg(long)]
    pub tau_step: Option<f64>,
    /// Attach Volterra cross-check columns.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub oracle_step: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Flat TOML file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl ScenarioArgs {
    fn to_config(&self) -> ConfigFile {
        ConfigFile {
            method: methods(&self.method),
            r: self.r,
            gamma0: self.gamma0,
            gamma: self.gamma,
            n: self.n,
            init: self.init.clone(),
            coherence_arg: self.coherence_arg.clone(),
            tau_start: self.tau_start,
            tau_stop: self.tau_stop,
            tau_step: self.tau_step,
            oracle: self.oracle.then_some(true),
            oracle_step: self.oracle_step,
            out: self.out.clone(),
            format: self.format.clone(),
            ..ConfigFile::default()
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct Figure1Args {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long = "coherence-arg")]
    pub coherence_arg: Option<String>,
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Default, Args)]
pub struct ScanArgs {
    #[arg(long = "method")]
    pub method: Vec<String>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub r_steps: Option<usize>,
    #[arg(long = "N")]
    pub n: Option<f64>,
    #[arg(long)]
    pub tau_max: Option<f64>,
    #[arg(long = "coherence-arg")]
    pub coherence_arg: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl ScanArgs {
    fn to_config(&self) -> ConfigFile {
        ConfigFile {
            method: methods(&self.method),
            r_min: self.r_min,
            r_max: self.r_max,
            r_steps: self.r_steps,
            n: self.n,
            tau_max: self.tau_max,
            coherence_arg: self.coherence_arg.clone(),
            out: self.out.clone(),
            format: self.format.clone(),
            ..ConfigFile::default()
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct KernelArgs {
    /// Coupling strength of the Lorentzian bath.
    #[arg(long)]
    pub gamma0: Option<f64>,
    /// Spectral width of the Lorentzian bath.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl KernelArgs {
    fn to_config(&self) -> ConfigFile {
        ConfigFile {
            gamma0: self.gamma0,
            gamma: self.gamma,
            omega0: self.omega0,
            out: self.out.clone(),
            format: self.format.clone(),
            ..ConfigFile::default()
        }
    }
}

fn methods(names: &[String]) -> Option<MethodList> {
    (!names.is_empty()).then(|| MethodList::Many(names.to_vec()))
}

fn effective(config: &Option<PathBuf>, flags: ConfigFile) -> Result<ConfigFile, CliError> {
    Ok(match config {
        Some(path) => ConfigFile::load(path)?.overlay(flags),
        None => flags,
    })
}

fn config_json(cfg: &ConfigFile) -> Value {
    serde_json::to_value(cfg).expect("config serializes")
}

/// Writes `text` to `out`, or to stdout when absent.
fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

/// `<out>.meta.json` beside a data file.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn write_sidecar(path: &Path, meta: Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(&meta).expect("json value");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn metadata(command: &str, scenario: Value, extra: Value) -> Value {
    let mut meta = json!({
        "tool": "nmqubit",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "scenario": scenario,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut meta, extra) {
        m.extend(e);
    }
    meta
}

fn scenario_notes(s: &Scenario) -> Vec<&'static str> {
    let mut notes = Vec::new();
    if s.methods.contains(&Method::Exact) {
        notes.push(
            "exact coherence factor is the excited-state amplitude c(tau); only the population c(tau)^2 is a published result",
        );
    }
    if s.methods
        .iter()
        .any(|m| matches!(m, Method::PostMarkovian | Method::MemoryKernel))
    {
        notes.push(match s.mode {
            nmqubit::CoherenceArgMode::Consistent => {
                "coherence factor evaluated at a = R/2 (damping-basis eigenvalue lambda3)"
            }
            nmqubit::CoherenceArgMode::PaperLiteral => {
                "coherence factor evaluated at a = 2R as printed in the published solution"
            }
        });
    }
    notes
}

fn render(table: &Table, format: Format, scenario: Value) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(scenario),
    }
}

fn output(
    command: &str,
    table: &Table,
    cfg: &ConfigFile,
    scenario: Value,
    extra: Value,
) -> Result<(), CliError> {
    let format = parse_format(cfg.format.as_deref().unwrap_or("csv"))?;
    emit(cfg.out.as_deref(), &render(table, format, scenario.clone()))?;
    if let Some(out) = &cfg.out {
        let mut extra = extra;
        if let Value::Object(m) = &mut extra {
            m.insert("rows".into(), json!(table.rows.len()));
            m.insert("columns".into(), json!(table.columns));
        }
        write_sidecar(&sidecar_path(out), metadata(command, scenario, extra))?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let exec = Execution::default();
    match cli.command {
        Command::Evolve(args) => {
            let cfg = effective(&args.config, args.to_config())?;
            let scenario = Scenario::from_config(&cfg)?;
            let table = run_evolve(&scenario, exec)?;
            let extra = json!({
                "bath": describe_params(&scenario.params),
                "notes": scenario_notes(&scenario),
            });
            output(
                "evolve",
                &table,
                &cfg,
                config_json(&scenario.to_config()),
                extra,
            )
        }
        Command::Compare(args) => {
            let cfg = effective(&args.config, args.to_config())?;
            let scenario = Scenario::from_config(&cfg)?;
            let table = run_compare(&scenario, exec)?;
            let extra = json!({
                "bath": describe_params(&scenario.params),
                "notes": scenario_notes(&scenario),
            });
            output(
                "compare",
                &table,
                &cfg,
                config_json(&scenario.to_config()),
                extra,
            )
        }
        Command::Figure1(args) => {
            let mode = parse_mode(args.coherence_arg.as_deref().unwrap_or("consistent"))?;
            std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
            let panels = run_figure1(mode, args.oracle, exec)?;
            let mut files = Vec::new();
            for (name, scenario, table) in &panels {
                let path = args.out.join(name);
                std::fs::write(&path, table.to_csv()).map_err(|e| CliError::io(&path, e))?;
                files.push(json!({
                    "file": name,
                    "rows": table.rows.len(),
                    "scenario": config_json(&scenario.to_config()),
                    "notes": scenario_notes(scenario),
                }));
            }
            let meta = metadata(
                "figure1",
                json!({ "coherence-arg": mode_name(mode), "oracle": args.oracle }),
                json!({ "files": files }),
            );
            write_sidecar(&args.out.join("figure1.meta.json"), meta)
        }
        Command::Scan(args) => {
            let cfg = effective(&args.config, args.to_config())?;
            let req = ScanRequest::from_config(&cfg)?;
            let table = run_scan(&req, exec)?;
            let extra = json!({
                "probes": {
                    "map": "image of the Bloch ball inside the unit ball",
                    "componentwise": "|w_i| <= 1 for every pure input",
                    "excited": "output of the excited state is a density matrix",
                },
            });
            output("scan", &table, &cfg, config_json(&req.to_config()), extra)
        }
        Command::KernelCheck(args) => {
            let cfg = effective(&args.config, args.to_config())?;
            let bath = kernel_bath(&cfg)?;
            let report = run_kernel_check(&bath, exec)?;
            let scenario = json!({
                "gamma0": bath.gamma0_bar(),
                "gamma": bath.lambda_bar(),
                "omega0": bath.omega0(),
            });
            let summary = json!({
                "pass": report.pass,
                "max_rel_error": report.max_rel_error,
                "worst_lambda_t": report.worst_lambda_t,
                "tolerance": commands::KERNEL_CHECK_TOLERANCE,
            });
            output(
                "kernel-check",
                &report.table,
                &cfg,
                scenario,
                json!({ "summary": summary }),
            )?;
            eprintln!(
                "kernel-check: {} (max relative error {:e} at lambda_t = {})",
                if report.pass { "pass" } else { "FAIL" },
                report.max_rel_error,
                report.worst_lambda_t
            );
            if report.pass {
                Ok(())
            } else {
                Err(CliError::Numeric(format!(
                    "kernel mismatch {:e} exceeds {:e}",
                    report.max_rel_error,
                    commands::KERNEL_CHECK_TOLERANCE
                )))
            }
        }
    }
}

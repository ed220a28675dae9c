//! Flat key-value configuration and the validated scenario built from it.

use std::path::{Path, PathBuf};

use nmqubit::{BathParams, BlochVector, CoherenceArgMode, Method, QubitState};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Every key a config file may hold. Keys mirror the long flag names.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodList>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence_arg: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
}

/// `method = "exact"` or `method = ["exact", "memory-kernel"]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MethodList {
    One(String),
    Many(Vec<String>),
}

impl MethodList {
    pub fn names(&self) -> Vec<String> {
        match self {
            MethodList::One(s) => vec![s.clone()],
            MethodList::Many(v) => v.clone(),
        }
    }
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    /// Values set in `top` replace those in `self`.
    pub fn overlay(mut self, top: ConfigFile) -> ConfigFile {
        overlay!(self, top; method, r, gamma0, gamma, n, init, coherence_arg, tau_start,
            tau_stop, tau_step, oracle, oracle_step, out, format, r_min, r_max, r_steps,
            tau_max, omega0);
        self
    }
}

pub fn parse_method(name: &str) -> Result<Method, CliError> {
    name.parse().map_err(CliError::Config)
}

pub fn parse_mode(name: &str) -> Result<CoherenceArgMode, CliError> {
    match name {
        "consistent" => Ok(CoherenceArgMode::Consistent),
        "paper" => Ok(CoherenceArgMode::PaperLiteral),
        _ => Err(CliError::Config(format!(
            "unknown coherence-arg `{name}` (expected consistent or paper)"
        ))),
    }
}

pub fn mode_name(mode: CoherenceArgMode) -> &'static str {
    match mode {
        CoherenceArgMode::Consistent => "consistent",
        CoherenceArgMode::PaperLiteral => "paper",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub fn parse_format(name: &str) -> Result<Format, CliError> {
    match name {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(CliError::Config(format!(
            "unknown format `{name}` (expected csv or json)"
        ))),
    }
}

/// How the bath was specified; kept so the effective config echoes the
/// user's form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamSpec {
    Ratio { r: f64, n: f64 },
    Raw { gamma0: f64, gamma: f64, n: f64 },
}

impl ParamSpec {
    pub fn from_config(cfg: &ConfigFile) -> Result<Self, CliError> {
        let n = cfg.n.unwrap_or(0.0);
        match (cfg.r, cfg.gamma0, cfg.gamma) {
            (Some(r), None, None) => Ok(ParamSpec::Ratio { r, n }),
            (None, Some(gamma0), Some(gamma)) => Ok(ParamSpec::Raw { gamma0, gamma, n }),
            (Some(_), _, _) => Err(CliError::Config(
                "give either R or gamma0 and gamma, not both".into(),
            )),
            (None, None, None) => Err(CliError::Config(
                "missing bath: give R or gamma0 and gamma".into(),
            )),
            _ => Err(CliError::Config(
                "gamma0 and gamma must be given together".into(),
            )),
        }
    }

    pub fn bath(&self) -> Result<BathParams, CliError> {
        Ok(match *self {
            ParamSpec::Ratio { r, n } => BathParams::from_ratio(r, n)?,
            ParamSpec::Raw { gamma0, gamma, n } => BathParams::new(gamma0, gamma, n)?,
        })
    }

    fn write_to(&self, cfg: &mut ConfigFile) {
        match *self {
            ParamSpec::Ratio { r, n } => {
                cfg.r = Some(r);
                cfg.n = Some(n);
            }
            ParamSpec::Raw { gamma0, gamma, n } => {
                cfg.gamma0 = Some(gamma0);
                cfg.gamma = Some(gamma);
                cfg.n = Some(n);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    pub label: String,
    pub bloch: BlochVector,
}

impl InitialState {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bloch = match text {
            "excited" => BlochVector::new(0.0, 0.0, 1.0),
            "ground" => BlochVector::new(0.0, 0.0, -1.0),
            "plus-x" => BlochVector::new(1.0, 0.0, 0.0),
            _ => {
                let parts: Vec<f64> = text
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad_init(text))?;
                let [wx, wy, wz] = parts[..] else {
                    return Err(bad_init(text));
                };
                let w = BlochVector::new(wx, wy, wz);
                if w.norm().is_nan() || w.norm() > 1.0 + 1e-12 {
                    return Err(CliError::Config(format!(
                        "initial Bloch vector `{text}` lies outside the unit ball"
                    )));
                }
                return Ok(InitialState {
                    label: format!("{wx:?},{wy:?},{wz:?}"),
                    bloch: w,
                });
            }
        };
        Ok(InitialState {
            label: text.to_string(),
            bloch,
        })
    }

    pub fn state(&self) -> QubitState {
        self.bloch.to_state()
    }
}

fn bad_init(text: &str) -> CliError {
    CliError::Config(format!(
        "bad init `{text}` (expected excited, ground, plus-x or wx,wy,wz)"
    ))
}

/// Uniform grid `start, start + step, ...` up to `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl TauGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self, CliError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(CliError::Config(format!(
                "tau-step must be > 0, got {step}"
            )));
        }
        if !(start >= 0.0 && start.is_finite()) {
            return Err(CliError::Config(format!(
                "tau-start must be >= 0, got {start}"
            )));
        }
        if !(stop > start && stop.is_finite()) {
            return Err(CliError::Config(format!(
                "tau-stop must exceed tau-start, got {stop} <= {start}"
            )));
        }
        Ok(TauGrid { start, stop, step })
    }

    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid point `i`. When `1/step` is an integer the division form keeps
    /// decimal grids such as `0.07` exact to the last bit.
    pub fn tau(&self, i: usize) -> f64 {
        let inv = 1.0 / self.step;
        if (inv - inv.round()).abs() < 1e-9 * inv {
            self.start + i as f64 / inv.round()
        } else {
            self.start + i as f64 * self.step
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.tau(i)).collect()
    }
}

pub const DEFAULT_TAU_STOP: f64 = 10.0;
pub const DEFAULT_TAU_STEP: f64 = 0.01;
pub const DEFAULT_ORACLE_STEP: f64 = 1e-3;

/// A validated evolve/compare request.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub methods: Vec<Method>,
    pub spec: ParamSpec,
    pub params: BathParams,
    pub init: InitialState,
    pub mode: CoherenceArgMode,
    pub grid: TauGrid,
    pub oracle: bool,
    pub oracle_step: f64,
}

impl Scenario {
    pub fn from_config(cfg: &ConfigFile) -> Result<Self, CliError> {
        let names = cfg
            .method
            .as_ref()
            .map(MethodList::names)
            .unwrap_or_default();
        if names.is_empty() {
            return Err(CliError::Config("at least one --method is required".into()));
        }
        let methods = names
            .iter()
            .map(|n| parse_method(n))
            .collect::<Result<Vec<_>, _>>()?;
        let spec = ParamSpec::from_config(cfg)?;
        let params = spec.bath()?;
        if methods.contains(&Method::Exact) && params.n_thermal() != 0.0 {
            return Err(CliError::Unsupported(format!(
                "method exact requires N = 0, got N = {}",
                params.n_thermal()
            )));
        }
        let init = InitialState::parse(cfg.init.as_deref().unwrap_or("excited"))?;
        let mode = parse_mode(cfg.coherence_arg.as_deref().unwrap_or("consistent"))?;
        let grid = TauGrid::new(
            cfg.tau_start.unwrap_or(0.0),
            cfg.tau_stop.unwrap_or(DEFAULT_TAU_STOP),
            cfg.tau_step.unwrap_or(DEFAULT_TAU_STEP),
        )?;
        let oracle_step = cfg.oracle_step.unwrap_or(DEFAULT_ORACLE_STEP);
        if !(oracle_step > 0.0 && oracle_step.is_finite()) {
            return Err(CliError::Config(format!(
                "oracle-step must be > 0, got {oracle_step}"
            )));
        }
        Ok(Scenario {
            methods,
            spec,
            params,
            init,
            mode,
            grid,
            oracle: cfg.oracle.unwrap_or(false),
            oracle_step,
        })
    }

    /// Fully populated flat config that reproduces this scenario.
    pub fn to_config(&self) -> ConfigFile {
        let mut cfg = ConfigFile {
            method: Some(MethodList::Many(
                self.methods.iter().map(|m| m.name().to_string()).collect(),
            )),
            init: Some(self.init.label.clone()),
            coherence_arg: Some(mode_name(self.mode).to_string()),
            tau_start: Some(self.grid.start),
            tau_stop: Some(self.grid.stop),
            tau_step: Some(self.grid.step),
            oracle: Some(self.oracle),
            oracle_step: Some(self.oracle_step),
            ..ConfigFile::default()
        };
        self.spec.write_to(&mut cfg);
        cfg
    }
}

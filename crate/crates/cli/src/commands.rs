//! The subcommand computations. Nothing here touches the filesystem.

use nmqubit::exact_jc::{correlation_kernel_closed, correlation_kernel_quadrature};
use nmqubit::positivity::{method_map, scan_plane, CP_TOL};
use nmqubit::volterra_oracle::solve_batch;
use nmqubit::{
    BathParams, BlochVector, CoherenceArgMode, Execution, LorentzianBath, Method, PositivityReport,
    Probe, VolterraForm, VolterraProblem,
};

use crate::config::{
    mode_name, parse_method, parse_mode, ConfigFile, InitialState, ParamSpec, Scenario, TauGrid,
};
use crate::error::CliError;
use crate::table::{Cell, Table};

/// One method evaluated on the scenario grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub method: Method,
    pub bloch: Vec<BlochVector>,
    pub pe: Vec<f64>,
    pub mineig: Vec<f64>,
    /// Volterra excited population, absent for the Markovian method.
    pub oracle: Option<Vec<f64>>,
}

fn oracle_form(method: Method) -> Option<VolterraForm> {
    match method {
        Method::Markovian => None,
        Method::PostMarkovian => Some(VolterraForm::PostMarkovian),
        Method::MemoryKernel => Some(VolterraForm::MemoryKernel),
        Method::Exact => Some(VolterraForm::ExactAmplitude),
    }
}

fn oracle_populations(
    scenario: &Scenario,
    methods: &[Method],
    taus: &[f64],
    exec: Execution,
) -> Result<Vec<Option<Vec<f64>>>, CliError> {
    let h = scenario.oracle_step;
    let tau_max = (scenario.grid.stop / h - 1e-9).ceil() * h;
    let a = scenario.params.ratio();
    let mut problems = Vec::new();
    for m in methods {
        if let Some(form) = oracle_form(*m) {
            problems.push(VolterraProblem::from_ratio(form, a, h, tau_max)?);
        }
    }
    let mut solutions = solve_batch(exec, &problems).into_iter();
    let wz0 = scenario.init.bloch.wz;
    let wz_fixed = scenario.params.wz_equilibrium();
    methods
        .iter()
        .map(|m| {
            let Some(form) = oracle_form(*m) else {
                return Ok(None);
            };
            let sol = solutions.next().expect("one solution per problem")?;
            taus.iter()
                .map(|&tau| {
                    let mu = sol.value_at(tau).ok_or_else(|| {
                        CliError::Numeric(format!("oracle has no value at tau = {tau}"))
                    })?;
                    let xi = if form == VolterraForm::ExactAmplitude {
                        mu * mu
                    } else {
                        mu
                    };
                    Ok(0.5 * (1.0 + xi * wz0 + (1.0 - xi) * wz_fixed))
                })
                .collect::<Result<Vec<_>, CliError>>()
                .map(Some)
        })
        .collect()
}

/// Evaluates `methods` (duplicates allowed) on the scenario grid.
pub fn trajectories(
    scenario: &Scenario,
    methods: &[Method],
    exec: Execution,
) -> Result<Vec<Trajectory>, CliError> {
    let taus = scenario.grid.points();
    let input = scenario.init.state();
    let params = scenario.params;
    let oracles = if scenario.oracle {
        oracle_populations(scenario, methods, &taus, exec)?
    } else {
        vec![None; methods.len()]
    };
    methods
        .iter()
        .zip(oracles)
        .map(|(&method, oracle)| {
            let states = exec.try_map(&taus, |&tau| {
                method_map(method, &params, scenario.mode, params.time_of(tau))
                    .map(|m| m.apply(&input))
            })?;
            Ok(Trajectory {
                method,
                bloch: states.iter().map(|s| s.to_bloch()).collect(),
                pe: states.iter().map(|s| s.rho11).collect(),
                mineig: states.iter().map(|s| s.min_eigenvalue()).collect(),
                oracle,
            })
        })
        .collect()
}

fn dedup(methods: &[Method]) -> Vec<Method> {
    let mut out: Vec<Method> = Vec::new();
    for m in methods {
        if !out.contains(m) {
            out.push(*m);
        }
    }
    out
}

/// Trajectory table with columns `tau, <method>_pe, _wx, _wy, _wz, _mineig`
/// and, with the oracle on, `_oracle, _delta` for non-Markovian methods.
pub fn run_evolve(scenario: &Scenario, exec: Execution) -> Result<Table, CliError> {
    let methods = dedup(&scenario.methods);
    let trajs = trajectories(scenario, &methods, exec)?;
    let mut columns = vec!["tau".to_string()];
    for t in &trajs {
        let name = t.method.name();
        for suffix in ["pe", "wx", "wy", "wz", "mineig"] {
            columns.push(format!("{name}_{suffix}"));
        }
        if t.oracle.is_some() {
            columns.push(format!("{name}_oracle"));
            columns.push(format!("{name}_delta"));
        }
    }
    let mut table = Table::new(columns);
    for (i, tau) in scenario.grid.points().into_iter().enumerate() {
        let mut row = vec![Cell::Num(tau)];
        for t in &trajs {
            let w = t.bloch[i];
            row.extend([t.pe[i], w.wx, w.wy, w.wz, t.mineig[i]].map(Cell::Num));
            if let Some(o) = &t.oracle {
                row.push(Cell::Num(o[i]));
                row.push(Cell::Num(t.pe[i] - o[i]));
            }
        }
        table.push(row);
    }
    Ok(table)
}

/// Max-abs and discrete L2 (`sqrt(step * sum d^2)`) differences.
fn deviation(a: &[f64], b: &[f64], step: f64) -> (f64, f64) {
    let mut max: f64 = 0.0;
    let mut sq = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        max = max.max(d.abs());
        sq += d * d;
    }
    (max, (step * sq).sqrt())
}

/// Pairwise population differences, plus per-method oracle deviations.
pub fn run_compare(scenario: &Scenario, exec: Execution) -> Result<Table, CliError> {
    if scenario.methods.len() < 2 {
        return Err(CliError::Config(
            "compare needs at least two --method".into(),
        ));
    }
    let trajs = trajectories(scenario, &scenario.methods, exec)?;
    let step = scenario.grid.step;
    let mut table = Table::new(
        ["method_a", "method_b", "max_abs", "l2"]
            .map(String::from)
            .to_vec(),
    );
    for (i, a) in trajs.iter().enumerate() {
        for b in &trajs[i + 1..] {
            let (max, l2) = deviation(&a.pe, &b.pe, step);
            table.push(vec![
                a.method.name().into(),
                b.method.name().into(),
                max.into(),
                l2.into(),
            ]);
        }
    }
    for t in dedup_trajectories(&trajs) {
        if let Some(o) = &t.oracle {
            let (max, l2) = deviation(&t.pe, o, step);
            table.push(vec![
                t.method.name().into(),
                "oracle".into(),
                max.into(),
                l2.into(),
            ]);
        }
    }
    Ok(table)
}

fn dedup_trajectories(trajs: &[Trajectory]) -> Vec<&Trajectory> {
    let mut seen = Vec::new();
    trajs
        .iter()
        .filter(|t| {
            let new = !seen.contains(&t.method);
            seen.push(t.method);
            new
        })
        .collect()
}

pub const FIGURE1_RATIOS: [(f64, &str); 3] = [(5.0, "5"), (1.0, "1"), (0.05, "0p05")];

/// The three comparison panels: `(file name, scenario)`.
pub fn figure1_scenarios(mode: CoherenceArgMode, oracle: bool) -> Vec<(String, Scenario)> {
    FIGURE1_RATIOS
        .iter()
        .map(|&(r, tag)| {
            let spec = ParamSpec::Ratio { r, n: 0.0 };
            let scenario = Scenario {
                methods: vec![Method::PostMarkovian, Method::Exact, Method::MemoryKernel],
                spec,
                params: spec.bath().expect("fixed ratios are valid"),
                init: InitialState::parse("excited").expect("preset"),
                mode,
                grid: TauGrid::new(0.0, 10.0, 0.01).expect("fixed grid"),
                oracle,
                oracle_step: crate::config::DEFAULT_ORACLE_STEP,
            };
            (format!("figure1_R{tag}.csv"), scenario)
        })
        .collect()
}

pub fn run_figure1(
    mode: CoherenceArgMode,
    oracle: bool,
    exec: Execution,
) -> Result<Vec<(String, Scenario, Table)>, CliError> {
    figure1_scenarios(mode, oracle)
        .into_iter()
        .map(|(name, s)| {
            let table = run_evolve(&s, exec)?;
            Ok((name, s, table))
        })
        .collect()
}

/// Positivity scan over a uniform grid of `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRequest {
    pub method: Method,
    pub r_min: f64,
    pub r_max: f64,
    pub r_steps: usize,
    pub n_thermal: f64,
    pub mode: CoherenceArgMode,
    pub tau_max: f64,
}

pub const DEFAULT_SCAN_TAU_MAX: f64 = 10.0;

impl ScanRequest {
    pub fn from_config(cfg: &ConfigFile) -> Result<Self, CliError> {
        let names = cfg.method.as_ref().map(|m| m.names()).unwrap_or_default();
        let [name] = &names[..] else {
            return Err(CliError::Config("scan takes exactly one --method".into()));
        };
        let method = parse_method(name)?;
        let r_min = cfg
            .r_min
            .ok_or_else(|| CliError::Config("missing --r-min".into()))?;
        let r_max = cfg.r_max.unwrap_or(r_min);
        let r_steps = cfg.r_steps.unwrap_or(if r_max > r_min { 21 } else { 1 });
        if !(r_min >= 0.0 && r_max >= r_min && r_max.is_finite()) {
            return Err(CliError::Config(format!(
                "need 0 <= r-min <= r-max, got {r_min}, {r_max}"
            )));
        }
        if r_steps == 0 || (r_steps == 1 && r_max > r_min) {
            return Err(CliError::Config("r-steps must be >= 2 for a range".into()));
        }
        let n_thermal = cfg.n.unwrap_or(0.0);
        if method == Method::Exact && n_thermal != 0.0 {
            return Err(CliError::Unsupported(format!(
                "method exact requires N = 0, got N = {n_thermal}"
            )));
        }
        let tau_max = cfg.tau_max.unwrap_or(DEFAULT_SCAN_TAU_MAX);
        if !(tau_max > 0.0 && tau_max.is_finite()) {
            return Err(CliError::Config(format!(
                "tau-max must be > 0, got {tau_max}"
            )));
        }
        Ok(ScanRequest {
            method,
            r_min,
            r_max,
            r_steps,
            n_thermal,
            mode: parse_mode(cfg.coherence_arg.as_deref().unwrap_or("consistent"))?,
            tau_max,
        })
    }

    pub fn ratios(&self) -> Vec<f64> {
        if self.r_steps == 1 {
            return vec![self.r_min];
        }
        let last = (self.r_steps - 1) as f64;
        (0..self.r_steps)
            .map(|i| self.r_min + (self.r_max - self.r_min) * (i as f64 / last))
            .collect()
    }

    pub fn to_config(&self) -> ConfigFile {
        ConfigFile {
            method: Some(crate::config::MethodList::One(self.method.name().into())),
            r_min: Some(self.r_min),
            r_max: Some(self.r_max),
            r_steps: Some(self.r_steps),
            n: Some(self.n_thermal),
            coherence_arg: Some(mode_name(self.mode).into()),
            tau_max: Some(self.tau_max),
            ..ConfigFile::default()
        }
    }
}

pub const SCAN_COLUMNS: [&str; 11] = [
    "R",
    "map_positive",
    "map_first_violation_tau",
    "map_min_margin",
    "componentwise_positive",
    "componentwise_first_violation_tau",
    "excited_positive",
    "excited_first_violation_tau",
    "excited_min_eigenvalue",
    "min_choi_eigenvalue",
    "completely_positive",
];

/// One row per `R`, reporting the exact map criterion, the componentwise
/// criterion, the excited-state probe and the Choi spectrum.
pub fn run_scan(req: &ScanRequest, exec: Execution) -> Result<Table, CliError> {
    let ratios = req.ratios();
    let scan = |probe: Probe| -> Result<Vec<PositivityReport>, CliError> {
        Ok(scan_plane(
            req.method,
            &ratios,
            req.n_thermal,
            req.mode,
            probe,
            req.tau_max,
            exec,
        )?)
    };
    let map = scan(Probe::Map)?;
    let comp = scan(Probe::Componentwise)?;
    let excited = scan(Probe::excited())?;
    let mut table = Table::new(SCAN_COLUMNS.map(String::from).to_vec());
    for i in 0..ratios.len() {
        let (m, c, e) = (&map[i], &comp[i], &excited[i]);
        table.push(vec![
            ratios[i].into(),
            m.is_positive_map.into(),
            m.first_violation_tau.into(),
            m.min_margin.into(),
            c.is_positive_map.into(),
            c.first_violation_tau.into(),
            e.is_positive_map.into(),
            e.first_violation_tau.into(),
            e.min_state_eigenvalue.into(),
            m.min_choi_eigenvalue.into(),
            (m.min_choi_eigenvalue >= -CP_TOL).into(),
        ]);
    }
    Ok(table)
}

pub const KERNEL_CHECK_TOLERANCE: f64 = 1e-6;
pub const KERNEL_CHECK_POINTS: usize = 101;

#[derive(Debug, Clone, PartialEq)]
pub struct KernelReport {
    pub bath: LorentzianBath,
    pub table: Table,
    pub max_rel_error: f64,
    pub worst_lambda_t: f64,
    pub pass: bool,
}

/// Closed-form against quadrature correlation kernel on
/// `lambda_bar t in [0, 10]`.
pub fn run_kernel_check(bath: &LorentzianBath, exec: Execution) -> Result<KernelReport, CliError> {
    let lts: Vec<f64> = (0..KERNEL_CHECK_POINTS).map(|i| i as f64 / 10.0).collect();
    let rows = exec.try_map(&lts, |&lt| {
        let t = lt / bath.lambda_bar();
        let closed = correlation_kernel_closed(bath, t)?;
        let quad = correlation_kernel_quadrature(bath, t)?;
        let diff = (quad - closed).norm();
        let rel = if closed.norm() > 0.0 {
            diff / closed.norm()
        } else {
            diff
        };
        Ok::<_, nmqubit::Error>((lt, t, closed.re, quad.re, quad.im, rel))
    })?;
    let mut table = Table::new(
        [
            "lambda_t",
            "t",
            "closed",
            "quadrature",
            "quadrature_im",
            "rel_error",
        ]
        .map(String::from)
        .to_vec(),
    );
    let (mut max_rel_error, mut worst_lambda_t) = (0.0, 0.0);
    for (lt, t, c, q, qi, rel) in rows {
        if rel > max_rel_error {
            max_rel_error = rel;
            worst_lambda_t = lt;
        }
        table.push([lt, t, c, q, qi, rel].map(Cell::Num).to_vec());
    }
    Ok(KernelReport {
        bath: *bath,
        table,
        max_rel_error,
        worst_lambda_t,
        pass: max_rel_error < KERNEL_CHECK_TOLERANCE,
    })
}

/// Bath for the kernel check: `gamma0_bar = gamma0`, `lambda_bar = gamma`.
pub fn kernel_bath(cfg: &ConfigFile) -> Result<LorentzianBath, CliError> {
    Ok(LorentzianBath::new(
        cfg.omega0.unwrap_or(0.0),
        cfg.gamma0.unwrap_or(1.0),
        cfg.gamma.unwrap_or(1.0),
    )?)
}

/// Effective bath of a scenario, for metadata.
pub fn describe_params(p: &BathParams) -> serde_json::Value {
    serde_json::json!({
        "gamma0": p.gamma0(),
        "gamma": p.gamma(),
        "N": p.n_thermal(),
        "R": p.ratio(),
    })
}

//! Batch front end: `key = value` run configs, the experiments, and their CSV
//! output. [`CONFIG_KEYS_HELP`] lists every config key with its default.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;

use crate::analysis::{
    convergence_error, refinement_study, truncation_error, ErrorKind, RefinementReport,
};
use crate::continuous::{traveling_bump_problem, CauchyProblem, ExactSolution};
use crate::energy::{energy_report, energy_trace, stability_series, ENERGY_RTOL};
use crate::exec::Exec;
use crate::scheme::{cone_check, sample_inputs, solve, solve_unchecked, ConeRow, GridSpec};
use crate::trials::run_batch;
use crate::Error;

/// Help text for every config key, shown by `--help`.
pub const CONFIG_KEYS_HELP: &str = "\
Config file: one `key = value` per line, `#` starts a comment.

  experiment         solve | converge | consist | energy | stability | cfl-demo | cone-check
                     (the subcommand wins when both are given)
  problem            traveling_bump | zero                      [traveling_bump]
  problem.center     bump center                                 [0]
  problem.half_width bump half width, > 0                        [1]
  problem.p          bump exponent, integer >= 5                 [6]
  problem.c          propagation velocity, > 0                   [1]
  problem.chi1       support lower bound (zero problem only)     [-1]
  problem.chi2       support upper bound (zero problem only)     [1]
  grid.x_min         domain lower bound                          [-6]
  grid.x_max         domain upper bound                          [6]
  grid.t_max         final time, > 0                             [2]
  grid.dx            space step, > 0                             [0.1]
  grid.dt            time step, > 0                              [0.05]
  grid.zeta          CFL lower bound, in (0, 1)                  [0.3]
  grid.xi            CFL upper margin, in (0, 1), zeta <= 1 - xi [0.2]
  levels             refinement levels, integer >= 3             [4]
  output_path        CSV destination                             [<experiment>.csv]
  seed               seed for randomized trials                  [0]

Exit status: 0 ok, 1 i/o error, 2 invalid config, 3 CFL rejected,
4 instability detected, 5 property check failed.";

/// Randomized instances per energy/stability experiment.
pub const RANDOM_TRIALS: usize = 100;

/// Accepted range for fitted orders in refinement experiments.
pub const ORDER_RANGE: (f64, f64) = (1.8, 2.2);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Solve,
    Converge,
    Consist,
    Energy,
    Stability,
    CflDemo,
    ConeCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Solve,
        Experiment::Converge,
        Experiment::Consist,
        Experiment::Energy,
        Experiment::Stability,
        Experiment::CflDemo,
        Experiment::ConeCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Solve => "solve",
            Experiment::Converge => "converge",
            Experiment::Consist => "consist",
            Experiment::Energy => "energy",
            Experiment::Stability => "stability",
            Experiment::CflDemo => "cfl-demo",
            Experiment::ConeCheck => "cone-check",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }

    fn traceability(self) -> &'static str {
        match self {
            Experiment::Solve => "three-point scheme recurrence with first-step and artificial-boundary rules; CFL condition",
            Experiment::Converge => "convergence error e = ubar - u; max over time of its dx-norm; order (2,2) convergence",
            Experiment::Consist => "truncation error of the sampled exact solution; max over time of its dx-norm; order (2,2) consistency",
            Experiment::Energy => "discrete energy E^{k+1/2}; increment identity; lower bound 1/2(1-r^2)|du/dt|^2 <= E",
            Experiment::Stability => "energy growth bound sqrt(E) <= sqrt(E^{1/2}) + sqrt2/(2 sqrt(2xi-xi^2)) dt sum |s^j|",
            Experiment::CflDemo => "discrete energy under a Courant number outside the CFL condition",
            Experiment::ConeCheck => "finite-support cone of the discrete solution, truncation and convergence errors",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    TravelingBump {
        center: f64,
        half_width: f64,
        p: u32,
        c: f64,
    },
    Zero {
        c: f64,
        chi1: f64,
        chi2: f64,
    },
}

impl ProblemSpec {
    pub fn c(&self) -> f64 {
        match *self {
            ProblemSpec::TravelingBump { c, .. } | ProblemSpec::Zero { c, .. } => c,
        }
    }

    pub fn build(&self) -> Result<(CauchyProblem, ExactSolution), Error> {
        match *self {
            ProblemSpec::TravelingBump {
                center,
                half_width,
                p,
                c,
            } => traveling_bump_problem(center, half_width, p, c),
            ProblemSpec::Zero { c, chi1, chi2 } => {
                Ok((CauchyProblem::zero(c, chi1, chi2)?, ExactSolution::zero()))
            }
        }
    }

    fn describe(&self) -> String {
        match *self {
            ProblemSpec::TravelingBump {
                center,
                half_width,
                p,
                c,
            } => format!("traveling_bump center={center} half_width={half_width} p={p} c={c}"),
            ProblemSpec::Zero { c, chi1, chi2 } => format!("zero c={c} chi1={chi1} chi2={chi2}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub t_max: f64,
    pub dx: f64,
    pub dt: f64,
    pub zeta: f64,
    pub xi: f64,
}

impl GridConfig {
    pub fn build(&self, c: f64) -> Result<GridSpec, Error> {
        GridSpec::new(
            self.x_min, self.x_max, self.t_max, self.dx, self.dt, c, self.zeta, self.xi,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub grid: GridConfig,
    pub experiment: Option<Experiment>,
    pub levels: u32,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    /// Line each key was read from, for error messages.
    lines: HashMap<String, usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::TravelingBump {
                center: 0.0,
                half_width: 1.0,
                p: 6,
                c: 1.0,
            },
            grid: GridConfig {
                x_min: -6.0,
                x_max: 6.0,
                t_max: 2.0,
                dx: 0.1,
                dt: 0.05,
                zeta: 0.3,
                xi: 0.2,
            },
            experiment: None,
            levels: 4,
            output_path: None,
            seed: 0,
            lines: HashMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub reason: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: `{}`: {}", self.key, self.reason),
            None => write!(f, "`{}`: {}", self.key, self.reason),
        }
    }
}

impl std::error::Error for ConfigError {}

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "problem",
    "problem.center",
    "problem.half_width",
    "problem.p",
    "problem.c",
    "problem.chi1",
    "problem.chi2",
    "grid.x_min",
    "grid.x_max",
    "grid.t_max",
    "grid.dx",
    "grid.dt",
    "grid.zeta",
    "grid.xi",
    "levels",
    "output_path",
    "seed",
];

struct Entries(HashMap<String, (usize, String)>);

impl Entries {
    fn err(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.0.get(key).map(|e| e.0),
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.0.get(key) {
            None => Ok(default),
            Some((_, v)) => v
                .parse()
                .map_err(|_| self.err(key, format!("cannot parse `{v}`"))),
        }
    }
}

impl RunConfig {
    /// Parses config text; values not present keep their defaults. Numeric
    /// constraints are checked by [`RunConfig::validate`].
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError {
                    line: Some(line),
                    key: content.to_string(),
                    reason: "expected `key = value`".into(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN_KEYS.contains(&key) {
                return Err(ConfigError {
                    line: Some(line),
                    key: key.to_string(),
                    reason: "unknown key".into(),
                });
            }
            if let Some((first, _)) = entries.insert(key.to_string(), (line, value.to_string())) {
                return Err(ConfigError {
                    line: Some(line),
                    key: key.to_string(),
                    reason: format!("duplicate key (first set on line {first})"),
                });
            }
        }
        let e = Entries(entries);
        let d = RunConfig::default();

        let c = e.parsed("problem.c", 1.0)?;
        let kind = e.0.get("problem").map(|v| v.1.as_str()).unwrap_or("traveling_bump");
        let problem = match kind {
            "traveling_bump" => {
                for k in ["problem.chi1", "problem.chi2"] {
                    if e.0.contains_key(k) {
                        return Err(e.err(k, "only valid for `problem = zero`"));
                    }
                }
                ProblemSpec::TravelingBump {
                    center: e.parsed("problem.center", 0.0)?,
                    half_width: e.parsed("problem.half_width", 1.0)?,
                    p: e.parsed("problem.p", 6)?,
                    c,
                }
            }
            "zero" => {
                for k in ["problem.center", "problem.half_width", "problem.p"] {
                    if e.0.contains_key(k) {
                        return Err(e.err(k, "only valid for `problem = traveling_bump`"));
                    }
                }
                ProblemSpec::Zero {
                    c,
                    chi1: e.parsed("problem.chi1", -1.0)?,
                    chi2: e.parsed("problem.chi2", 1.0)?,
                }
            }
            other => {
                return Err(e.err(
                    "problem",
                    format!("unknown problem `{other}` (expected traveling_bump or zero)"),
                ))
            }
        };
        let grid = GridConfig {
            x_min: e.parsed("grid.x_min", d.grid.x_min)?,
            x_max: e.parsed("grid.x_max", d.grid.x_max)?,
            t_max: e.parsed("grid.t_max", d.grid.t_max)?,
            dx: e.parsed("grid.dx", d.grid.dx)?,
            dt: e.parsed("grid.dt", d.grid.dt)?,
            zeta: e.parsed("grid.zeta", d.grid.zeta)?,
            xi: e.parsed("grid.xi", d.grid.xi)?,
        };
        let experiment = match e.0.get("experiment") {
            None => None,
            Some((_, v)) => Some(
                Experiment::parse(v)
                    .ok_or_else(|| e.err("experiment", format!("unknown experiment `{v}`")))?,
            ),
        };
        let cfg = RunConfig {
            problem,
            grid,
            experiment,
            levels: e.parsed("levels", d.levels)?,
            output_path: e.0.get("output_path").map(|v| PathBuf::from(&v.1)),
            seed: e.parsed("seed", d.seed)?,
            lines: e.0.iter().map(|(k, v)| (k.clone(), v.0)).collect(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn config_error(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.lines.get(key).copied(),
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    fn key_for(&self, name: &str) -> String {
        match name {
            "c" | "p" | "half_width" | "chi" => {
                let k = if name == "chi" { "chi1" } else { name };
                format!("problem.{k}")
            }
            "x_min/x_max" => {
                if self.lines.contains_key("grid.x_max") {
                    "grid.x_max".into()
                } else {
                    "grid.x_min".into()
                }
            }
            other => format!("grid.{other}"),
        }
    }

    fn map_error(&self, e: Error) -> ConfigError {
        match e {
            Error::InvalidParameter { name, reason } => self.config_error(&self.key_for(name), reason),
            other => self.config_error("config", other.to_string()),
        }
    }

    /// Checks every numeric constraint of the problem and grid.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.build().map(|_| ())
    }

    /// Problem, exact solution and grid described by this config.
    pub fn build(&self) -> Result<(CauchyProblem, ExactSolution, GridSpec), ConfigError> {
        let (prob, exact) = self.problem.build().map_err(|e| self.map_error(e))?;
        let grid = self.grid.build(prob.c()).map_err(|e| self.map_error(e))?;
        if self.levels < 3 {
            return Err(self.config_error("levels", format!("need at least 3, got {}", self.levels)));
        }
        Ok((prob, exact, grid))
    }
}

/// Process exit categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Io,
    Config,
    CflRejected,
    Instability,
    PropertyFailure,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Io => 1,
            Status::Config => 2,
            Status::CflRejected => 3,
            Status::Instability => 4,
            Status::PropertyFailure => 5,
        }
    }
}

/// Result of one experiment: exit category, where the CSV went, and a short
/// human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub output_path: Option<PathBuf>,
    pub summary: String,
}

impl Outcome {
    fn failed(status: Status, summary: impl Into<String>) -> Self {
        Self {
            status,
            output_path: None,
            summary: summary.into(),
        }
    }
}

fn status_of(e: &Error) -> Status {
    match e {
        Error::Cfl { .. } => Status::CflRejected,
        Error::NonFinite { .. } | Error::NegativeEnergy { .. } => Status::Instability,
        _ => Status::Config,
    }
}

/// Formats a real with 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

struct Csv {
    text: String,
}

impl Csv {
    fn new(cfg: &RunConfig, exp: Experiment, grid: &GridSpec) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "# experiment={}", exp.name());
        let _ = writeln!(text, "# exercises: {}", exp.traceability());
        let _ = writeln!(text, "# problem: {}", cfg.problem.describe());
        let _ = writeln!(
            text,
            "# grid: x_min={} x_max={} t_max={} dx={} dt={} zeta={} xi={} j_max={} k_max={} courant={}",
            fmt_real(grid.x_min()),
            fmt_real(grid.x_max()),
            fmt_real(grid.t_max()),
            fmt_real(grid.dx()),
            fmt_real(grid.dt()),
            fmt_real(grid.zeta()),
            fmt_real(grid.xi()),
            grid.j_max(),
            grid.k_max(),
            fmt_real(grid.courant()),
        );
        Self { text }
    }

    fn meta(&mut self, line: impl fmt::Display) {
        let _ = writeln!(self.text, "# {line}");
    }

    fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }
}

/// Runs the configured experiment and writes its CSV.
pub fn run(cfg: &RunConfig) -> Outcome {
    let Some(exp) = cfg.experiment else {
        return Outcome::failed(Status::Config, "no experiment selected");
    };
    let (prob, exact, grid) = match cfg.build() {
        Ok(v) => v,
        Err(e) => return Outcome::failed(Status::Config, e.to_string()),
    };
    let mut csv = Csv::new(cfg, exp, &grid);
    let result = match exp {
        Experiment::Solve => run_solve(&prob, &grid, &mut csv),
        Experiment::Converge => run_refinement(cfg, &prob, &exact, &grid, ErrorKind::Convergence, &mut csv),
        Experiment::Consist => run_refinement(cfg, &prob, &exact, &grid, ErrorKind::Truncation, &mut csv),
        Experiment::Energy => run_energy(cfg, &prob, &grid, &mut csv),
        Experiment::Stability => run_stability(cfg, &prob, &grid, &mut csv),
        Experiment::CflDemo => run_cfl_demo(&prob, &grid, &mut csv),
        Experiment::ConeCheck => run_cone_check(&prob, &exact, &grid, &mut csv),
    };
    let (status, summary) = match result {
        Ok(v) => v,
        Err(e) => return Outcome::failed(status_of(&e), e.to_string()),
    };
    let path = cfg
        .output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", exp.name())));
    if let Err(e) = std::fs::write(&path, &csv.text) {
        return Outcome::failed(Status::Io, format!("cannot write {}: {e}", path.display()));
    }
    Outcome {
        status,
        output_path: Some(path),
        summary,
    }
}

type Step = Result<(Status, String), Error>;

fn run_solve(prob: &CauchyProblem, grid: &GridSpec, csv: &mut Csv) -> Step {
    let inputs = sample_inputs(prob, grid);
    let sol = solve(grid, &inputs)?;
    let stride = (grid.k_max() / 10).max(1);
    let mut snapshots: Vec<usize> = (0..=grid.k_max()).step_by(stride).collect();
    if snapshots.last() != Some(&grid.k_max()) {
        snapshots.push(grid.k_max());
    }
    csv.row(&["k", "j", "x", "t", "u"].map(String::from));
    for &k in &snapshots {
        for j in 0..=grid.j_max() {
            csv.row(&[
                k.to_string(),
                j.to_string(),
                fmt_real(grid.x(j)),
                fmt_real(grid.t(k)),
                fmt_real(sol.level(k).get(j)),
            ]);
        }
    }
    Ok((
        Status::Ok,
        format!("solved {} levels, {} snapshots written", grid.k_max() + 1, snapshots.len()),
    ))
}

fn run_refinement(
    cfg: &RunConfig,
    prob: &CauchyProblem,
    exact: &ExactSolution,
    grid: &GridSpec,
    kind: ErrorKind,
    csv: &mut Csv,
) -> Step {
    let report = refinement_study(prob, exact, grid, cfg.levels, kind)?;
    write_refinement(&report, csv);
    let (lo, hi) = ORDER_RANGE;
    Ok(match report.fit {
        None => (Status::Ok, format!("{} study degenerate: all error norms are zero", kind.name())),
        Some(f) if (lo..=hi).contains(&f.order) => (
            Status::Ok,
            format!("{} order {:.4} (constant {:.4e})", kind.name(), f.order, f.constant),
        ),
        Some(f) => (
            Status::PropertyFailure,
            format!("{} order {:.4} outside [{lo}, {hi}]", kind.name(), f.order),
        ),
    })
}

fn write_refinement(report: &RefinementReport, csv: &mut Csv) {
    csv.meta(format_args!("error_kind={}", report.kind.name()));
    csv.row(&["level", "dx", "dt", "courant", "max_norm"].map(String::from));
    for r in &report.rows {
        csv.row(&[
            r.level.to_string(),
            fmt_real(r.dx),
            fmt_real(r.dt),
            fmt_real(r.courant),
            fmt_real(r.max_norm),
        ]);
    }
    match report.fit {
        Some(f) => {
            csv.meta(format_args!("fitted_order={}", fmt_real(f.order)));
            csv.meta(format_args!("fitted_constant={}", fmt_real(f.constant)));
        }
        None => {
            csv.meta("fitted_order=degenerate");
            csv.meta("fitted_constant=degenerate");
        }
    }
}

fn run_energy(cfg: &RunConfig, prob: &CauchyProblem, grid: &GridSpec, csv: &mut Csv) -> Step {
    let inputs = sample_inputs(prob, grid);
    let sol = solve(grid, &inputs)?;
    let report = energy_report(&sol, &inputs.sh)?;
    csv.row(&["k", "t", "E", "increment_residual", "lower_bound_gap"].map(String::from));
    for (k, e) in report.trace.values.iter().enumerate() {
        csv.row(&[
            k.to_string(),
            fmt_real(report.trace.time(k)),
            fmt_real(*e),
            report.increments[k].map(|(r, _)| fmt_real(r)).unwrap_or_default(),
            fmt_real(report.gaps[k].0),
        ]);
    }
    let e0 = report.trace.values.first().copied().unwrap_or(0.0);
    let drift = report.trace.max_drift();
    let drift_budget = ENERGY_RTOL * grid.k_max() as f64 * (1.0 + e0.abs());
    let homogeneous = inputs.sh.iter().all(|s| s.is_zero());
    let drift_ok = !homogeneous || drift <= drift_budget;
    let own_failures =
        report.increment_failures() + report.lower_bound_failures() + report.nonnegativity_failures();
    let trials = run_batch(cfg.seed, RANDOM_TRIALS, true, Exec::default())?;
    let trial_failures =
        trials.increment_failures + trials.lower_bound_failures + trials.nonnegativity_failures;
    csv.meta(format_args!("max_drift={} drift_budget={}", fmt_real(drift), fmt_real(drift_budget)));
    csv.meta(format_args!(
        "increment_failures={} lower_bound_failures={} nonnegativity_failures={}",
        report.increment_failures(),
        report.lower_bound_failures(),
        report.nonnegativity_failures()
    ));
    csv.meta(format_args!(
        "random_trials={RANDOM_TRIALS} seed={} steps={} increment_failures={} lower_bound_failures={} nonnegativity_failures={}",
        cfg.seed,
        trials.checked_steps,
        trials.increment_failures,
        trials.lower_bound_failures,
        trials.nonnegativity_failures
    ));
    let ok = drift_ok && own_failures == 0 && trial_failures == 0;
    let summary = format!(
        "energy drift {drift:.3e} (budget {drift_budget:.3e}); {own_failures} failures on the run, {trial_failures} in {RANDOM_TRIALS} random trials"
    );
    Ok((if ok { Status::Ok } else { Status::PropertyFailure }, summary))
}

fn run_stability(cfg: &RunConfig, prob: &CauchyProblem, grid: &GridSpec, csv: &mut Csv) -> Step {
    let inputs = sample_inputs(prob, grid);
    let sol = solve(grid, &inputs)?;
    let rows = stability_series(&sol, &inputs.sh)?;
    csv.row(&["k", "t", "lhs_sqrtE", "rhs_bound"].map(String::from));
    for r in &rows {
        csv.row(&[r.k.to_string(), fmt_real(r.t), fmt_real(r.lhs), fmt_real(r.rhs)]);
    }
    let own = rows.iter().filter(|r| !r.holds()).count();
    let trials = run_batch(cfg.seed, RANDOM_TRIALS, true, Exec::default())?;
    csv.meta(format_args!("failures={own}"));
    csv.meta(format_args!(
        "random_trials={RANDOM_TRIALS} seed={} steps={} stability_failures={}",
        cfg.seed, trials.checked_steps, trials.stability_failures
    ));
    let ok = own == 0 && trials.stability_failures == 0;
    let summary = format!(
        "stability bound: {own} failures on the run, {} in {RANDOM_TRIALS} random trials",
        trials.stability_failures
    );
    Ok((if ok { Status::Ok } else { Status::PropertyFailure }, summary))
}

fn run_cfl_demo(prob: &CauchyProblem, grid: &GridSpec, csv: &mut Csv) -> Step {
    let inputs = sample_inputs(prob, grid);
    let sol = solve_unchecked(grid, &inputs)?;
    let trace = energy_trace(&sol);
    let e0 = trace.values.first().copied().unwrap_or(0.0);
    csv.row(&["k", "t", "E", "growth"].map(String::from));
    for (k, e) in trace.values.iter().enumerate() {
        csv.row(&[
            k.to_string(),
            fmt_real(trace.time(k)),
            fmt_real(*e),
            fmt_real(e.abs() / (1.0 + e0.abs())),
        ]);
    }
    let ratio = trace.growth_ratio();
    csv.meta(format_args!("courant={} growth_ratio={}", fmt_real(grid.courant()), fmt_real(ratio)));
    if trace.blew_up() {
        csv.meta("instability detected");
        Ok((
            Status::Instability,
            format!(
                "instability detected: courant {:.4}, |E| grew {ratio:.3e}x over {} steps",
                grid.courant(),
                grid.k_max()
            ),
        ))
    } else {
        Ok((
            Status::Ok,
            format!("no instability: courant {:.4}, growth ratio {ratio:.3e}", grid.courant()),
        ))
    }
}

fn cone_rows(csv: &mut Csv, rows: &[ConeRow]) {
    let bound = |b: Option<(i64, i64)>, first: bool| {
        b.map(|(lo, hi)| if first { lo } else { hi }.to_string())
            .unwrap_or_default()
    };
    for r in rows {
        csv.row(&[
            r.k.to_string(),
            r.predicted.0.to_string(),
            r.predicted.1.to_string(),
            bound(r.actual, true),
            bound(r.actual, false),
            r.violations.to_string(),
        ]);
    }
}

fn run_cone_check(prob: &CauchyProblem, exact: &ExactSolution, grid: &GridSpec, csv: &mut Csv) -> Step {
    let inputs = sample_inputs(prob, grid);
    let sol = solve(grid, &inputs)?;
    let window = inputs.initial_window();
    let rows = cone_check(grid, window, sol.levels());
    csv.row(
        &["k", "predicted_lo", "predicted_hi", "actual_lo", "actual_hi", "violations"].map(String::from),
    );
    cone_rows(csv, &rows);
    let total = |rows: &[ConeRow]| rows.iter().map(|r| r.violations).sum::<usize>();
    let sol_v = total(&rows);
    let trunc_v = total(&cone_check(grid, window, &truncation_error(grid, exact, prob).levels));
    let conv_v = total(&cone_check(grid, window, &convergence_error(&sol, exact).levels));
    csv.meta(format_args!(
        "violations solution={sol_v} truncation_error={trunc_v} convergence_error={conv_v}"
    ));
    let all = sol_v + trunc_v + conv_v;
    let summary = format!(
        "cone violations: solution {sol_v}, truncation error {trunc_v}, convergence error {conv_v}"
    );
    Ok((if all == 0 { Status::Ok } else { Status::PropertyFailure }, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let (_, _, grid) = cfg.build().unwrap();
        assert_eq!(grid.courant(), 0.5);
    }

    #[test]
    fn parses_every_key() {
        let text = "\
# full config
experiment = converge
problem = traveling_bump
problem.center = 0.5   # shifted
problem.half_width = 0.8
problem.p = 7
problem.c = 2
grid.x_min = -5
grid.x_max = 7
grid.t_max = 1
grid.dx = 0.05
grid.dt = 0.0125
grid.zeta = 0.25
grid.xi = 0.1
levels = 5
output_path = out/conv.csv
seed = 99
";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.experiment, Some(Experiment::Converge));
        assert_eq!(
            cfg.problem,
            ProblemSpec::TravelingBump {
                center: 0.5,
                half_width: 0.8,
                p: 7,
                c: 2.0
            }
        );
        assert_eq!(cfg.grid.dt, 0.0125);
        assert_eq!(cfg.levels, 5);
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.output_path, Some(PathBuf::from("out/conv.csv")));
    }

    #[test]
    fn errors_name_line_and_key() {
        let err = RunConfig::parse("seed = 1\ngrid.dx = -0.1\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert_eq!(err.key, "grid.dx");

        let err = RunConfig::parse("\n\nproblem.p = 4\n").unwrap_err();
        assert_eq!((err.line, err.key.as_str()), (Some(3), "problem.p"));

        let err = RunConfig::parse("grid.dt = fast\n").unwrap_err();
        assert_eq!((err.line, err.key.as_str()), (Some(1), "grid.dt"));

        let err = RunConfig::parse("bogus = 1\n").unwrap_err();
        assert_eq!(err.reason, "unknown key");

        let err = RunConfig::parse("seed = 1\nseed = 2\n").unwrap_err();
        assert_eq!(err.line, Some(2));

        let err = RunConfig::parse("grid.zeta = 0.9\ngrid.xi = 0.2\n").unwrap_err();
        assert_eq!((err.line, err.key.as_str()), (Some(1), "grid.zeta"));

        let err = RunConfig::parse("no equals sign\n").unwrap_err();
        assert_eq!(err.line, Some(1));

        let err = RunConfig::parse("problem = zero\nproblem.p = 6\n").unwrap_err();
        assert_eq!(err.key, "problem.p");

        let err = RunConfig::parse("levels = 2\n").unwrap_err();
        assert_eq!((err.line, err.key.as_str()), (Some(1), "levels"));

        assert!(err.to_string().starts_with("line 1: `levels`"));
    }

    #[test]
    fn reals_keep_seventeen_digits() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 123456789.12345679] {
            let s = fmt_real(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(fmt_real(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn missing_experiment_is_a_config_error() {
        let out = run(&RunConfig::default());
        assert_eq!(out.status, Status::Config);
    }
}

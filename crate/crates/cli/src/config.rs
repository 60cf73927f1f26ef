//! Run configuration in TOML.
//!
//! Schema (every key optional, defaults shown):
//!
//! ```toml
//! [scenario]
//! omega1 = 3.0
//! omega2 = 4.0
//! g = 0.3
//! topology = "common"      # or "independent"
//! t_left = 100.0
//! t_right = 21.0
//! gamma = 0.003            # flat rate for every qubit pair and transition
//! rho22 = 0.0              # dark-state weight, used in the degenerate regime
//!
//! [scenario.rates.left]    # overrides `gamma` for one reservoir
//! gamma11 = [0.003, 0.003] # [at omega_minus, at omega_plus]
//! gamma22 = [0.003, 0.003]
//! gamma12 = [0.003, 0.003] # defaults to sqrt(gamma11 * gamma22)
//!
//! [sweep]
//! axes = [{ axis = "t_left", start = 30.0, stop = 200.0, points = 50 }]
//!
//! [modulate]
//! targets = [0.7, 0.3, 0.0, 0.2, 0.4]
//! rabi_frequency = 1.5707963267948966
//! lead_in = 5.0
//! window = 50.0
//! sample_dt = 0.25
//! initial_rho22 = 1.0
//!
//! [output]
//! format = "csv"           # or "json"
//! precision = 12           # significant digits
//! path = "out.csv"         # stdout when absent
//! ```
//!
//! Sweep axes: `t_left`, `g`, `omega2`, `gamma_minus`, `gamma_plus`, `rho22`.

use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;
use thiserror::Error;

use qubit_heat::transport::sweep::{AxisSpec, SweepAxis};
use qubit_heat::{RateTable, RateTableF64, ReservoirLabel, ReservoirSpec, ScenarioF64, SystemParams, Topology};

use crate::output::{Format, DEFAULT_PRECISION};

/// One semantic problem, located by its dotted field path.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid configuration:\n{}", list(.0))]
    Invalid(Vec<Violation>),
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| format!("  {x}")).collect::<Vec<_>>().join("\n")
}

impl ConfigError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            ConfigError::Invalid(v) => v,
            _ => &[],
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    scenario: RawScenario,
    sweep: Option<RawSweep>,
    modulate: Option<RawModulate>,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    omega1: Option<f64>,
    omega2: Option<f64>,
    g: Option<f64>,
    topology: Option<String>,
    t_left: Option<f64>,
    t_right: Option<f64>,
    gamma: Option<f64>,
    rho22: Option<f64>,
    #[serde(default)]
    rates: RawRates,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRates {
    left: Option<RawTable>,
    right: Option<RawTable>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    gamma11: [f64; 2],
    gamma22: [f64; 2],
    gamma12: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axes: Vec<RawAxis>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    axis: String,
    start: f64,
    stop: f64,
    points: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModulate {
    targets: Option<Vec<f64>>,
    rabi_frequency: Option<f64>,
    lead_in: Option<f64>,
    window: Option<f64>,
    sample_dt: Option<f64>,
    initial_rho22: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<String>,
    precision: Option<usize>,
    path: Option<PathBuf>,
}

/// Scenario block with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub omega1: f64,
    pub omega2: f64,
    pub g: f64,
    pub topology: Topology,
    pub t_left: f64,
    pub t_right: f64,
    pub left: RateTableF64,
    pub right: RateTableF64,
    pub rho22: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            omega1: 3.0,
            omega2: 4.0,
            g: 0.3,
            topology: Topology::Common,
            t_left: 100.0,
            t_right: 21.0,
            left: RateTable::flat(0.003),
            right: RateTable::flat(0.003),
            rho22: 0.0,
        }
    }
}

impl ScenarioConfig {
    pub fn flat(omega1: f64, omega2: f64, g: f64, t_left: f64, t_right: f64, gamma: f64) -> Self {
        Self {
            omega1,
            omega2,
            g,
            t_left,
            t_right,
            left: RateTable::flat(gamma),
            right: RateTable::flat(gamma),
            ..Self::default()
        }
    }

    pub fn build(&self) -> qubit_heat::Result<ScenarioF64> {
        let params = SystemParams::new(self.omega1, self.omega2, self.g)?;
        let left = ReservoirSpec::new(ReservoirLabel::Left, self.t_left, self.left)?;
        let right = ReservoirSpec::new(ReservoirLabel::Right, self.t_right, self.right)?;
        ScenarioF64::new(params, self.topology, left, right)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulateConfig {
    pub targets: Vec<f64>,
    pub rabi_frequency: f64,
    pub lead_in: f64,
    pub window: f64,
    pub sample_dt: f64,
    pub initial_rho22: f64,
}

impl Default for ModulateConfig {
    fn default() -> Self {
        Self {
            targets: vec![0.7, 0.3, 0.0, 0.2, 0.4],
            rabi_frequency: 0.5 * std::f64::consts::PI,
            lead_in: 5.0,
            window: 50.0,
            sample_dt: 0.25,
            initial_rho22: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub format: Format,
    pub precision: usize,
    pub path: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            precision: DEFAULT_PRECISION,
            path: None,
        }
    }
}

/// A validated configuration. The scenario is guaranteed to build.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub sweep: Option<Vec<AxisSpec<f64>>>,
    pub modulate: Option<ModulateConfig>,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn scenario(&self) -> qubit_heat::Result<ScenarioF64> {
        self.scenario.build()
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

#[derive(Default)]
struct Checker {
    found: Vec<Violation>,
}

impl Checker {
    fn push(&mut self, path: &str, message: impl Into<String>) {
        self.found.push(Violation {
            path: path.to_string(),
            message: message.into(),
        });
    }

    fn positive(&mut self, path: &str, v: f64) {
        if !(v.is_finite() && v > 0.0) {
            self.push(path, format!("must be finite and > 0, got {v}"));
        }
    }

    fn nonnegative(&mut self, path: &str, v: f64) {
        if !(v.is_finite() && v >= 0.0) {
            self.push(path, format!("must be finite and >= 0, got {v}"));
        }
    }

    fn unit(&mut self, path: &str, v: f64) {
        if !(0.0..=1.0).contains(&v) {
            self.push(path, format!("must lie in [0, 1], got {v}"));
        }
    }
}

fn table(c: &mut Checker, path: &str, raw: &RawTable) -> RateTableF64 {
    for (name, pair) in [("gamma11", raw.gamma11), ("gamma22", raw.gamma22)] {
        for (i, v) in pair.iter().enumerate() {
            c.nonnegative(&format!("{path}.{name}[{i}]"), *v);
        }
    }
    let mut t = RateTable::per_qubit(raw.gamma11, raw.gamma22);
    if let Some(x) = raw.gamma12 {
        for (i, v) in x.iter().enumerate() {
            c.nonnegative(&format!("{path}.gamma12[{i}]"), *v);
            if v * v > t.gamma11[i] * t.gamma22[i] * (1.0 + 1e-12) {
                c.push(&format!("{path}.gamma12[{i}]"), "must satisfy gamma12^2 <= gamma11 * gamma22");
            }
        }
        t.gamma12 = x;
    }
    t
}

fn scenario(c: &mut Checker, raw: &RawScenario) -> ScenarioConfig {
    let d = ScenarioConfig::default();
    let s = |v: Option<f64>, dv: f64| v.unwrap_or(dv);
    let omega1 = s(raw.omega1, d.omega1);
    let omega2 = s(raw.omega2, d.omega2);
    let g = s(raw.g, d.g);
    let t_left = s(raw.t_left, d.t_left);
    let t_right = s(raw.t_right, d.t_right);
    let rho22 = s(raw.rho22, d.rho22);
    c.positive("scenario.omega1", omega1);
    c.positive("scenario.omega2", omega2);
    c.nonnegative("scenario.g", g);
    c.positive("scenario.t_left", t_left);
    c.positive("scenario.t_right", t_right);
    c.unit("scenario.rho22", rho22);
    let topology = match raw.topology.as_deref() {
        None | Some("common") => Topology::Common,
        Some("independent") => Topology::Independent,
        Some(other) => {
            c.push("scenario.topology", format!("expected \"common\" or \"independent\", got \"{other}\""));
            Topology::Common
        }
    };
    let flat = match raw.gamma {
        Some(v) => {
            c.nonnegative("scenario.gamma", v);
            RateTable::flat(v)
        }
        None => d.left,
    };
    let left = raw.rates.left.as_ref().map_or(flat, |t| table(c, "scenario.rates.left", t));
    let right = raw.rates.right.as_ref().map_or(flat, |t| table(c, "scenario.rates.right", t));
    ScenarioConfig {
        omega1,
        omega2,
        g,
        topology,
        t_left,
        t_right,
        left,
        right,
        rho22,
    }
}

fn sweep(c: &mut Checker, raw: &RawSweep) -> Vec<AxisSpec<f64>> {
    if raw.axes.is_empty() || raw.axes.len() > 2 {
        c.push("sweep.axes", format!("expected 1 or 2 axes, got {}", raw.axes.len()));
    }
    let mut out = Vec::new();
    for (i, a) in raw.axes.iter().enumerate() {
        let path = format!("sweep.axes[{i}]");
        let axis = match a.axis.parse::<SweepAxis>() {
            Ok(x) => x,
            Err(e) => {
                c.push(&format!("{path}.axis"), e.to_string());
                continue;
            }
        };
        if out.iter().any(|o: &AxisSpec<f64>| o.axis == axis) {
            c.push(&format!("{path}.axis"), format!("axis {axis} given twice"));
        }
        if a.points == 0 {
            c.push(&format!("{path}.points"), "must be at least 1");
            continue;
        }
        match AxisSpec::linspace(axis, a.start, a.stop, a.points) {
            Ok(spec) => out.push(spec),
            Err(e) => c.push(&path, e.to_string()),
        }
    }
    out
}

fn modulate(c: &mut Checker, raw: &RawModulate) -> ModulateConfig {
    let d = ModulateConfig::default();
    let m = ModulateConfig {
        targets: raw.targets.clone().unwrap_or(d.targets),
        rabi_frequency: raw.rabi_frequency.unwrap_or(d.rabi_frequency),
        lead_in: raw.lead_in.unwrap_or(d.lead_in),
        window: raw.window.unwrap_or(d.window),
        sample_dt: raw.sample_dt.unwrap_or(d.sample_dt),
        initial_rho22: raw.initial_rho22.unwrap_or(d.initial_rho22),
    };
    for (i, t) in m.targets.iter().enumerate() {
        c.unit(&format!("modulate.targets[{i}]"), *t);
    }
    c.positive("modulate.rabi_frequency", m.rabi_frequency);
    c.nonnegative("modulate.lead_in", m.lead_in);
    c.nonnegative("modulate.window", m.window);
    c.positive("modulate.sample_dt", m.sample_dt);
    c.unit("modulate.initial_rho22", m.initial_rho22);
    m
}

fn output(c: &mut Checker, raw: &RawOutput) -> OutputConfig {
    let format = match raw.format.as_deref().map(str::parse::<Format>) {
        None => Format::Csv,
        Some(Ok(f)) => f,
        Some(Err(e)) => {
            c.push("output.format", e);
            Format::Csv
        }
    };
    let precision = raw.precision.unwrap_or(DEFAULT_PRECISION);
    if !(1..=17).contains(&precision) {
        c.push("output.precision", format!("must lie in 1..=17, got {precision}"));
    }
    OutputConfig {
        format,
        precision,
        path: raw.path.clone(),
    }
}

/// Parses and validates `text`, reporting every violation found.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigError::Syntax {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let mut c = Checker::default();
    let sc = scenario(&mut c, &raw.scenario);
    let sw = raw.sweep.as_ref().map(|s| sweep(&mut c, s));
    let md = raw.modulate.as_ref().map(|m| modulate(&mut c, m));
    let out = output(&mut c, &raw.output);
    if c.found.is_empty() {
        // field checks passed; the physics layer may still object (e.g. rate
        // mismatch between branches when g = 0 at resonance)
        if let Err(e) = sc.build() {
            c.push("scenario", e.to_string());
        }
    }
    if !c.found.is_empty() {
        return Err(ConfigError::Invalid(c.found));
    }
    Ok(RunConfig {
        scenario: sc,
        sweep: sw,
        modulate: md,
        output: out,
    })
}

pub fn load(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

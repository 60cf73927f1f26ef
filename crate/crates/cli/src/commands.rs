//! Subcommand bodies. Each returns tables; writing them out is the caller's job.
//!
//! CSV columns per subcommand:
//!
//! - `steady`: `regime,topology,rho11,rho22,rho33,rho44,residual`
//! - `currents`, `channels`: `reservoir,temperature,total,direct,cross,inverse_direct,inverse_cross`
//! - `sweep`: one column per axis, then `regime,rho11..rho44,q_left,q_right,q_left_direct,
//!   q_left_cross,q_right_direct,q_right_cross,delta_left,entropy_production,coa`;
//!   2-D sweeps add a `contour.csv` sidecar with the zero line of `delta_left`
//! - `modulate`: `t,rho11..rho44,q_left,q_right,phase`, plus a `plateaus.csv` sidecar
//! - `coa`: `regime,coa_general,coa_literal,coa_closed`
//! - `preset`: see [`run_preset`]

use qubit_heat::entanglement::{bare_state, coa_detuned_closed, coa_general, coa_literal, coa_resonant_closed};
use qubit_heat::modulator::{run_schedule, PulseSchedule};
use qubit_heat::steadystate::{solve, PopulationVector};
use qubit_heat::transport::sweep::{sweep as run_sweep, zero_contour, AxisSpec, SweepAxis, SweepRow, ROW_TOLERANCE};
use qubit_heat::transport::{channel_decomposition, evaluate, max_heat_current_degenerate, stationarity_residual, HeatCurrentReport};
use qubit_heat::{Error, Regime, ReservoirLabel, ScenarioF64, Topology};

use crate::config::{ModulateConfig, RunConfig};
use crate::output::{Cell, Table};
use crate::presets::{self, Grid, Preset};
use crate::{CliError, Result};

/// A main table plus sidecar tables written next to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub main: Table,
    /// `(suffix, table)`; written to `<out>.<suffix>`.
    pub extras: Vec<(String, Table)>,
}

impl From<Table> for Report {
    fn from(main: Table) -> Self {
        Self { main, extras: Vec::new() }
    }
}

const POPULATIONS: [&str; 4] = ["rho11", "rho22", "rho33", "rho44"];

fn populations(v: &nalgebra::Vector4<f64>) -> Vec<Cell> {
    v.iter().map(|&x| Cell::Num(x)).collect()
}

fn scenario_meta(t: &mut Table, s: &ScenarioF64) {
    t.meta("omega1", s.params.omega1);
    t.meta("omega2", s.params.omega2);
    t.meta("g", s.params.g);
    t.meta("topology", s.topology);
    t.meta("t_left", s.left.temperature);
    t.meta("t_right", s.right.temperature);
    t.meta("regime", s.regime());
}

pub fn steady(cfg: &RunConfig) -> Result<Report> {
    let s = cfg.scenario()?;
    let (rates, result) = solve(&s, cfg.scenario.rho22)?;
    let state = result.state();
    let residual = stationarity_residual(&rates.total(), &state);
    let mut t = Table::new("steady state in the eigenbasis", &["regime", "topology", "rho11", "rho22", "rho33", "rho44", "residual"]);
    scenario_meta(&mut t, &s);
    let mut row = vec![s.regime().to_string().into(), s.topology.to_string().into()];
    row.extend(populations(state.vector()));
    row.push(residual.into());
    t.push(row);
    Ok(t.into())
}

fn current_rows(t: &mut Table, rep: &HeatCurrentReport<f64>) {
    for label in ReservoirLabel::ALL {
        let c = rep.reservoir(label);
        let temp = match label {
            ReservoirLabel::Left => rep.t_left,
            ReservoirLabel::Right => rep.t_right,
        };
        t.push(vec![
            label.short().into(),
            temp.into(),
            c.total.into(),
            c.direct.into(),
            c.cross.into(),
            c.inverse_direct().into(),
            c.inverse_cross().into(),
        ]);
    }
}

const CURRENT_COLUMNS: [&str; 7] = ["reservoir", "temperature", "total", "direct", "cross", "inverse_direct", "inverse_cross"];

fn checked(rep: &HeatCurrentReport<f64>) -> Result<()> {
    rep.check_invariants(ROW_TOLERANCE).map_err(CliError::from)
}

pub fn currents(cfg: &RunConfig) -> Result<Report> {
    let s = cfg.scenario()?;
    let (_, rep) = evaluate(&s, cfg.scenario.rho22)?;
    checked(&rep)?;
    let mut t = Table::new("steady-state heat currents", &CURRENT_COLUMNS);
    scenario_meta(&mut t, &s);
    if let Some(sigma) = rep.entropy_production() {
        t.meta("entropy_production", sigma);
    }
    current_rows(&mut t, &rep);
    Ok(t.into())
}

pub fn channels(cfg: &RunConfig) -> Result<Report> {
    let s = cfg.scenario()?;
    if s.topology != Topology::Common {
        return Err(CliError::Usage("channels needs topology = \"common\"".into()));
    }
    let (result, _) = evaluate(&s, cfg.scenario.rho22)?;
    let rep = channel_decomposition(&s, &result.state())?;
    checked(&rep)?;
    let mut t = Table::new("direct and cross dissipation channels", &CURRENT_COLUMNS);
    scenario_meta(&mut t, &s);
    current_rows(&mut t, &rep);
    Ok(t.into())
}

fn sweep_columns(axes: &[SweepAxis]) -> Vec<String> {
    let mut c: Vec<String> = axes.iter().map(|a| a.name().to_string()).collect();
    c.push("regime".into());
    c.extend(POPULATIONS.iter().map(|s| s.to_string()));
    for k in [
        "q_left",
        "q_right",
        "q_left_direct",
        "q_left_cross",
        "q_right_direct",
        "q_right_cross",
        "delta_left",
        "entropy_production",
        "coa",
    ] {
        c.push(k.into());
    }
    c
}

fn sweep_cells(r: &SweepRow<f64>) -> Vec<Cell> {
    let mut row: Vec<Cell> = r.coords.iter().map(|&x| Cell::Num(x)).collect();
    row.push(r.regime.to_string().into());
    row.extend(populations(&r.populations));
    let rep = &r.report;
    row.extend([
        rep.left.total,
        rep.right.total,
        rep.left.direct,
        rep.left.cross,
        rep.right.direct,
        rep.right.cross,
        rep.delta_left.unwrap_or(f64::NAN),
        rep.entropy_production().unwrap_or(f64::NAN),
        r.coa,
    ]
    .map(Cell::Num));
    row
}

fn contour(xname: &str, yname: &str, xs: &[f64], ys: &[f64], values: &[f64]) -> Table {
    let mut t = Table::new(format!("zero line of delta_left over ({xname}, {yname})"), &[xname, yname]);
    for (x, y) in zero_contour(xs, ys, values) {
        t.push(vec![x.into(), y.into()]);
    }
    t
}

pub fn sweep(cfg: &RunConfig) -> Result<Report> {
    let axes = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Usage("sweep needs a [sweep] block in the config".into()))?;
    let s = cfg.scenario()?;
    let rows = run_sweep(&s, axes, cfg.scenario.rho22)?;
    let names: Vec<SweepAxis> = axes.iter().map(|a| a.axis).collect();
    let cols = sweep_columns(&names);
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new("parameter sweep", &cols);
    scenario_meta(&mut t, &s);
    for r in &rows {
        t.push(sweep_cells(r));
    }
    let mut report = Report::from(t);
    if let [a, b] = axes.as_slice() {
        let delta: Vec<f64> = rows.iter().map(|r| r.report.delta_left.unwrap_or(f64::NAN)).collect();
        report.extras.push((
            "contour.csv".into(),
            contour(a.axis.name(), b.axis.name(), &a.values, &b.values, &delta),
        ));
    }
    Ok(report)
}

fn initial_state(s: &ScenarioF64, rho22: f64) -> Result<PopulationVector<f64>> {
    if rho22 == 1.0 {
        return Ok(PopulationVector::dark());
    }
    Ok(solve(s, rho22)?.1.state())
}

fn modulate_with(s: &ScenarioF64, m: &ModulateConfig, label: &str) -> Result<Report> {
    if s.regime() != Regime::ResonantDegenerate {
        return Err(CliError::Numeric(Error::RegimeMismatch(format!(
            "the modulator needs the ResonantDegenerate regime, scenario is {}",
            s.regime()
        ))));
    }
    let schedule = PulseSchedule::from_targets(&m.targets, m.rabi_frequency, m.lead_in, m.window, m.sample_dt)?;
    let ts = run_schedule(s, &schedule, &initial_state(s, m.initial_rho22)?)?;
    let qmax = max_heat_current_degenerate(s)?[0];
    let mut cols: Vec<&str> = vec!["t"];
    cols.extend(POPULATIONS);
    cols.extend(["q_left", "q_right", "phase"]);
    let mut t = Table::new(label, &cols);
    scenario_meta(&mut t, s);
    t.meta("q_left_max", qmax);
    t.meta("rabi_frequency", m.rabi_frequency);
    t.meta("relaxation_window", m.window);
    t.meta("frozen_dissipation", ts.flags.frozen_dissipation);
    t.meta("coherence_discarded", ts.flags.coherence_discarded);
    t.meta("reassigned_events", format!("{:?}", ts.flags.reassigned));
    for smp in &ts.samples {
        let sum = smp.populations.sum();
        if (sum - 1.0).abs() > 1e-10 || smp.populations.min() < -1e-12 {
            return Err(CliError::Numeric(Error::Invariant(format!(
                "populations at t = {} are not a probability vector",
                smp.t
            ))));
        }
        let mut row = vec![Cell::Num(smp.t)];
        row.extend(populations(&smp.populations));
        row.extend([Cell::Num(smp.q_left), Cell::Num(smp.q_right), smp.phase.to_string().into()]);
        t.push(row);
    }
    let mut p = Table::new("relaxed plateaus", &["t", "rho22", "q_left", "q_left_over_max", "expected", "residual"]);
    for pl in &ts.plateaus {
        p.push(vec![
            pl.t.into(),
            pl.rho22.into(),
            pl.q_left.into(),
            (pl.q_left / qmax).into(),
            (1.0 - pl.rho22).into(),
            pl.residual.into(),
        ]);
    }
    Ok(Report {
        main: t,
        extras: vec![("plateaus.csv".into(), p)],
    })
}

pub fn modulate(cfg: &RunConfig) -> Result<Report> {
    let m = cfg
        .modulate
        .as_ref()
        .ok_or_else(|| CliError::Usage("modulate needs a [modulate] block in the config".into()))?;
    modulate_with(&cfg.scenario()?, m, "modulator time series")
}

pub fn coa(cfg: &RunConfig) -> Result<Report> {
    let s = cfg.scenario()?;
    let (_, result) = solve(&s, cfg.scenario.rho22)?;
    let state = result.state();
    let rho = bare_state(&state, s.eigensystem());
    let closed = if s.regime() == Regime::ResonantDegenerate {
        coa_resonant_closed(cfg.scenario.rho22, &s)?
    } else {
        coa_detuned_closed(&state, s.eigensystem())
    };
    let mut t = Table::new("concurrence of assistance of the steady state", &["regime", "coa_general", "coa_literal", "coa_closed"]);
    scenario_meta(&mut t, &s);
    t.push(vec![
        s.regime().to_string().into(),
        coa_general(&rho)?.into(),
        coa_literal(&rho)?.into(),
        closed.into(),
    ]);
    Ok(t.into())
}

fn axis(a: SweepAxis, g: Grid) -> Result<AxisSpec<f64>> {
    Ok(AxisSpec::linspace(a, g.start, g.stop, g.points)?)
}

/// `(Q_L^C, Q_L^I)` of a sweep row whose template was common.
fn both_left(r: &SweepRow<f64>) -> (f64, f64) {
    let c = r.report.left.total;
    (c, c + r.report.delta_left.unwrap_or(f64::NAN))
}

fn fig2(p: Preset, ax: SweepAxis, grid: Grid) -> Result<Report> {
    let cfg = p.config();
    let s = cfg.scenario()?;
    let rows = run_sweep(&s, &[axis(ax, grid)?], 0.0)?;
    let mut cols = vec![ax.name()];
    cols.extend(POPULATIONS);
    cols.extend(["q_left_common", "q_left_independent"]);
    let mut t = Table::new(p.label(), &cols);
    scenario_meta(&mut t, &s);
    t.meta("grid", format!("{} {grid}", ax.name()));
    t.meta("populations", "common reservoirs, eigenbasis");
    for r in &rows {
        let (c, i) = both_left(r);
        let mut row = vec![Cell::Num(r.coords[0])];
        row.extend(populations(&r.populations));
        row.extend([Cell::Num(c), Cell::Num(i)]);
        t.push(row);
    }
    Ok(t.into())
}

fn fig3() -> Result<Report> {
    let p = Preset::Fig3;
    let s = p.config().scenario()?;
    let cols = ["panel", "t_left", "omega2", "g", "q_left_common", "q_left_independent", "delta_left"];
    let mut t = Table::new(p.label(), &cols);
    scenario_meta(&mut t, &s);
    t.meta(
        "grid",
        format!(
            "panel c: t_left {} x omega2 {}; panel d: t_left {} x g {}",
            presets::FIG3_T_LEFT,
            presets::FIG3_OMEGA2,
            presets::FIG3_T_LEFT,
            presets::FIG3_G
        ),
    );
    let mut ct = Table::new("zero line of delta_left", &["panel", "t_left", "value"]);
    for (panel, ax, grid) in [("c", SweepAxis::Omega2, presets::FIG3_OMEGA2), ("d", SweepAxis::Coupling, presets::FIG3_G)] {
        let tl = axis(SweepAxis::TemperatureLeft, presets::FIG3_T_LEFT)?;
        let other = axis(ax, grid)?;
        let rows = run_sweep(&s, &[tl.clone(), other.clone()], 0.0)?;
        let mut delta = Vec::with_capacity(rows.len());
        for r in &rows {
            let (c, i) = both_left(r);
            let (w2, g) = match ax {
                SweepAxis::Omega2 => (r.coords[1], s.params.g),
                _ => (s.params.omega2, r.coords[1]),
            };
            delta.push(i - c);
            t.push(vec![panel.into(), r.coords[0].into(), w2.into(), g.into(), c.into(), i.into(), (i - c).into()]);
        }
        for (x, y) in zero_contour(&tl.values, &other.values, &delta) {
            ct.push(vec![panel.into(), x.into(), y.into()]);
        }
    }
    Ok(Report {
        main: t,
        extras: vec![("contour.csv".into(), ct)],
    })
}

fn fig5() -> Result<Report> {
    let p = Preset::Fig5;
    let s = p.config().scenario()?;
    let gm = axis(SweepAxis::GammaMinus, presets::FIG5_GAMMA)?;
    let gp = axis(SweepAxis::GammaPlus, presets::FIG5_GAMMA)?;
    let rows = run_sweep(&s, &[gm.clone(), gp.clone()], 0.0)?;
    let cols = ["gamma_minus", "gamma_plus", "ratio", "q_left_common", "q_left_independent", "delta_left"];
    let mut t = Table::new(p.label(), &cols);
    scenario_meta(&mut t, &s);
    t.meta("grid", format!("gamma_minus {0} x gamma_plus {0}", presets::FIG5_GAMMA));
    let mut delta = Vec::with_capacity(rows.len());
    for r in &rows {
        let (c, i) = both_left(r);
        delta.push(i - c);
        t.push(vec![
            r.coords[0].into(),
            r.coords[1].into(),
            (r.coords[0] / r.coords[1]).into(),
            c.into(),
            i.into(),
            (i - c).into(),
        ]);
    }
    Ok(Report {
        main: t,
        extras: vec![("contour.csv".into(), contour("gamma_minus", "gamma_plus", &gm.values, &gp.values, &delta))],
    })
}

fn fig6() -> Result<Report> {
    let p = Preset::Fig6;
    let mut t = Table::new(p.label(), &["panel", "t_left", "coa", "q_left"]);
    let detuned = p.config().scenario()?;
    scenario_meta(&mut t, &detuned);
    t.meta(
        "grid",
        format!("t_left {} (reproduction choice); g = 0.3 in panel a; rho22 = 0 in panel b", presets::FIG6_T_LEFT),
    );
    let resonant = Preset::fig6_resonant().build()?;
    for (panel, s) in [("a", detuned), ("b", resonant)] {
        let rows = run_sweep(&s, &[axis(SweepAxis::TemperatureLeft, presets::FIG6_T_LEFT)?], 0.0)?;
        for r in &rows {
            t.push(vec![panel.into(), r.coords[0].into(), r.coa.into(), r.report.left.total.into()]);
        }
    }
    Ok(t.into())
}

/// Data table of a figure preset.
///
/// - `fig2a`, `fig2b`: `g` or `t_left`, `rho11..rho44`, `q_left_common`, `q_left_independent`
/// - `fig3`: `panel,t_left,omega2,g,q_left_common,q_left_independent,delta_left` (+ `contour.csv`)
/// - `fig4`: modulator time series (+ `plateaus.csv`)
/// - `fig5`: `gamma_minus,gamma_plus,ratio,q_left_common,q_left_independent,delta_left` (+ `contour.csv`)
/// - `fig6`: `panel,t_left,coa,q_left`
pub fn run_preset(p: Preset) -> Result<Report> {
    match p {
        Preset::Fig2a => fig2(p, SweepAxis::Coupling, presets::FIG2A_G),
        Preset::Fig2b => fig2(p, SweepAxis::TemperatureLeft, presets::FIG2B_T_LEFT),
        Preset::Fig3 => fig3(),
        Preset::Fig4 => {
            let cfg = p.config();
            let m = cfg.modulate.clone().unwrap_or_default();
            modulate_with(&cfg.scenario()?, &m, p.label())
        }
        Preset::Fig5 => fig5(),
        Preset::Fig6 => fig6(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn currents_conserve() {
        let r = currents(&RunConfig::default()).unwrap();
        let tot = r.main.column("total").unwrap();
        assert!((tot[0] + tot[1]).abs() < 1e-12);
        assert!(tot[0] > 0.0);
    }

    #[test]
    fn channels_need_common() {
        let cfg = parse_config("[scenario]\ntopology = \"independent\"\n").unwrap();
        assert!(matches!(channels(&cfg), Err(CliError::Usage(_))));
        let r = channels(&RunConfig::default()).unwrap();
        let (d, c, t) = (r.main.column("direct").unwrap(), r.main.column("cross").unwrap(), r.main.column("total").unwrap());
        assert!((d[0] + c[0] - t[0]).abs() < 1e-12);
    }

    #[test]
    fn two_axis_sweep_has_contour() {
        let cfg = parse_config(
            "[sweep]\naxes = [{ axis = \"gamma_minus\", start = 0.001, stop = 0.006, points = 6 }, { axis = \"gamma_plus\", start = 0.001, stop = 0.006, points = 6 }]\n",
        )
        .unwrap();
        let r = sweep(&cfg).unwrap();
        assert_eq!(r.main.rows.len(), 36);
        assert_eq!(r.extras[0].0, "contour.csv");
        assert!(!r.extras[0].1.rows.is_empty());
    }

    #[test]
    fn modulate_rejects_detuned() {
        let cfg = parse_config("[modulate]\n").unwrap();
        assert!(matches!(modulate(&cfg), Err(CliError::Numeric(_))));
    }

    #[test]
    fn coa_paths_agree() {
        for text in ["", "[scenario]\nomega2 = 3.0\nrho22 = 0.5\n"] {
            let r = coa(&parse_config(text).unwrap()).unwrap();
            let g = r.main.column("coa_general").unwrap()[0];
            assert!((g - r.main.column("coa_closed").unwrap()[0]).abs() < 1e-9);
            assert!((g - r.main.column("coa_literal").unwrap()[0]).abs() < 1e-6);
        }
    }
}

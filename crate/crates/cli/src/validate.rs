//! The acceptance suite: one check per criterion, each comparing closed forms
//! with independent numerics or asserting an invariant over a grid.
//!
//! Random draws use fixed seeds, so every run checks the same scenarios.

use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qubit_heat::dissipators::{bose_occupation, build_liouvillian};
use qubit_heat::entanglement::{bare_state, coa_detuned_closed, coa_general, coa_resonant_closed};
use qubit_heat::modulator::{rabi_numeric, rabi_populations, relax_to_steady, run_schedule, Phase, PulseSchedule};
use qubit_heat::sampling::{random_populations, random_scenario};
use qubit_heat::steadystate::{equal_rate_steady_state, gibbs_populations, solve, steady_state_nullspace, NullspaceState};
use qubit_heat::transport::sweep::{sweep, zero_crossings, AxisSpec, SweepAxis, SweepRow};
use qubit_heat::transport::{
    channel_decomposition, evaluate, heat_current_closed, max_heat_current_degenerate, max_heat_current_uncoupled,
    max_heat_current_w, uncoupled_current,
};
use qubit_heat::{
    PopulationVector, RateTable, Regime, ReservoirLabel, ScenarioF64, SteadyStateResult, Topology,
};

use crate::commands::run_preset;
use crate::config::ScenarioConfig;
use crate::output::DEFAULT_PRECISION;
use crate::presets::{self, Preset};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(id: u8, name: &'static str, passed: bool, detail: String) -> Self {
        Self { id, name, passed, detail }
    }

    fn error(id: u8, name: &'static str, e: impl std::fmt::Display) -> Self {
        Self::new(id, name, false, format!("error: {e}"))
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

type Outcome = Result<(bool, String), String>;

fn wrap(id: u8, name: &'static str, f: impl FnOnce() -> Outcome) -> Check {
    match f() {
        Ok((passed, detail)) => Check::new(id, name, passed, detail),
        Err(e) => Check::error(id, name, e),
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

const PER_REGIME: usize = 100;

fn scenarios(regime: Regime, seed: u64, n: usize) -> Result<Vec<ScenarioF64>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_scenario(&mut rng, regime).map_err(err)).collect()
}

fn max_diff(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    (a - b).abs().max()
}

fn fig_scenario() -> Result<ScenarioF64, String> {
    Preset::Fig5.config().scenario().map_err(err)
}

pub const NAMES: [&str; 12] = [
    "oracle equivalence",
    "equilibrium",
    "conservation and second law",
    "equal-rate steady state",
    "dark-state family",
    "channel decomposition",
    "gamma ratio boundary",
    "modulator staircase",
    "Rabi dynamics",
    "concurrence of assistance",
    "uncoupled limits",
    "determinism",
];

/// Closed-form steady states against the Liouvillian nullspace and long-time relaxation.
pub fn oracle_equivalence() -> Check {
    wrap(1, NAMES[0], || {
        let (mut worst_null, mut worst_relax) = (0.0f64, 0.0f64);
        let mut count = 0;
        for (k, regime) in Regime::ALL.into_iter().enumerate() {
            for s in scenarios(regime, 1000 + k as u64, PER_REGIME)? {
                let w = 0.37;
                let (rates, result) = solve(&s, w).map_err(err)?;
                let closed = *result.state().vector();
                let l = build_liouvillian(&s).map_err(err)?;
                let oracle = match steady_state_nullspace(&l).map_err(err)? {
                    NullspaceState::Unique(rho) => NullspaceState::populations(&rho),
                    NullspaceState::Family { dark, residual } => {
                        NullspaceState::populations(&dark) * w + NullspaceState::populations(&residual) * (1.0 - w)
                    }
                };
                worst_null = worst_null.max(max_diff(&closed, &oracle));
                let start = match result {
                    // the dark weight is conserved, so start on the same family member
                    SteadyStateResult::Family(_) => Vector4::new(0.1, w, 0.2, 0.7 - w),
                    SteadyStateResult::Unique(_) => Vector4::repeat(0.25),
                };
                let start = PopulationVector::new(start).map_err(err)?;
                let (relaxed, _) = relax_to_steady(&rates.total(), &start, 1e-14, 1e8).map_err(err)?;
                worst_relax = worst_relax.max(max_diff(&closed, relaxed.vector()).max(max_diff(&oracle, relaxed.vector())));
                count += 1;
            }
        }
        Ok((
            worst_null <= 1e-9 && worst_relax <= 1e-9,
            format!("{count} scenarios; max |closed - nullspace| = {worst_null:.2e}, max |relaxed - steady| = {worst_relax:.2e} (tol 1e-9)"),
        ))
    })
}

/// Equal temperatures give the Gibbs state and no current.
pub fn equilibrium() -> Check {
    wrap(2, NAMES[1], || {
        let (mut dp, mut dq) = (0.0f64, 0.0f64);
        for (k, regime) in Regime::ALL.into_iter().enumerate() {
            for s in scenarios(regime, 2000 + k as u64, PER_REGIME)? {
                let t = s.temperature(ReservoirLabel::Left);
                let s = s.with_temperature(ReservoirLabel::Right, t).map_err(err)?;
                let gibbs = gibbs_populations(s.eigensystem(), t).map_err(err)?;
                let (res, rep) = evaluate(&s, gibbs.get(1)).map_err(err)?;
                dp = dp.max(max_diff(res.state().vector(), gibbs.vector()));
                dq = dq.max(rep.left.total.abs()).max(rep.right.total.abs());
            }
        }
        Ok((
            dp <= 1e-10 && dq <= 1e-12,
            format!("max |rho - gibbs| = {dp:.2e} (tol 1e-10), max |Q| = {dq:.2e} (tol 1e-12)"),
        ))
    })
}

type PresetGrid = (ScenarioF64, Vec<AxisSpec<f64>>);

fn preset_grids() -> Result<Vec<PresetGrid>, String> {
    let lin = |a, g: presets::Grid| AxisSpec::linspace(a, g.start, g.stop, g.points).map_err(err);
    let base = Preset::Fig2a.config().scenario().map_err(err)?;
    let resonant = Preset::fig6_resonant().build().map_err(err)?;
    let t = || lin(SweepAxis::TemperatureLeft, presets::FIG3_T_LEFT);
    Ok(vec![
        (base.clone(), vec![lin(SweepAxis::Coupling, presets::FIG2A_G)?]),
        (base.clone(), vec![lin(SweepAxis::TemperatureLeft, presets::FIG2B_T_LEFT)?]),
        (base.clone(), vec![t()?, lin(SweepAxis::Omega2, presets::FIG3_OMEGA2)?]),
        (base.clone(), vec![t()?, lin(SweepAxis::Coupling, presets::FIG3_G)?]),
        (
            base.clone(),
            vec![lin(SweepAxis::GammaMinus, presets::FIG5_GAMMA)?, lin(SweepAxis::GammaPlus, presets::FIG5_GAMMA)?],
        ),
        (resonant.clone(), vec![lin(SweepAxis::TemperatureLeft, presets::FIG6_T_LEFT)?]),
        (resonant, vec![lin(SweepAxis::DarkPopulation, presets::Grid::new(0.0, 1.0, 11))?]),
    ])
}

/// `|Q_L + Q_R|` and the most negative entropy production over a set of rows.
fn balance(rows: &[SweepRow<f64>]) -> (f64, f64) {
    rows.iter().fold((0.0f64, f64::INFINITY), |(c, s), r| {
        let rep = &r.report;
        (
            c.max((rep.left.total + rep.right.total).abs()),
            s.min(rep.entropy_production().unwrap_or(f64::INFINITY)),
        )
    })
}

/// Energy conservation and the second law on every preset grid, both topologies.
pub fn conservation() -> Check {
    wrap(3, NAMES[2], || {
        let (mut worst_sum, mut min_sigma, mut rows) = (0.0f64, f64::INFINITY, 0);
        for (s, axes) in preset_grids()? {
            for top in [Topology::Common, Topology::Independent] {
                let r = sweep(&s.with_topology(top).map_err(err)?, &axes, 0.0).map_err(err)?;
                let (c, m) = balance(&r);
                worst_sum = worst_sum.max(c);
                min_sigma = min_sigma.min(m);
                rows += r.len();
            }
        }
        for (k, regime) in Regime::ALL.into_iter().enumerate() {
            for s in scenarios(regime, 3000 + k as u64, PER_REGIME)? {
                let (_, rep) = evaluate(&s, 0.5).map_err(err)?;
                worst_sum = worst_sum.max((rep.left.total + rep.right.total).abs());
                min_sigma = min_sigma.min(rep.entropy_production().unwrap_or(f64::INFINITY));
                rows += 1;
            }
        }
        Ok((
            worst_sum <= 1e-12 && min_sigma >= -1e-12,
            format!("{rows} rows; max |Q_L + Q_R| = {worst_sum:.2e}, min entropy production = {min_sigma:.2e}"),
        ))
    })
}

/// Equal rates: the closed populations, invariant under topology and rate scaling.
pub fn equal_rate() -> Check {
    wrap(4, NAMES[3], || {
        let mut rng = ChaCha8Rng::seed_from_u64(4000);
        let mut worst = 0.0f64;
        let n = 600;
        for _ in 0..n {
            let w1 = rng.random_range(1.0..5.0);
            let w2 = w1 * (1.0 + rng.random_range(0.1..0.6) * if rng.random_bool(0.5) { 1.0 } else { -1.0 });
            let g = rng.random_range(0.0..2.0);
            let (tl, tr) = (rng.random_range(1.0..200.0), rng.random_range(1.0..200.0));
            let rates = RateTable::per_branch(rng.random_range(1e-3..1e-2), rng.random_range(1e-3..1e-2));
            let scale = rng.random_range(0.1..10.0);
            let base = ScenarioConfig {
                left: rates,
                right: rates,
                ..ScenarioConfig::flat(w1, w2, g, tl, tr, 1.0)
            }
            .build()
            .map_err(err)?;
            let eig = base.eigensystem();
            let occ = |w| -> Result<f64, String> {
                Ok(bose_occupation(w, tl).map_err(err)? + bose_occupation(w, tr).map_err(err)?)
            };
            let expect = equal_rate_steady_state(occ(eig.omega_minus)?, occ(eig.omega_plus)?).map_err(err)?;
            for s in [
                base.clone(),
                base.with_topology(Topology::Independent).map_err(err)?,
                base.scaled_rates(scale).map_err(err)?,
            ] {
                let (_, r) = solve(&s, 0.0).map_err(err)?;
                worst = worst.max(max_diff(r.state().vector(), expect.vector()));
            }
        }
        Ok((
            worst <= 1e-12,
            format!("{n} scenarios x (common, independent, rescaled); max deviation = {worst:.2e} (tol 1e-12)"),
        ))
    })
}

/// `Σ|terms| / |Q|` of the flux sum behind `⟨λ|𝓜_α|ϱ⟩`: how much a relative
/// perturbation of the state is amplified in the current.
fn current_condition(m: &nalgebra::Matrix4<f64>, rho: &Vector4<f64>, lambdas: &Vector4<f64>) -> f64 {
    let (mut q, mut abs) = (0.0, 0.0);
    for p in 0..4 {
        for k in p + 1..4 {
            let de = lambdas[k] - lambdas[p];
            let (a, b) = (de * m[(k, p)] * rho[p], de * m[(p, k)] * rho[k]);
            q += a - b;
            abs += a.abs() + b.abs();
        }
    }
    abs / q.abs()
}

/// Dark state is stationary; currents fall linearly with its weight; both maximum forms agree at g = 0.
pub fn dark_family() -> Check {
    wrap(5, NAMES[4], || {
        let (mut dark, mut lin, mut forms) = (0.0f64, 0.0f64, 0.0f64);
        let mut at_zero = 0;
        // condition number and temperatures of the worst draw
        let mut worst = (0.0, 0.0, 0.0);
        for s in scenarios(Regime::ResonantDegenerate, 5000, PER_REGIME)? {
            let (rates, residual) = solve(&s, 0.0).map_err(err)?;
            dark = dark.max((rates.total() * Vector4::new(0.0, 1.0, 0.0, 0.0)).abs().max());
            let qmax = max_heat_current_degenerate(&s).map_err(err)?;
            for j in 0..=10 {
                let w = j as f64 / 10.0;
                let (_, rep) = evaluate(&s, w).map_err(err)?;
                let r = (rep.left.total / qmax[0] - (1.0 - w)).abs();
                if r > lin {
                    lin = r;
                    let kappa = current_condition(&rates.left.total, residual.state().vector(), &s.eigensystem().lambdas);
                    worst = (kappa, s.left.temperature, s.right.temperature);
                }
            }
        }
        // uncoupled limit of the degenerate regime, branch rates shared
        let mut rng = ChaCha8Rng::seed_from_u64(5001);
        for _ in 0..PER_REGIME {
            let w = rng.random_range(1.0..5.0);
            let cfg = ScenarioConfig::flat(w, w, 0.0, rng.random_range(1.0..200.0), rng.random_range(1.0..200.0), rng.random_range(1e-3..1e-2));
            let s = cfg.build().map_err(err)?;
            let a = max_heat_current_uncoupled(&s).map_err(err)?;
            let b = max_heat_current_w(&s).map_err(err)?;
            forms = forms.max((a[0] - b[0]).abs()).max((a[1] - b[1]).abs());
            at_zero += 1;
        }
        Ok((
            dark == 0.0 && lin <= 1e-12 && forms <= 1e-12,
            format!(
                "max |M (0,1,0,0)| = {dark:.1e} (exact 0), max |Q_L/Qmax - (1 - rho22)| = {lin:.2e} at 11 points \
                 (worst draw T_L = {:.2}, T_R = {:.2}, current condition number {:.1e}), \
                 max |uncoupled - W form| = {forms:.2e} over {at_zero} g = 0 scenarios",
                worst.1, worst.2, worst.0
            ),
        ))
    })
}

/// Direct plus cross adds up; equal-rate direct equals independent; the cross current is inverse.
pub fn channels() -> Check {
    wrap(6, NAMES[5], || {
        let mut sum = 0.0f64;
        for (k, regime) in [Regime::DetunedCoupled, Regime::ResonantCoupled, Regime::ResonantDegenerate, Regime::UncoupledDetuned]
            .into_iter()
            .enumerate()
        {
            for s in scenarios(regime, 6000 + k as u64, PER_REGIME)? {
                let s = s.with_topology(Topology::Common).map_err(err)?;
                let (res, _) = evaluate(&s, 0.3).map_err(err)?;
                let rep = channel_decomposition(&s, &res.state()).map_err(err)?;
                for c in [rep.left, rep.right] {
                    sum = sum.max((c.direct + c.cross - c.total).abs());
                }
            }
        }

        // 20 x 20 grid: random equal-rate detuned parameter sets against random T_L > T_R
        let mut rng = ChaCha8Rng::seed_from_u64(6100);
        let (mut direct_vs_ind, mut max_cross, mut negative, mut cells) = (0.0f64, f64::NEG_INFINITY, 0usize, 0usize);
        for _ in 0..20 {
            let w1 = rng.random_range(1.0..5.0);
            let w2 = w1 * (1.0 + rng.random_range(0.1..0.6) * if rng.random_bool(0.5) { 1.0 } else { -1.0 });
            let g = rng.random_range(0.05..2.0);
            let gamma = rng.random_range(1e-3..1e-2);
            let tr = rng.random_range(1.0..100.0);
            for _ in 0..20 {
                let tl = rng.random_range(tr..200.0);
                let s = ScenarioConfig::flat(w1, w2, g, tl, tr, gamma).build().map_err(err)?;
                let (_, c) = evaluate(&s, 0.0).map_err(err)?;
                let (_, i) = evaluate(&s.with_topology(Topology::Independent).map_err(err)?, 0.0).map_err(err)?;
                direct_vs_ind = direct_vs_ind.max((c.left.direct - i.left.total).abs());
                max_cross = max_cross.max(c.left.cross);
                negative += usize::from(c.left.cross < 0.0);
                cells += 1;
            }
        }

        let mut dark = 0.0f64;
        for s in scenarios(Regime::ResonantDegenerate, 6200, PER_REGIME)? {
            if s.topology != Topology::Common {
                continue;
            }
            let (res, _) = evaluate(&s, 1.0).map_err(err)?;
            let rep = channel_decomposition(&s, &res.state()).map_err(err)?;
            for c in [rep.left, rep.right] {
                dark = dark.max((c.direct + c.cross).abs());
            }
        }
        Ok((
            sum <= 1e-12 && direct_vs_ind <= 1e-12 && negative == cells && dark <= 1e-12,
            format!(
                "max |Qd + Qc - Q| = {sum:.2e}; equal-rate max |Qd - Q^I| = {direct_vs_ind:.2e}; \
                 Q_L^c < 0 in {negative}/{cells} grid cells (max Q_L^c = {max_cross:.2e}); \
                 at rho22 = 1 max |Qd + Qc| = {dark:.2e}"
            ),
        ))
    })
}

/// Ratio `γ₋/γ₊` at which `ΔQ_L` changes sign at the preset parameters.
pub fn gamma_ratio_threshold() -> Result<Vec<f64>, String> {
    let s = fig_scenario()?;
    let gamma_plus = 0.003;
    let ratios: Vec<f64> = (0..=400).map(|k| 0.05 + 1.95 * k as f64 / 400.0).collect();
    let mut delta = Vec::with_capacity(ratios.len());
    for &r in &ratios {
        let t = RateTable::per_branch(r * gamma_plus, gamma_plus);
        let c = s.with_rates(t, t).map_err(err)?;
        let (_, qc) = evaluate(&c, 0.0).map_err(err)?;
        let (_, qi) = evaluate(&c.with_topology(Topology::Independent).map_err(err)?, 0.0).map_err(err)?;
        delta.push(qi.left.total - qc.left.total);
    }
    Ok(zero_crossings(&ratios, &delta))
}

pub fn gamma_boundary() -> Check {
    wrap(7, NAMES[6], || {
        let crossings = gamma_ratio_threshold()?;
        let text: Vec<String> = crossings.iter().map(|x| format!("{x:.4}")).collect();
        let ok = crossings.len() == 1 && (crossings[0] - 0.42).abs() <= 0.05;
        Ok((
            ok,
            format!("sign change of Delta Q_L at gamma_-/gamma_+ = [{}] (expected 0.42 +- 0.05)", text.join(", ")),
        ))
    })
}

/// Plateaus of the modulator protocol and conservation of the dark weight between pulses.
pub fn staircase() -> Check {
    wrap(8, NAMES[7], || {
        let cfg = Preset::Fig4.config();
        let m = cfg.modulate.clone().unwrap_or_default();
        let s = cfg.scenario().map_err(err)?;
        let sched = PulseSchedule::from_targets(&m.targets, m.rabi_frequency, m.lead_in, m.window, m.sample_dt).map_err(err)?;
        let ts = run_schedule(&s, &sched, &PopulationVector::dark()).map_err(err)?;
        let qmax = max_heat_current_degenerate(&s).map_err(err)?[0];
        let expected = [0.0, 0.3, 0.7, 1.0, 0.8, 0.6];
        let got: Vec<f64> = ts.plateaus.iter().map(|p| p.q_left / qmax).collect();
        // levels are fractions of Qmax, so Qmax is the scale (the first level is zero)
        let dev = got.iter().zip(expected).map(|(g, e)| (g - e).abs()).fold(0.0f64, f64::max);
        let mut drift = 0.0f64;
        for pair in ts.samples.windows(2) {
            if pair[0].phase == Phase::Free && pair[1].phase == Phase::Free {
                drift = drift.max((pair[1].populations[1] - pair[0].populations[1]).abs());
            }
        }
        let levels: Vec<String> = got.iter().map(|x| format!("{x:.5}")).collect();
        Ok((
            got.len() == expected.len() && dev <= 1e-3 && drift <= 1e-10,
            format!(
                "plateaus / Qmax = [{}], max deviation {dev:.2e} of Qmax (tol 1e-3); \
                 max rho22 drift in free evolution = {drift:.2e}",
                levels.join(", ")
            ),
        ))
    })
}

/// Closed-form Rabi populations against direct integration of the driven two-level system.
pub fn rabi() -> Check {
    wrap(9, NAMES[8], || {
        let mut rng = ChaCha8Rng::seed_from_u64(9000);
        let (mut worst, mut transfer) = (0.0f64, 0.0f64);
        for _ in 0..20 {
            let a = rng.random_range(0.0..1.0);
            let b = rng.random_range(0.0..(1.0 - a));
            let omega = rng.random_range(0.2..3.0);
            let period = 2.0 * std::f64::consts::PI / omega;
            for k in 0..=40 {
                let t = 2.0 * period * k as f64 / 40.0;
                let (ca, cb) = rabi_populations(a, b, omega, t);
                let (na, nb) = rabi_numeric(a, b, omega, t).map_err(err)?;
                worst = worst.max((ca - na).abs()).max((cb - nb).abs());
            }
            let half = std::f64::consts::PI / omega;
            let (pa, pb) = rabi_populations(a, b, omega, half);
            let (na, nb) = rabi_numeric(a, b, omega, half).map_err(err)?;
            transfer = transfer.max((pa - b).abs()).max((pb - a).abs()).max((na - b).abs()).max((nb - a).abs());
        }
        Ok((
            worst <= 1e-8 && transfer <= 1e-8,
            format!("max |closed - numeric| over two periods = {worst:.2e}; pi-pulse swap error = {transfer:.2e}"),
        ))
    })
}

/// Least-squares line through `(x, y)`; returns the largest residual.
fn line_residual(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    x.iter().zip(y).map(|(a, b)| (b - (my + slope * (a - mx))).abs()).fold(0.0, f64::max)
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// COA closed forms against the generic definition, linearity in the dark weight, and the trend claim.
pub fn coa() -> Check {
    wrap(10, NAMES[9], || {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000);
        let (mut worst, mut range_ok, mut states) = (0.0f64, true, 0usize);
        let mut linear = 0.0f64;
        for (k, regime) in Regime::ALL.into_iter().enumerate() {
            for s in scenarios(regime, 10_100 + k as u64, PER_REGIME)? {
                let eig = s.eigensystem();
                if regime == Regime::ResonantDegenerate {
                    let xs: Vec<f64> = (0..=10).map(|j| j as f64 / 10.0).collect();
                    let mut ys = Vec::new();
                    for &w in &xs {
                        let (_, r) = solve(&s, w).map_err(err)?;
                        let g = coa_general(&bare_state(&r.state(), eig)).map_err(err)?;
                        worst = worst.max((g - coa_resonant_closed(w, &s).map_err(err)?).abs());
                        range_ok &= (0.0..=1.0 + 1e-12).contains(&g);
                        ys.push(g);
                        states += 1;
                    }
                    linear = linear.max(line_residual(&xs, &ys));
                    continue;
                }
                for i in 0..10 {
                    let state = if i == 0 {
                        solve(&s, 0.0).map_err(err)?.1.state()
                    } else {
                        random_populations(&mut rng)
                    };
                    let g = coa_general(&bare_state(&state, eig)).map_err(err)?;
                    worst = worst.max((g - coa_detuned_closed(&state, eig)).abs());
                    range_ok &= (0.0..=1.0 + 1e-12).contains(&g);
                    states += 1;
                }
            }
        }

        let s = Preset::Fig6.config().scenario().map_err(err)?;
        let g = presets::FIG6_T_LEFT;
        let rows = sweep(&s, &[AxisSpec::linspace(SweepAxis::TemperatureLeft, g.start, g.stop, g.points).map_err(err)?], 0.0)
            .map_err(err)?;
        let mut mismatched = Vec::new();
        for (k, pair) in rows.windows(2).enumerate() {
            let dc = pair[1].coa - pair[0].coa;
            let dq = pair[1].report.left.total - pair[0].report.left.total;
            if sign(dc) != sign(dq) {
                mismatched.push(k);
            }
        }
        Ok((
            worst <= 1e-9 && range_ok && linear <= 1e-12 && mismatched.is_empty(),
            format!(
                "{states} states; max |closed - generic| = {worst:.2e}; resonant line residual = {linear:.2e}; \
                 trend mismatches on the T_L grid: {}/{}",
                mismatched.len(),
                rows.len() - 1
            ),
        ))
    })
}

/// Weak-coupling limit of the detuned current and topology independence at g = 0.
pub fn limits() -> Check {
    wrap(11, NAMES[10], || {
        let mut rel = 0.0f64;
        let mut topo = 0.0f64;
        let mut cases: Vec<ScenarioF64> = vec![fig_scenario()?];
        for s in scenarios(Regime::DetunedCoupled, 11_001, PER_REGIME)? {
            cases.push(s.with_topology(Topology::Common).map_err(err)?);
        }
        for s in &cases {
            let mut p = s.params;
            p.g = 1e-6;
            let weak = s.with_params(p).map_err(err)?;
            p.g = 0.0;
            let zero = s.with_params(p).map_err(err)?;
            let (_, rep) = evaluate(&weak, 0.0).map_err(err)?;
            let q0 = uncoupled_current(&zero, ReservoirLabel::Left).map_err(err)?;
            rel = rel.max(((rep.left.total - q0) / q0).abs());
            let (_, c) = evaluate(&zero, 0.0).map_err(err)?;
            let (_, i) = evaluate(&zero.with_topology(Topology::Independent).map_err(err)?, 0.0).map_err(err)?;
            topo = topo.max((c.left.total - i.left.total).abs()).max((c.right.total - i.right.total).abs());
            let closed = heat_current_closed(&zero).map_err(err)?;
            topo = topo.max((closed.left.total - c.left.total).abs());
        }
        Ok((
            rel <= 1e-4 && topo <= 1e-12,
            format!(
                "{} scenarios; max relative |Q(g=1e-6) - Q_uncoupled| = {rel:.2e} (tol 1e-4); \
                 max |Q^C - Q^I| at g = 0 = {topo:.2e} (tol 1e-12)",
                cases.len()
            ),
        ))
    })
}

/// Renders every preset in a pool of `threads` workers.
pub fn render_presets(threads: usize) -> Result<Vec<String>, String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(err)?;
    pool.install(|| {
        Preset::ALL
            .into_iter()
            .map(|p| {
                let r = run_preset(p).map_err(err)?;
                let mut text = r.main.to_csv(DEFAULT_PRECISION);
                for (_, t) in &r.extras {
                    text.push_str(&t.to_csv(DEFAULT_PRECISION));
                }
                Ok(text)
            })
            .collect()
    })
}

/// Preset tables are byte-identical across repeated runs and thread counts.
pub fn determinism() -> Check {
    wrap(12, NAMES[11], || {
        let runs = [render_presets(1)?, render_presets(4)?, render_presets(1)?, render_presets(4)?];
        let same = runs.iter().all(|r| r == &runs[0]);
        let bytes: usize = runs[0].iter().map(String::len).sum();
        Ok((
            same,
            format!("{} presets, {bytes} bytes, 2 runs x threads {{1, 4}} in process", Preset::ALL.len()),
        ))
    })
}

pub type CheckFn = fn() -> Check;

pub const ALL: [CheckFn; 12] = [
    oracle_equivalence,
    equilibrium,
    conservation,
    equal_rate,
    dark_family,
    channels,
    gamma_boundary,
    staircase,
    rabi,
    coa,
    limits,
    determinism,
];

/// Runs every check in order.
pub fn run_all() -> Vec<Check> {
    ALL.iter().map(|f| f()).collect()
}

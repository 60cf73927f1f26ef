//! Dark-state heat-current modulator.
//!
//! A resonant laser drives one eigen-transition (by default `|2⟩ ↔ |3⟩`)
//! to set the dark population `ρ₂₂`; between pulses the populations relax
//! under the dissipative rate matrix while `ρ₂₂` stays put. Pulses are
//! treated as instantaneous on the dissipative time scale, so dissipation
//! is frozen while driving, and the 2–3 coherence left behind by a pulse is
//! dropped (it does not feed back into populations or currents under the
//! secular generator). Both approximations are reported in
//! [`ApproximationFlags`].

use std::fmt;

use nalgebra::{Matrix4, Vector4};

use crate::dissipators::rates::rate_matrix;
use crate::dissipators::reservoir::ReservoirLabel;
use crate::dissipators::scenario::{Regime, Scenario};
use crate::error::{Error, Result};
use crate::model::EigenSystem;
use crate::ode::{Dopri5, Tolerances};
use crate::scalar::Real;
use crate::steadystate::PopulationVector;
use crate::transport::heat_current;

/// Eigenlevels driven by default (1-based).
pub const DEFAULT_TRANSITION: (usize, usize) = (2, 3);

/// `ρ_a(t), ρ_b(t)` for a resonant drive starting from `ρ_a(0), ρ_b(0)`.
pub fn rabi_populations<T: Real>(rho_a: T, rho_b: T, omega_r: T, t: T) -> (T, T) {
    // ρ_b(t) = (A⁻/2) cos Ωt + A⁺/2 with A^± = ρ_b ± ρ_a, written as a transfer
    let moved = (rho_a - rho_b) * (T::one() - (omega_r * t).cos()) / T::lit(2.0);
    (rho_a - moved, rho_b + moved)
}

/// Smallest `t ≥ 0` after which the driven level holds `target`.
pub fn solve_pulse_duration<T: Real>(target: T, rho_a: T, rho_b: T, omega_r: T) -> Result<T> {
    let (lo, hi) = (rho_a.min(rho_b), rho_a.max(rho_b));
    let tol = T::tol(1e-12);
    let unreachable = || Error::UnreachableTarget {
        target: target.as_f64(),
        min: lo.as_f64(),
        max: hi.as_f64(),
    };
    if (target - rho_a).abs() <= tol {
        return Ok(T::zero());
    }
    if target < lo - tol || target > hi + tol || omega_r <= T::zero() {
        return Err(unreachable());
    }
    let ap = rho_a + rho_b;
    let am = rho_b - rho_a;
    let arg = ((ap - T::lit(2.0) * target) / am).max(-T::one()).min(T::one());
    Ok(arg.acos() / omega_r)
}

/// Driven two-level von Neumann equation integrated numerically; returns
/// `ρ_a(t), ρ_b(t)` for an initially diagonal pair.
pub fn rabi_numeric<T: Real>(rho_a: T, rho_b: T, omega_r: T, t: T) -> Result<(T, T)> {
    let half = omega_r / T::lit(2.0);
    // (ρ_aa, ρ_bb, Re ρ_ab, Im ρ_ab)
    let f = |_t: T, y: &Vector4<T>| Vector4::new(-omega_r * y[3], omega_r * y[3], T::zero(), half * (y[0] - y[1]));
    let y = crate::ode::integrate(f, T::zero(), Vector4::new(rho_a, rho_b, T::zero(), T::zero()), t, Tolerances {
        rtol: T::tol(1e-12),
        atol: T::tol(1e-14),
        min_step: T::lit(1e-14),
        max_step: T::one() / omega_r.max(T::tol(1e-300)),
    })?;
    Ok((y[0], y[1]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseDuration<T> {
    Fixed(T),
    /// Drive until the first level of the transition holds this population.
    Target(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEvent<T> {
    pub start_time: T,
    pub duration: PulseDuration<T>,
    pub rabi_frequency: T,
    /// 1-based eigenlevels.
    pub transition: (usize, usize),
}

impl<T: Real> PulseEvent<T> {
    pub fn to_target(start_time: T, target: T, rabi_frequency: T) -> Self {
        Self {
            start_time,
            duration: PulseDuration::Target(target),
            rabi_frequency,
            transition: DEFAULT_TRANSITION,
        }
    }

    /// Upper bound on the pulse length; a target pulse never exceeds half a Rabi period.
    pub fn max_duration(&self) -> T {
        match self.duration {
            PulseDuration::Fixed(d) => d,
            PulseDuration::Target(_) => T::pi() / self.rabi_frequency,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.transition;
        if a == b || !(1..=4).contains(&a) || !(1..=4).contains(&b) {
            return Err(Error::InvalidSchedule(format!("transition ({a},{b}) must be two distinct levels in 1..4")));
        }
        if !(self.rabi_frequency >= T::zero()) || !self.start_time.is_finite() || self.start_time < T::zero() {
            return Err(Error::InvalidSchedule("start time and Rabi frequency must be finite and nonnegative".into()));
        }
        match self.duration {
            PulseDuration::Fixed(d) if !(d >= T::zero()) => Err(Error::InvalidSchedule("negative pulse duration".into())),
            PulseDuration::Target(x) if !(x >= T::zero() && x <= T::one()) => {
                Err(Error::InvalidSchedule(format!("target {} outside [0, 1]", x.as_f64())))
            }
            PulseDuration::Target(_) if self.rabi_frequency == T::zero() => {
                Err(Error::InvalidSchedule("target pulse needs a positive Rabi frequency".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule<T> {
    pub events: Vec<PulseEvent<T>>,
    /// Free evolution after the last pulse.
    pub relaxation_window: T,
    /// Spacing of the recorded samples.
    pub sample_dt: T,
}

impl<T: Real> PulseSchedule<T> {
    pub fn new(events: Vec<PulseEvent<T>>, relaxation_window: T, sample_dt: T) -> Result<Self> {
        let s = Self {
            events,
            relaxation_window,
            sample_dt,
        };
        s.validate()?;
        Ok(s)
    }

    /// Target pulses spaced by `window` of free evolution plus half a Rabi period.
    pub fn from_targets(targets: &[T], omega_r: T, lead_in: T, window: T, sample_dt: T) -> Result<Self> {
        let period = window + T::pi() / omega_r;
        let events = targets
            .iter()
            .enumerate()
            .map(|(k, &x)| PulseEvent::to_target(lead_in + period * T::lit(k as f64), x, omega_r))
            .collect();
        Self::new(events, window, sample_dt)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relaxation_window >= T::zero()) {
            return Err(Error::InvalidSchedule("negative relaxation window".into()));
        }
        if !(self.sample_dt > T::zero()) {
            return Err(Error::InvalidSchedule("sample spacing must be positive".into()));
        }
        for e in &self.events {
            e.validate()?;
        }
        for w in self.events.windows(2) {
            if w[1].start_time <= w[0].start_time {
                return Err(Error::InvalidSchedule("start times must increase strictly".into()));
            }
            if w[0].start_time + w[0].max_duration() > w[1].start_time {
                return Err(Error::InvalidSchedule(format!(
                    "pulse at t={} may overlap the next one",
                    w[0].start_time.as_f64()
                )));
            }
        }
        Ok(())
    }

    pub fn end_time(&self) -> T {
        match self.events.last() {
            Some(e) => e.start_time + e.max_duration() + self.relaxation_window,
            None => self.relaxation_window,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Drive,
    Free,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Drive => "drive",
            Phase::Free => "free",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<T: Real> {
    pub t: T,
    pub populations: Vector4<T>,
    pub q_left: T,
    pub q_right: T,
    pub phase: Phase,
}

/// Populations and current at the end of a free-evolution stretch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau<T> {
    pub t: T,
    pub rho22: T,
    pub q_left: T,
    /// `‖𝓜ϱ‖` at the end of the stretch.
    pub residual: T,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ApproximationFlags {
    /// Dissipation ignored while a pulse acts.
    pub frozen_dissipation: bool,
    /// A pulse ended with a nonzero coherence that was dropped.
    pub coherence_discarded: bool,
    /// Events whose target lay outside the Rabi orbit and were applied as a
    /// direct population reassignment instead.
    pub reassigned: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T: Real> {
    pub samples: Vec<Sample<T>>,
    pub plateaus: Vec<Plateau<T>>,
    pub flags: ApproximationFlags,
}

fn free_generator<T: Real>(m: Matrix4<T>) -> impl Fn(T, &Vector4<T>) -> Vector4<T> {
    move |_t, y| m * y
}

/// Tolerances whose step cap keeps `h·max|𝓜_pp|` at one.
fn free_tolerances<T: Real>(m: &Matrix4<T>) -> Tolerances<T> {
    let rate = m.diagonal().abs().max();
    let tol = Tolerances::default();
    if rate > T::zero() {
        tol.with_max_step(T::one() / rate)
    } else {
        tol
    }
}

/// Populations after free evolution for time `t` under `m`.
pub fn evolve_free<T: Real>(m: &Matrix4<T>, state0: &PopulationVector<T>, t: T) -> Result<PopulationVector<T>> {
    let mut s = Dopri5::new(T::zero(), *state0.vector(), free_tolerances(m));
    let y = *s.advance(free_generator(*m), t)?;
    PopulationVector::new(y)
}

/// Free evolution until `‖𝓜ϱ‖ < residual_tol`; returns the state and the elapsed time.
pub fn relax_to_steady<T: Real>(m: &Matrix4<T>, state0: &PopulationVector<T>, residual_tol: T, max_time: T) -> Result<(PopulationVector<T>, T)> {
    let tol = free_tolerances(m);
    let chunk = tol.max_step.min(max_time) * T::lit(50.0);
    let mut ode = Dopri5::new(T::zero(), *state0.vector(), tol);
    while (m * ode.y).norm() >= residual_tol {
        if ode.t >= max_time {
            return Err(Error::Invariant(format!(
                "no convergence by t = {} (residual {:e})",
                max_time.as_f64(),
                (m * ode.y).norm().as_f64()
            )));
        }
        let t = (ode.t + chunk).min(max_time);
        ode.advance(free_generator(*m), t)?;
    }
    Ok((PopulationVector::new(ode.y)?, ode.t))
}

/// Sets level `a` to `target`, rescaling the other three proportionally.
fn reassign<T: Real>(v: &Vector4<T>, a: usize, target: T) -> Result<Vector4<T>> {
    let rest = T::one() - v[a];
    let mut out = *v;
    if rest <= T::zero() {
        // everything sits on level a: spread the remainder evenly
        let share = (T::one() - target) / T::lit(3.0);
        out.fill(share);
    } else {
        let scale = (T::one() - target) / rest;
        out *= scale;
    }
    out[a] = target;
    Ok(out)
}

struct Runner<'a, T: Real> {
    eig: &'a EigenSystem<T>,
    m: Matrix4<T>,
    m_left: Matrix4<T>,
    m_right: Matrix4<T>,
    dt: T,
    samples: Vec<Sample<T>>,
}

impl<T: Real> Runner<'_, T> {
    fn record(&mut self, t: T, y: &Vector4<T>, phase: Phase) -> Result<PopulationVector<T>> {
        let p = PopulationVector::new(*y)?;
        self.samples.push(Sample {
            t,
            populations: *y,
            q_left: heat_current(&self.m_left, &p, self.eig),
            q_right: heat_current(&self.m_right, &p, self.eig),
            phase,
        });
        Ok(p)
    }

    fn free(&mut self, t0: T, t1: T, y0: Vector4<T>) -> Result<Vector4<T>> {
        let mut ode = Dopri5::new(t0, y0, free_tolerances(&self.m));
        let mut k = 1usize;
        loop {
            let t = (t0 + self.dt * T::lit(k as f64)).min(t1);
            let y = *ode.advance(free_generator(self.m), t)?;
            self.record(t, &y, Phase::Free)?;
            if t >= t1 {
                return Ok(y);
            }
            k += 1;
        }
    }

    fn plateau(&self, y: &Vector4<T>) -> Plateau<T> {
        let s = self.samples.last().expect("plateau after at least one sample");
        Plateau {
            t: s.t,
            rho22: y[1],
            q_left: s.q_left,
            residual: (self.m * y).norm(),
        }
    }
}

/// Runs a pulse schedule in the degenerate regime from `initial`.
pub fn run_schedule<T: Real>(scenario: &Scenario<T>, schedule: &PulseSchedule<T>, initial: &PopulationVector<T>) -> Result<TimeSeries<T>> {
    scenario.require(&[Regime::ResonantDegenerate], "modulator")?;
    schedule.validate()?;
    let rates = rate_matrix(scenario)?;
    let mut run = Runner {
        eig: scenario.eigensystem(),
        m: rates.total(),
        m_left: rates.reservoir(ReservoirLabel::Left).total,
        m_right: rates.reservoir(ReservoirLabel::Right).total,
        dt: schedule.sample_dt,
        samples: Vec::new(),
    };
    let mut flags = ApproximationFlags::default();
    let mut plateaus = Vec::new();
    let mut y = *initial.vector();
    let mut t = T::zero();
    run.record(t, &y, Phase::Free)?;

    let first = schedule.events.first().map(|e| e.start_time).unwrap_or(schedule.relaxation_window);
    if first > t {
        y = run.free(t, first, y)?;
        plateaus.push(run.plateau(&y));
        t = first;
    }

    for (k, ev) in schedule.events.iter().enumerate() {
        let (a, b) = (ev.transition.0 - 1, ev.transition.1 - 1);
        let (ra, rb) = (y[a], y[b]);
        let duration = match ev.duration {
            PulseDuration::Fixed(d) => Some(d),
            PulseDuration::Target(x) => match solve_pulse_duration(x, ra, rb, ev.rabi_frequency) {
                Ok(d) => Some(d),
                Err(Error::UnreachableTarget { .. }) => {
                    log::warn!("pulse {k}: target {} unreachable, reassigning populations", x.as_f64());
                    flags.reassigned.push(k);
                    y = reassign(&y, a, x)?;
                    run.record(ev.start_time, &y, Phase::Drive)?;
                    None
                }
                Err(e) => return Err(e),
            },
        };
        let end = match duration {
            Some(d) => {
                if d > T::zero() {
                    flags.frozen_dissipation = true;
                    if (ev.rabi_frequency * d).sin().abs() > T::tol(1e-12) && ra != rb {
                        flags.coherence_discarded = true;
                    }
                }
                let mut j = 0usize;
                loop {
                    let tau = (run.dt * T::lit(j as f64)).min(d);
                    let (pa, pb) = rabi_populations(ra, rb, ev.rabi_frequency, tau);
                    y[a] = pa;
                    y[b] = pb;
                    run.record(ev.start_time + tau, &y, Phase::Drive)?;
                    if tau >= d {
                        break;
                    }
                    j += 1;
                }
                ev.start_time + d
            }
            None => ev.start_time,
        };
        let next = match schedule.events.get(k + 1) {
            Some(n) => n.start_time,
            None => end + schedule.relaxation_window,
        };
        if next > end {
            y = run.free(end, next, y)?;
        }
        plateaus.push(run.plateau(&y));
        t = next;
    }
    let _ = t;
    Ok(TimeSeries {
        samples: run.samples,
        plateaus,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipators::scenario::Topology;
    use crate::model::SystemParams;
    use crate::steadystate::solve;
    use crate::transport::max_heat_current_degenerate;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn fig4() -> Scenario<f64> {
        Scenario::flat(SystemParams::new(3.0, 3.0, 0.3).unwrap(), Topology::Common, 100.0, 21.0, 0.003).unwrap()
    }

    #[test]
    fn rabi_examples() {
        let (a, b) = rabi_populations(1.0, 0.0, 1.0, PI);
        assert!(a.abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
        let (a, b) = rabi_populations(1.0, 0.0, 1.0, PI / 2.0);
        assert_relative_eq!(a, 0.5, epsilon = 1e-15);
        assert_relative_eq!(b, 0.5, epsilon = 1e-15);
        assert_eq!(rabi_populations(0.3, 0.1, 2.0, 0.0), (0.3, 0.1));
    }

    #[test]
    fn rabi_matches_numeric() {
        let w = 0.5 * PI;
        for k in 0..=16 {
            let t = k as f64 * (2.0 * 2.0 * PI / w) / 16.0;
            let (a, b) = rabi_populations(0.6, 0.1, w, t);
            let (na, nb) = rabi_numeric(0.6, 0.1, w, t).unwrap();
            assert!((a - na).abs() < 1e-8 && (b - nb).abs() < 1e-8);
        }
    }

    #[test]
    fn pulse_durations() {
        let w = 0.5 * PI;
        let d = solve_pulse_duration(0.7, 1.0, 0.0, w).unwrap();
        assert_relative_eq!(d, 0.4f64.acos() / w, epsilon = 1e-15);
        assert_relative_eq!(rabi_populations(1.0, 0.0, w, d).0, 0.7, epsilon = 1e-12);
        assert_eq!(solve_pulse_duration(0.4, 0.4, 0.1, w).unwrap(), 0.0);
        assert!(matches!(solve_pulse_duration(0.8, 0.2, 0.1, w), Err(Error::UnreachableTarget { .. })));
    }

    #[test]
    fn free_evolution_fixed_points() {
        let s = fig4();
        let m = rate_matrix(&s).unwrap().total();
        let dark = PopulationVector::dark();
        let out = evolve_free(&m, &dark, 1e3).unwrap();
        assert_eq!(out.vector(), dark.vector());
        let (_, ss) = solve(&s, 0.4).unwrap();
        let out = evolve_free(&m, &ss.state(), 100.0).unwrap();
        let dev = (out.vector() - ss.state().vector()).abs().max();
        assert!(dev < 1e-12, "{dev:e}");
    }

    #[test]
    fn matches_matrix_exponential() {
        let s = fig4().with_topology(Topology::Independent).unwrap();
        let m = rate_matrix(&s).unwrap().total();
        let y0 = PopulationVector::new(Vector4::new(0.4, 0.3, 0.2, 0.1)).unwrap();
        let t = 20.0;
        let out = evolve_free(&m, &y0, t).unwrap();
        let exact = (m * t).exp() * y0.vector();
        assert!((out.vector() - exact).abs().max() < 1e-8);
    }

    #[test]
    fn staircase() {
        let s = fig4();
        let w = 0.5 * PI;
        let sched = PulseSchedule::from_targets(&[0.7, 0.3, 0.0, 0.2, 0.4], w, 5.0, 50.0, 0.25).unwrap();
        let ts = run_schedule(&s, &sched, &PopulationVector::dark()).unwrap();
        let qmax = max_heat_current_degenerate(&s).unwrap()[0];
        let rho: Vec<f64> = ts.plateaus.iter().map(|p| p.rho22).collect();
        for (r, e) in rho.iter().zip([1.0, 0.7, 0.3, 0.0, 0.2, 0.4]) {
            assert!((r - e).abs() < 1e-10, "{rho:?}");
        }
        for p in &ts.plateaus {
            assert!((p.q_left - (1.0 - p.rho22) * qmax).abs() <= 1e-3 * qmax);
        }
        assert!(ts.flags.frozen_dissipation && ts.flags.coherence_discarded);
        for smp in &ts.samples {
            assert!((smp.populations.sum() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn schedule_validation() {
        let ev = |t| PulseEvent::to_target(t, 0.5, 0.5 * PI);
        assert!(PulseSchedule::new(vec![ev(1.0), ev(1.5)], 10.0, 0.1).is_err());
        assert!(PulseSchedule::new(vec![ev(2.0), ev(1.0)], 10.0, 0.1).is_err());
        let mut bad = ev(1.0);
        bad.transition = (2, 2);
        assert!(PulseSchedule::new(vec![bad], 10.0, 0.1).is_err());
        let empty = PulseSchedule::<f64>::new(vec![], 10.0, 1.0).unwrap();
        let s = fig4();
        let (_, st) = solve(&s, 0.3).unwrap();
        let ts = run_schedule(&s, &empty, &st.state()).unwrap();
        let q0 = ts.samples[0].q_left;
        assert!(ts.samples.iter().all(|x| (x.q_left - q0).abs() < 1e-12));
    }
}

//! Steady-state heat currents, channel decomposition and sweeps.
//!
//! `Q_α = ⟨λ|𝓜_α|ϱ⟩` is positive when energy flows from reservoir `α`
//! into the qubits. Populations are normalized throughout, so the
//! normalization constants of the closed forms are already absorbed.

pub mod sweep;

use nalgebra::{Matrix4, Vector4};

use crate::dissipators::rates::{degenerate_elements, rate_elements, uncoupled_j, RateMatrix};
use crate::dissipators::reservoir::{bose_occupation, spectral_density, Direction, ReservoirLabel};
use crate::dissipators::scenario::{Regime, Scenario, Topology};
use crate::error::{Error, Result};
use crate::model::{Branch, EigenSystem, Qubit};
use crate::scalar::Real;
use crate::steadystate::{element, solve, steady_state_levi_civita, PopulationVector, SteadyStateResult};

/// Magnitude below which a channel current counts as zero for inverse-flow flags.
pub const INVERSE_DEAD_ZONE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirCurrents<T> {
    pub total: T,
    pub direct: T,
    pub cross: T,
}

impl<T: Real> ReservoirCurrents<T> {
    fn opposes(&self, channel: T) -> bool {
        let dz = T::lit(INVERSE_DEAD_ZONE);
        if channel.abs() < dz || self.total.abs() < dz {
            return false;
        }
        (channel > T::zero()) != (self.total > T::zero())
    }

    /// Direct channel flows against the total current.
    pub fn inverse_direct(&self) -> bool {
        self.opposes(self.direct)
    }

    /// Cross channel flows against the total current.
    pub fn inverse_cross(&self) -> bool {
        self.opposes(self.cross)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatCurrentReport<T> {
    pub left: ReservoirCurrents<T>,
    pub right: ReservoirCurrents<T>,
    /// `Q_L^I − Q_L^C`, when both topologies were evaluated.
    pub delta_left: Option<T>,
    pub t_left: T,
    pub t_right: T,
}

impl<T: Real> HeatCurrentReport<T> {
    pub fn reservoir(&self, label: ReservoirLabel) -> &ReservoirCurrents<T> {
        match label {
            ReservoirLabel::Left => &self.left,
            ReservoirLabel::Right => &self.right,
        }
    }

    /// `−Q_L/T_L − Q_R/T_R`; `None` when a reservoir sits at zero temperature.
    pub fn entropy_production(&self) -> Option<T> {
        if self.t_left == T::zero() || self.t_right == T::zero() {
            return None;
        }
        Some(-self.left.total / self.t_left - self.right.total / self.t_right)
    }

    /// Conservation, additivity and the second law, with absolute tolerance `tol`.
    pub fn check_invariants(&self, tol: T) -> Result<()> {
        let sum = self.left.total + self.right.total;
        if sum.abs() > tol {
            return Err(Error::Invariant(format!("Q_L + Q_R = {:e}", sum.as_f64())));
        }
        for (name, c) in [("L", &self.left), ("R", &self.right)] {
            let gap = c.total - c.direct - c.cross;
            if gap.abs() > tol {
                return Err(Error::Invariant(format!("Q_{name} - Q^d - Q^c = {:e}", gap.as_f64())));
            }
        }
        if let Some(s) = self.entropy_production() {
            if s < -tol {
                return Err(Error::Invariant(format!("entropy production {:e} < 0", s.as_f64())));
            }
        }
        Ok(())
    }
}

/// `⟨λ|𝓜_α|ϱ⟩`.
///
/// Evaluated as `Σ_{p<q} (λ_q − λ_p)(𝓜[q,p]ϱ_p − 𝓜[p,q]ϱ_q)`, transition
/// energy times net flux, which equals the inner product because every column
/// of `𝓜_α` sums to zero. The direct inner product sums terms far larger than
/// the result when the two temperatures are close.
pub fn heat_current<T: Real>(m_alpha: &Matrix4<T>, state: &PopulationVector<T>, eig: &EigenSystem<T>) -> T {
    let (l, r) = (&eig.lambdas, state.vector());
    let mut q = T::zero();
    for p in 0..4 {
        for k in p + 1..4 {
            q += (l[k] - l[p]) * (m_alpha[(k, p)] * r[p] - m_alpha[(p, k)] * r[k]);
        }
    }
    q
}

/// `‖𝓜ϱ‖`, zero for a steady state.
pub fn stationarity_residual<T: Real>(total: &Matrix4<T>, state: &PopulationVector<T>) -> T {
    (total * state.vector()).norm()
}

/// [`heat_current`] for one reservoir of `rates`, warning when `state` is not stationary.
pub fn heat_current_checked<T: Real>(
    rates: &RateMatrix<T>,
    label: ReservoirLabel,
    state: &PopulationVector<T>,
    eig: &EigenSystem<T>,
) -> T {
    let r = stationarity_residual(&rates.total(), state);
    if r > T::lit(1e-8) {
        log::warn!("heat current evaluated on a non-stationary state (residual {:e})", r.as_f64());
    }
    heat_current(&rates.reservoir(label).total, state, eig)
}

/// Generic currents from the rate matrices, including the channel split.
pub fn currents<T: Real>(scenario: &Scenario<T>, rates: &RateMatrix<T>, state: &PopulationVector<T>) -> HeatCurrentReport<T> {
    let eig = scenario.eigensystem();
    let side = |label| {
        let c = rates.reservoir(label);
        ReservoirCurrents {
            total: heat_current(&c.total, state, eig),
            direct: heat_current(&c.direct, state, eig),
            cross: heat_current(&c.cross, state, eig),
        }
    };
    HeatCurrentReport {
        left: side(ReservoirLabel::Left),
        right: side(ReservoirLabel::Right),
        delta_left: None,
        t_left: scenario.left.temperature,
        t_right: scenario.right.temperature,
    }
}

/// Steady state and its currents; `rho22` selects the dark-family member when degenerate.
pub fn evaluate<T: Real>(scenario: &Scenario<T>, rho22: T) -> Result<(SteadyStateResult<T>, HeatCurrentReport<T>)> {
    let (rates, result) = solve(scenario, rho22)?;
    let report = currents(scenario, &rates, &result.state());
    Ok((result, report))
}

type ElementPair<T> = ([[T; 4]; 2], [[T; 4]; 2]);

fn sum_elements<T: Real>(scenario: &Scenario<T>) -> Result<ElementPair<T>> {
    let l = rate_elements(scenario, ReservoirLabel::Left)?;
    let r = rate_elements(scenario, ReservoirLabel::Right)?;
    Ok(([l.m, r.m], [l.xi, r.xi]))
}

/// Total current from the arrow-pattern elements `M^{pq}_α` and populations `ϱ`.
fn arrow_current<T: Real>(m: &Matrix4<T>, rho: &Vector4<T>, eig: &EigenSystem<T>) -> T {
    let e = |p, q| element(m, p, q);
    eig.omega_minus * ((e(1, 0) * rho[1] + e(3, 2) * rho[3]) - (e(0, 1) * rho[0] + e(2, 3) * rho[2]))
        + eig.omega_plus * ((e(2, 0) * rho[2] + e(3, 1) * rho[3]) - (e(0, 2) * rho[0] + e(1, 3) * rho[1]))
}

/// Direct current from `M¹..M⁴` of one reservoir.
fn direct_closed<T: Real>(m: &[T; 4], rho: &Vector4<T>, eig: &EigenSystem<T>) -> T {
    let [m1, m2, m3, m4] = *m;
    eig.omega_minus * (m3 * (rho[1] + rho[3]) - m1 * (rho[0] + rho[2]))
        + eig.omega_plus * (m4 * (rho[2] + rho[3]) - m2 * (rho[0] + rho[1]))
}

/// Cross current from `Ξ¹..Ξ⁴` of one reservoir.
fn cross_closed<T: Real>(xi: &[T; 4], rho: &Vector4<T>, eig: &EigenSystem<T>) -> T {
    let [x1, x2, x3, x4] = *xi;
    eig.omega_minus * (x3 * (rho[1] - rho[3]) - x1 * (rho[0] - rho[2]))
        + eig.omega_plus * (x2 * (rho[0] - rho[1]) - x4 * (rho[2] - rho[3]))
}

/// Per-qubit current of uncoupled qubits:
/// `Σ_m ω_m (𝕁^{m−}_α 𝕁^{m+} − 𝕁^{m+}_α 𝕁^{m−}) / (𝕁^{m+} + 𝕁^{m−})`.
pub fn uncoupled_current<T: Real>(scenario: &Scenario<T>, label: ReservoirLabel) -> Result<T> {
    let two = T::lit(2.0);
    let mut q = T::zero();
    for m in Qubit::ALL {
        let b = scenario.natural_branch(m);
        let w = match m {
            Qubit::One => scenario.params.omega1,
            Qubit::Two => scenario.params.omega2,
        };
        let jj = |res, d| spectral_density(res, m, m, b, w, d).map(|x| -two * x);
        let (mut jp, mut jm) = (T::zero(), T::zero());
        let (mut jp_a, mut jm_a) = (T::zero(), T::zero());
        for l in ReservoirLabel::ALL {
            let res = scenario.reservoir(l);
            let p = jj(res, Direction::Absorption)?;
            let n = jj(res, Direction::Emission)?;
            jp += p;
            jm += n;
            if l == label {
                jp_a = p;
                jm_a = n;
            }
        }
        let den = jp + jm;
        if den != T::zero() {
            q += w * (jm_a * jp - jp_a * jm) / den;
        }
    }
    Ok(q)
}

/// Regime-specific closed forms for a unique steady state.
pub fn heat_current_closed<T: Real>(scenario: &Scenario<T>) -> Result<HeatCurrentReport<T>> {
    let eig = scenario.eigensystem();
    let regime = scenario.regime();
    let per_side: [ReservoirCurrents<T>; 2] = match (regime, scenario.topology) {
        (Regime::ResonantDegenerate, _) => {
            return Err(Error::RegimeMismatch(
                "degenerate steady state: use max_heat_current_degenerate or channel_closed_degenerate".into(),
            ))
        }
        (Regime::UncoupledDetuned | Regime::UncoupledIndependent, _) => {
            let mut out = [ReservoirCurrents {
                total: T::zero(),
                direct: T::zero(),
                cross: T::zero(),
            }; 2];
            for (k, l) in ReservoirLabel::ALL.into_iter().enumerate() {
                let q = uncoupled_current(scenario, l)?;
                out[k] = ReservoirCurrents {
                    total: q,
                    direct: q,
                    cross: T::zero(),
                };
            }
            out
        }
        (_, Topology::Independent) => {
            let (m, _) = sum_elements(scenario)?;
            let s = |k: usize| m[0][k] + m[1][k];
            let (m1, m2, m3, m4) = (s(0), s(1), s(2), s(3));
            let rho = Vector4::new(m3 * m4, m1 * m4, m2 * m3, m1 * m2);
            let rho = PopulationVector::from_unnormalized(rho)?;
            let mut out = [ReservoirCurrents {
                total: T::zero(),
                direct: T::zero(),
                cross: T::zero(),
            }; 2];
            for k in 0..2 {
                let q = direct_closed(&m[k], rho.vector(), eig);
                out[k] = ReservoirCurrents {
                    total: q,
                    direct: q,
                    cross: T::zero(),
                };
            }
            out
        }
        (_, Topology::Common) => {
            let rates = crate::dissipators::rates::rate_matrix(scenario)?;
            let rho = steady_state_levi_civita(&rates.total())?;
            let (m, xi) = sum_elements(scenario)?;
            let mut out = [ReservoirCurrents {
                total: T::zero(),
                direct: T::zero(),
                cross: T::zero(),
            }; 2];
            for (k, l) in ReservoirLabel::ALL.into_iter().enumerate() {
                out[k] = ReservoirCurrents {
                    total: arrow_current(&rates.reservoir(l).total, rho.vector(), eig),
                    direct: direct_closed(&m[k], rho.vector(), eig),
                    cross: cross_closed(&xi[k], rho.vector(), eig),
                };
            }
            out
        }
    };
    Ok(HeatCurrentReport {
        left: per_side[0],
        right: per_side[1],
        delta_left: None,
        t_left: scenario.left.temperature,
        t_right: scenario.right.temperature,
    })
}

fn degenerate_w<T: Real>(scenario: &Scenario<T>) -> Result<[[T; 4]; 2]> {
    scenario.require(&[Regime::ResonantDegenerate], "degenerate heat current")?;
    let eig = scenario.eigensystem();
    Ok([
        degenerate_elements(&scenario.left, eig)?,
        degenerate_elements(&scenario.right, eig)?,
    ])
}

/// `Q^{C,max}_α` for (left, right): the current of the residual state (`ρ₂₂ = 0`).
/// Uses the uncoupled form when `g = 0` and the `W̃` form otherwise.
pub fn max_heat_current_degenerate<T: Real>(scenario: &Scenario<T>) -> Result<[T; 2]> {
    if scenario.params.is_uncoupled() {
        max_heat_current_uncoupled(scenario)
    } else {
        max_heat_current_w(scenario)
    }
}

/// `Q^{C,max}_α = ω₋W̃¹(W̃⁴_αW̃³ − W̃³_αW̃⁴)/Ñ + ω₊W̃⁴(W̃²_αW̃¹ − W̃¹_αW̃²)/Ñ`.
pub fn max_heat_current_w<T: Real>(scenario: &Scenario<T>) -> Result<[T; 2]> {
    let w = degenerate_w(scenario)?;
    let eig = scenario.eigensystem();
    let s = |k: usize| w[0][k] + w[1][k];
    let (w1, w2, w3, w4) = (s(0), s(1), s(2), s(3));
    let n = w2 * w4 + w1 * w4 + w1 * w3;
    let q = |a: &[T; 4]| {
        eig.omega_minus * w1 / n * (a[3] * w3 - a[2] * w4) + eig.omega_plus * w4 / n * (a[1] * w1 - a[0] * w2)
    };
    Ok([q(&w[0]), q(&w[1])])
}

/// `g = 0` form `2ω(𝕁⁺ + 𝕁⁻)(𝕁⁻_α𝕁⁺ − 𝕁⁺_α𝕁⁻)/(𝕁⁻² + 𝕁⁻𝕁⁺ + 𝕁⁺²)`.
pub fn max_heat_current_uncoupled<T: Real>(scenario: &Scenario<T>) -> Result<[T; 2]> {
    scenario.require(&[Regime::ResonantDegenerate], "max_heat_current_uncoupled")?;
    if !scenario.params.is_uncoupled() {
        return Err(Error::RegimeMismatch("uncoupled maximum current needs g = 0".into()));
    }
    let eig = scenario.eigensystem();
    let jl = uncoupled_j(&scenario.left, eig, Branch::Plus)?;
    let jr = uncoupled_j(&scenario.right, eig, Branch::Plus)?;
    let (jp, jm) = (jl[0] + jr[0], jl[1] + jr[1]);
    let n = jm * jm + jm * jp + jp * jp;
    let w = scenario.params.omega1;
    let two = T::lit(2.0);
    let q = |ja: [T; 2]| two * w / n * (jp + jm) * (ja[1] * jp - ja[0] * jm);
    Ok([q(jl), q(jr)])
}

/// Degenerate-case currents for dark weight `rho22`, with the channel split.
pub fn channel_closed_degenerate<T: Real>(scenario: &Scenario<T>, rho22: T) -> Result<HeatCurrentReport<T>> {
    let max = max_heat_current_degenerate(scenario)?;
    let w = degenerate_w(scenario)?;
    let eig = scenario.eigensystem();
    let (wm, wp) = (eig.omega_minus, eig.omega_plus);
    let s = |k: usize| w[0][k] + w[1][k];
    let (w1, w2, w3, w4) = (s(0), s(1), s(2), s(3));
    let n = w2 * w4 + w1 * w4 + w1 * w3;
    let one = T::one();
    let two = T::lit(2.0);
    let side = |k: usize| {
        let a = &w[k];
        let f = (one - rho22) / (two * n);
        let dark = rho22 / two * (wm * a[3] - wp * a[0]);
        let direct = f * (wm * (a[3] * w1 * w3 - a[2] * w4 * (w1 + w2)) - wp * (a[0] * w2 * w4 - a[1] * w1 * (w4 + w3))) + dark;
        let cross = f * (wm * (a[3] * w1 * w3 - a[2] * w4 * (w1 - w2)) - wp * (a[0] * w2 * w4 - a[1] * w1 * (w4 - w3))) - dark;
        ReservoirCurrents {
            total: max[k] * (one - rho22),
            direct,
            cross,
        }
    };
    Ok(HeatCurrentReport {
        left: side(0),
        right: side(1),
        delta_left: None,
        t_left: scenario.left.temperature,
        t_right: scenario.right.temperature,
    })
}

/// Direct/cross split on a given state from the generic matrices (common reservoirs only).
pub fn channel_decomposition<T: Real>(scenario: &Scenario<T>, state: &PopulationVector<T>) -> Result<HeatCurrentReport<T>> {
    if scenario.topology != Topology::Common {
        return Err(Error::RegimeMismatch("channel decomposition needs common reservoirs".into()));
    }
    let rates = crate::dissipators::rates::rate_matrix(scenario)?;
    Ok(currents(scenario, &rates, state))
}

/// Left cross current of the equal-rate case in terms of `u(ω) = n̄_R(ω) − n̄_L(ω)`.
pub fn cross_current_equal_rate<T: Real>(scenario: &Scenario<T>) -> Result<T> {
    if scenario.topology != Topology::Common || !scenario.is_equal_rate() || scenario.left.rates != scenario.right.rates {
        return Err(Error::RegimeMismatch(
            "equal-rate cross current needs common reservoirs with identical equal rates".into(),
        ));
    }
    let eig = scenario.eigensystem();
    let (tl, tr) = (scenario.left.temperature, scenario.right.temperature);
    let n = |w| -> Result<(T, T)> {
        let l = bose_occupation(w, tl)?;
        let r = bose_occupation(w, tr)?;
        Ok((l + r, r - l))
    };
    let (nm, um) = n(eig.omega_minus)?;
    let (np, up) = n(eig.omega_plus)?;
    let two = T::lit(2.0);
    let norm = (nm + two) * (np + two) + nm * (np + two) + (nm + two) * np + nm * np;
    let gm = scenario.left.rates.gamma11[0];
    let gp = scenario.left.rates.gamma11[1];
    let cs = eig.theta_s.sin() * eig.theta_s.cos();
    let cd = eig.theta_d.sin() * eig.theta_d.cos();
    let a = gm * eig.omega_minus * um;
    let b = gp * eig.omega_plus * up;
    Ok(T::lit(8.0) / norm * (cs * (a + b) + cd * (a - b)))
}

/// `ΔQ_L = Q_L^I − Q_L^C`; a degenerate common scenario is evaluated at its residual state.
pub fn delta_current<T: Real>(common: &Scenario<T>, independent: &Scenario<T>) -> Result<T> {
    common.same_physics(independent)?;
    if common.topology != Topology::Common || independent.topology != Topology::Independent {
        return Err(Error::RegimeMismatch("delta_current needs (common, independent) scenarios".into()));
    }
    let (_, c) = evaluate(common, T::zero())?;
    let (_, i) = evaluate(independent, T::zero())?;
    Ok(i.left.total - c.left.total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipators::reservoir::RateTable;
    use crate::model::SystemParams;
    use approx::assert_relative_eq;

    fn scen(w1: f64, w2: f64, g: f64, top: Topology, tl: f64) -> Scenario<f64> {
        Scenario::flat(SystemParams::new(w1, w2, g).unwrap(), top, tl, 21.0, 0.003).unwrap()
    }

    #[test]
    fn flux_form_is_the_inner_product() {
        let s = scen(3.0, 4.0, 0.3, Topology::Common, 100.0);
        let rates = crate::dissipators::rates::rate_matrix(&s).unwrap();
        let st = PopulationVector::new(nalgebra::Vector4::new(0.4, 0.3, 0.2, 0.1)).unwrap();
        for m in [&rates.left.total, &rates.left.direct, &rates.left.cross] {
            let inner = s.eigensystem().lambdas.dot(&(m * st.vector()));
            assert_relative_eq!(heat_current(m, &st, s.eigensystem()), inner, epsilon = 1e-15);
        }
    }

    #[test]
    fn closed_form_matches_generic() {
        for (w2, g, top) in [
            (4.0, 0.3, Topology::Common),
            (4.0, 0.3, Topology::Independent),
            (4.0, 0.0, Topology::Common),
            (4.0, 0.0, Topology::Independent),
            (3.0, 0.3, Topology::Independent),
        ] {
            let s = scen(3.0, w2, g, top, 100.0);
            let (_, generic) = evaluate(&s, 0.0).unwrap();
            let closed = heat_current_closed(&s).unwrap();
            for l in ReservoirLabel::ALL {
                let (a, b) = (generic.reservoir(l), closed.reservoir(l));
                assert_relative_eq!(a.total, b.total, epsilon = 1e-12);
                assert_relative_eq!(a.direct, b.direct, epsilon = 1e-12);
                assert_relative_eq!(a.cross, b.cross, epsilon = 1e-12);
            }
            generic.check_invariants(1e-12).unwrap();
            assert!(generic.left.total > 0.0);
        }
    }

    #[test]
    fn unequal_rates_resonant() {
        let t = RateTable::per_qubit([0.003, 0.002], [0.001, 0.004]);
        let s = scen(3.0, 3.0, 0.3, Topology::Common, 100.0).with_rates(t, t).unwrap();
        assert_eq!(s.regime(), Regime::ResonantCoupled);
        let (_, generic) = evaluate(&s, 0.0).unwrap();
        let closed = heat_current_closed(&s).unwrap();
        assert_relative_eq!(generic.left.total, closed.left.total, epsilon = 1e-12);
        assert_relative_eq!(generic.left.cross, closed.left.cross, epsilon = 1e-12);
    }

    #[test]
    fn equilibrium_has_no_current() {
        let (_, r) = evaluate(&scen(3.0, 4.0, 0.3, Topology::Common, 21.0), 0.0).unwrap();
        assert!(r.left.total.abs() <= 1e-12 && r.right.total.abs() <= 1e-12);
    }

    #[test]
    fn degenerate_linear_in_dark_weight() {
        let s = scen(3.0, 3.0, 0.3, Topology::Common, 100.0);
        let max = max_heat_current_degenerate(&s).unwrap();
        for k in 0..=10 {
            let w = k as f64 / 10.0;
            let (_, r) = evaluate(&s, w).unwrap();
            assert_relative_eq!(r.left.total / max[0], 1.0 - w, epsilon = 1e-12);
            let c = channel_closed_degenerate(&s, w).unwrap();
            assert_relative_eq!(c.left.direct, r.left.direct, epsilon = 1e-12);
            assert_relative_eq!(c.right.cross, r.right.cross, epsilon = 1e-12);
        }
        let c = channel_closed_degenerate(&s, 1.0).unwrap();
        assert_relative_eq!(c.left.direct, -c.left.cross, epsilon = 1e-15);
    }

    #[test]
    fn uncoupled_degenerate_forms_agree() {
        let s = scen(3.0, 3.0, 0.0, Topology::Common, 100.0);
        let q46 = max_heat_current_uncoupled(&s).unwrap();
        let (_, r) = evaluate(&s, 0.0).unwrap();
        assert_relative_eq!(q46[0], r.left.total, epsilon = 1e-12);
        let q43 = max_heat_current_w(&s).unwrap();
        assert_relative_eq!(q43[0], q46[0], epsilon = 1e-12);
        assert_relative_eq!(q43[1], q46[1], epsilon = 1e-12);
        assert!(max_heat_current_uncoupled(&scen(3.0, 3.0, 0.3, Topology::Common, 100.0)).is_err());
    }

    #[test]
    fn equal_rate_cross_current() {
        let s = scen(3.0, 4.0, 0.3, Topology::Common, 100.0);
        let (_, r) = evaluate(&s, 0.0).unwrap();
        assert_relative_eq!(cross_current_equal_rate(&s).unwrap(), r.left.cross, epsilon = 1e-12);
        assert!(r.left.cross < 0.0 && r.left.inverse_cross());
        let i = s.with_topology(Topology::Independent).unwrap();
        let (_, ri) = evaluate(&i, 0.0).unwrap();
        assert_relative_eq!(ri.left.total, r.left.direct, epsilon = 1e-12);
        let d = delta_current(&s, &i).unwrap();
        assert_relative_eq!(d, -r.left.cross, epsilon = 1e-12);
    }

    #[test]
    fn no_delta_without_coupling() {
        let s = scen(3.0, 4.0, 0.0, Topology::Common, 100.0);
        let d = delta_current(&s, &s.with_topology(Topology::Independent).unwrap()).unwrap();
        assert!(d.abs() <= 1e-12);
    }

    #[test]
    fn zero_cross_rate_zero_cross_current() {
        let mut t = RateTable::flat(0.003);
        t.gamma12 = [0.0; 2];
        let s = scen(3.0, 4.0, 0.3, Topology::Common, 100.0).with_rates(t, t).unwrap();
        let (_, r) = evaluate(&s, 0.0).unwrap();
        assert_eq!(r.left.cross, 0.0);
    }
}

//! Random scenarios and states for randomized checks.
//!
//! Ranges: `ω₁ ∈ [1, 5]`, detuning 10–60 % of `ω₁`, `g ∈ [0.05, 2]`,
//! `T ∈ [1, 200]`, rates in `[1e-3, 1e-2]`. Where a regime needs unequal
//! rates, the two qubits' rates differ by at least a factor 1.5.

use nalgebra::Vector4;
use rand::Rng;

use crate::dissipators::reservoir::{RateTable, ReservoirLabel, ReservoirSpec};
use crate::dissipators::scenario::{Regime, Scenario, Topology};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::scalar::Real;
use crate::steadystate::PopulationVector;

/// Topologies under which a regime can occur.
pub fn topologies(regime: Regime) -> &'static [Topology] {
    match regime {
        Regime::DetunedCoupled | Regime::ResonantCoupled => &[Topology::Common, Topology::Independent],
        Regime::UncoupledIndependent => &[Topology::Independent],
        _ => &[Topology::Common],
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn gamma<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    uniform(rng, 1e-3, 1e-2)
}

/// A pair of rates whose ratio is at least 1.5.
fn unequal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let a = uniform(rng, 1e-3, 6e-3);
    let b = a * uniform(rng, 1.5, 1e-2 / a);
    if rng.random_bool(0.5) {
        (a, b)
    } else {
        (b, a)
    }
}

fn table<R: Rng + ?Sized>(rng: &mut R, regime: Regime) -> RateTable<f64> {
    match regime {
        Regime::ResonantDegenerate => RateTable::per_branch(gamma(rng), gamma(rng)),
        Regime::UncoupledResonant => {
            let (a, b) = unequal_pair(rng);
            RateTable::per_qubit([a, a], [b, b])
        }
        Regime::ResonantCoupled => {
            let (a, b) = unequal_pair(rng);
            let (c, d) = unequal_pair(rng);
            RateTable::per_qubit([a, c], [b, d])
        }
        _ => RateTable::per_qubit([gamma(rng), gamma(rng)], [gamma(rng), gamma(rng)]),
    }
}

fn detuned<R: Rng + ?Sized>(rng: &mut R, w1: f64) -> f64 {
    let d = uniform(rng, 0.1, 0.6) * w1;
    if rng.random_bool(0.5) {
        w1 + d
    } else {
        w1 - d
    }
}

/// A random scenario in `regime`.
pub fn random_scenario<T: Real, R: Rng + ?Sized>(rng: &mut R, regime: Regime) -> Result<Scenario<T>> {
    let tops = topologies(regime);
    let topology = tops[rng.random_range(0..tops.len())];
    let w1 = uniform(rng, 1.0, 5.0);
    let coupled = uniform(rng, 0.05, 2.0);
    let (w2, g) = match regime {
        Regime::DetunedCoupled => (detuned(rng, w1), coupled),
        Regime::ResonantCoupled => (w1, coupled),
        // a fifth of the degenerate draws take the uncoupled limit
        Regime::ResonantDegenerate => (w1, if rng.random_bool(0.2) { 0.0 } else { coupled }),
        Regime::UncoupledResonant => (w1, 0.0),
        Regime::UncoupledDetuned => (detuned(rng, w1), 0.0),
        Regime::UncoupledIndependent => (if rng.random_bool(0.5) { w1 } else { detuned(rng, w1) }, 0.0),
    };
    let mut tables = [table(rng, regime), table(rng, regime)];
    if g == 0.0 && w2 == w1 {
        // one physical frequency: the branch rates must agree
        for t in &mut tables {
            t.gamma11[1] = t.gamma11[0];
            t.gamma22[1] = t.gamma22[0];
            t.gamma12[1] = t.gamma12[0];
        }
    }
    let cast = |t: &RateTable<f64>| RateTable {
        gamma11: t.gamma11.map(T::lit),
        gamma22: t.gamma22.map(T::lit),
        gamma12: t.gamma12.map(T::lit),
    };
    let params = SystemParams::new(T::lit(w1), T::lit(w2), T::lit(g))?;
    let left = ReservoirSpec::new(ReservoirLabel::Left, T::lit(uniform(rng, 1.0, 200.0)), cast(&tables[0]))?;
    let right = ReservoirSpec::new(ReservoirLabel::Right, T::lit(uniform(rng, 1.0, 200.0)), cast(&tables[1]))?;
    let s = Scenario::new(params, topology, left, right)?;
    if s.regime() != regime {
        return Err(Error::Invariant(format!("sampled {} while asking for {regime}", s.regime())));
    }
    Ok(s)
}

/// Populations drawn uniformly from the probability simplex.
pub fn random_populations<T: Real, R: Rng + ?Sized>(rng: &mut R) -> PopulationVector<T> {
    let e: [f64; 4] = std::array::from_fn(|_| -uniform(rng, f64::MIN_POSITIVE, 1.0).ln());
    let sum: f64 = e.iter().sum();
    PopulationVector::new(Vector4::from(e.map(|x| T::lit(x / sum)))).expect("simplex sample is normalized")
}

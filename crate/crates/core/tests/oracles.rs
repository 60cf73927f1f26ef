//! Closed forms against the full Liouvillian and against time integration,
//! over random scenarios in every regime.

use nalgebra::Vector4;
use qubit_heat::dissipators::build_liouvillian;
use qubit_heat::entanglement::{bare_state, coa_detuned_closed, coa_general, coa_resonant_closed};
use qubit_heat::modulator::relax_to_steady;
use qubit_heat::sampling::{random_populations, random_scenario};
use qubit_heat::steadystate::{solve, steady_state_nullspace, NullspaceState};
use qubit_heat::transport::{channel_closed_degenerate, evaluate, heat_current_closed, max_heat_current_degenerate};
use qubit_heat::{PopulationVector, Regime, ScenarioF64, SteadyStateResult};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PER_REGIME: usize = 100;

fn scenarios(regime: Regime, seed: u64) -> Vec<ScenarioF64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..PER_REGIME).map(|_| random_scenario(&mut rng, regime).unwrap()).collect()
}

fn max_diff(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    (a - b).abs().max()
}

#[test]
fn steady_state_matches_liouvillian_and_integration() {
    for (k, regime) in Regime::ALL.into_iter().enumerate() {
        for s in scenarios(regime, 100 + k as u64) {
            let w = 0.37;
            let (rates, result) = solve(&s, w).unwrap();
            let closed = *result.state().vector();
            let l = build_liouvillian(&s).unwrap();
            let oracle = match steady_state_nullspace(&l).unwrap() {
                NullspaceState::Unique(rho) => NullspaceState::populations(&rho),
                NullspaceState::Family { dark, residual } => {
                    NullspaceState::populations(&dark) * w + NullspaceState::populations(&residual) * (1.0 - w)
                }
            };
            assert!(max_diff(&closed, &oracle) <= 1e-9, "{regime}: {closed} vs {oracle}");

            let start = match result {
                SteadyStateResult::Family(_) => PopulationVector::new(Vector4::new(0.1, w, 0.2, 0.7 - w)).unwrap(),
                SteadyStateResult::Unique(_) => PopulationVector::new(Vector4::repeat(0.25)).unwrap(),
            };
            let (relaxed, _) = relax_to_steady(&rates.total(), &start, 1e-14, 1e8).unwrap();
            assert!(max_diff(&closed, relaxed.vector()) <= 1e-9, "{regime}: {closed} vs {}", relaxed.vector());
        }
    }
}

#[test]
fn closed_form_currents_match_generic() {
    for (k, regime) in Regime::ALL.into_iter().enumerate() {
        for s in scenarios(regime, 200 + k as u64) {
            if regime == Regime::ResonantDegenerate {
                let max = max_heat_current_degenerate(&s).unwrap();
                for j in 0..=10 {
                    let w = j as f64 / 10.0;
                    let (_, r) = evaluate(&s, w).unwrap();
                    let c = channel_closed_degenerate(&s, w).unwrap();
                    assert!((r.left.total - (1.0 - w) * max[0]).abs() <= 1e-12);
                    assert!((r.right.total - (1.0 - w) * max[1]).abs() <= 1e-12);
                    assert!((r.left.direct - c.left.direct).abs() <= 1e-12);
                    assert!((r.left.cross - c.left.cross).abs() <= 1e-12);
                }
                continue;
            }
            let (_, generic) = evaluate(&s, 0.0).unwrap();
            let closed = heat_current_closed(&s).unwrap();
            for (a, b) in [(generic.left, closed.left), (generic.right, closed.right)] {
                assert!((a.total - b.total).abs() <= 1e-12, "{regime}: {} vs {}", a.total, b.total);
                assert!((a.direct - b.direct).abs() <= 1e-12);
                assert!((a.cross - b.cross).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn coa_closed_forms_match_generic() {
    let mut rng = ChaCha8Rng::seed_from_u64(300);
    for (k, regime) in Regime::ALL.into_iter().enumerate() {
        for (j, s) in scenarios(regime, 400 + k as u64).into_iter().enumerate() {
            let eig = s.eigensystem();
            for i in 0..10 {
                let state = if regime == Regime::ResonantDegenerate {
                    let w = (i as f64) / 9.0;
                    let (_, r) = solve(&s, w).unwrap();
                    let g = coa_general(&bare_state(&r.state(), eig)).unwrap();
                    let c = coa_resonant_closed(w, &s).unwrap();
                    assert!((g - c).abs() <= 1e-9, "{regime} #{j}: {g} vs {c}");
                    continue;
                } else if i == 0 {
                    solve(&s, 0.0).unwrap().1.state()
                } else {
                    random_populations(&mut rng)
                };
                let g = coa_general(&bare_state(&state, eig)).unwrap();
                let c = coa_detuned_closed(&state, eig);
                assert!((g - c).abs() <= 1e-9, "{regime} #{j}: {g} vs {c}");
                assert!((0.0..=1.0 + 1e-12).contains(&g));
            }
        }
    }
}

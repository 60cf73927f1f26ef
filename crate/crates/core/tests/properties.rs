//! Invariants over random scenarios.

use proptest::prelude::*;
use qubit_heat::dissipators::bose_occupation;
use qubit_heat::entanglement::{bare_state, coa_general};
use qubit_heat::modulator::{rabi_populations, solve_pulse_duration};
use qubit_heat::sampling::random_scenario;
use qubit_heat::steadystate::{equal_rate_steady_state, gibbs_populations, solve};
use qubit_heat::transport::{evaluate, max_heat_current_degenerate};
use qubit_heat::{RateTable, ReservoirLabel, Regime, ScenarioF64, SystemParams, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn regime() -> impl Strategy<Value = Regime> {
    prop::sample::select(Regime::ALL.to_vec())
}

fn scenario(regime: Regime, seed: u64) -> ScenarioF64 {
    random_scenario(&mut ChaCha8Rng::seed_from_u64(seed), regime).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn conservation_additivity_second_law(r in regime(), seed in any::<u64>(), w in 0.0..=1.0f64) {
        let s = scenario(r, seed);
        let (_, rep) = evaluate(&s, w).unwrap();
        prop_assert!(rep.check_invariants(1e-12).is_ok(), "{:?}", rep);
    }

    #[test]
    fn equilibrium_is_gibbs(r in regime(), seed in any::<u64>()) {
        let s = scenario(r, seed);
        let t = s.temperature(ReservoirLabel::Left);
        let s = s.with_temperature(ReservoirLabel::Right, t).unwrap();
        let gibbs = gibbs_populations(s.eigensystem(), t).unwrap();
        let (_, res) = solve(&s, gibbs.get(1)).unwrap();
        prop_assert!((res.state().vector() - gibbs.vector()).abs().max() <= 1e-10);
        let (_, rep) = evaluate(&s, gibbs.get(1)).unwrap();
        prop_assert!(rep.left.total.abs() <= 1e-12 && rep.right.total.abs() <= 1e-12);
    }

    #[test]
    fn equal_rate_formula(seed in any::<u64>(), g in 0.0..2.0f64, gm in 1e-3..1e-2f64, gp in 1e-3..1e-2f64,
                          tl in 1.0..200.0f64, tr in 1.0..200.0f64, scale in 0.1..10.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w2 = 3.0 + rand::Rng::random_range(&mut rng, 0.3..1.5);
        let rates = RateTable::per_branch(gm, gp);
        let base = ScenarioF64::flat(SystemParams::new(3.0, w2, g).unwrap(), Topology::Common, tl, tr, 1.0).unwrap()
            .with_rates(rates, rates).unwrap();
        let eig = base.eigensystem();
        let n = |w| bose_occupation(w, tl).unwrap() + bose_occupation(w, tr).unwrap();
        let expect = equal_rate_steady_state(n(eig.omega_minus), n(eig.omega_plus)).unwrap();
        for s in [base.clone(), base.with_topology(Topology::Independent).unwrap(), base.scaled_rates(scale).unwrap()] {
            let (_, res) = solve(&s, 0.0).unwrap();
            prop_assert!((res.state().vector() - expect.vector()).abs().max() <= 1e-12);
        }
    }

    #[test]
    fn degenerate_current_linear(seed in any::<u64>()) {
        let s = scenario(Regime::ResonantDegenerate, seed);
        let max = max_heat_current_degenerate(&s).unwrap();
        for k in 0..=10 {
            let w = k as f64 / 10.0;
            let (_, rep) = evaluate(&s, w).unwrap();
            prop_assert!((rep.left.total - (1.0 - w) * max[0]).abs() <= 1e-12);
        }
    }

    #[test]
    fn coa_in_range(r in regime(), seed in any::<u64>(), w in 0.0..=1.0f64) {
        let s = scenario(r, seed);
        let (_, res) = solve(&s, w).unwrap();
        let c = coa_general(&bare_state(&res.state(), s.eigensystem())).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&c));
    }

    #[test]
    fn rabi_conserves_pair(a in 0.0..0.5f64, b in 0.0..0.5f64, om in 0.1..5.0f64, t in 0.0..20.0f64) {
        let (pa, pb) = rabi_populations(a, b, om, t);
        prop_assert!((pa + pb - a - b).abs() <= 1e-15);
        let target = pa;
        let d = solve_pulse_duration(target, a, b, om).unwrap();
        prop_assert!((rabi_populations(a, b, om, d).0 - target).abs() <= 1e-12);
    }
}

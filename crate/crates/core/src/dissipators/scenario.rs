//! Reservoir topology and regime classification.

use std::fmt;

use crate::dissipators::reservoir::{RateTable, ReservoirLabel, ReservoirSpec};
use crate::error::{invalid, Error, Result};
use crate::model::{diagonalize_with, Branch, DegenerateBasis, EigenSystem, Qubit, SystemParams};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// One reservoir per side couples to both qubits (cross dissipation present).
    Common,
    /// Every qubit has its own reservoirs (direct dissipation only).
    Independent,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Common => "common",
            Topology::Independent => "independent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    DetunedCoupled,
    ResonantCoupled,
    ResonantDegenerate,
    UncoupledDetuned,
    UncoupledResonant,
    UncoupledIndependent,
}

impl Regime {
    pub const ALL: [Regime; 6] = [
        Regime::DetunedCoupled,
        Regime::ResonantCoupled,
        Regime::ResonantDegenerate,
        Regime::UncoupledDetuned,
        Regime::UncoupledResonant,
        Regime::UncoupledIndependent,
    ];

    /// Rank of the total population rate matrix implied by the regime.
    pub fn expected_rank(self) -> usize {
        match self {
            Regime::ResonantDegenerate => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub params: SystemParams<T>,
    pub topology: Topology,
    pub left: ReservoirSpec<T>,
    pub right: ReservoirSpec<T>,
    regime: Regime,
    eig: EigenSystem<T>,
}

impl<T: Real> Scenario<T> {
    pub fn new(params: SystemParams<T>, topology: Topology, left: ReservoirSpec<T>, right: ReservoirSpec<T>) -> Result<Self> {
        params.validate()?;
        left.validate()?;
        right.validate()?;
        if left.label != ReservoirLabel::Left || right.label != ReservoirLabel::Right {
            return Err(invalid("label", "reservoirs must be labelled (Left, Right)"));
        }
        if params.is_uncoupled() && params.is_resonant() {
            // Both transitions sit at the same physical frequency.
            for r in [&left, &right] {
                let t = &r.rates;
                let same = |a: [T; 2]| (a[0] - a[1]).abs() <= T::tol(1e-12) * a[0].max(a[1]);
                if !(same(t.gamma11) && same(t.gamma22) && same(t.gamma12)) {
                    return Err(invalid(
                        "rates",
                        "with g = 0 and equal frequencies both transitions share one frequency, so their rates must agree",
                    ));
                }
            }
        }
        for r in [&left, &right] {
            if r.rates.has_nondefault_cross() && topology == Topology::Common {
                log::warn!(
                    "reservoir {}: gamma12 differs from sqrt(gamma11*gamma22)",
                    r.label.short()
                );
            }
        }
        let basis = match topology {
            Topology::Common => DegenerateBasis::SingletTriplet,
            Topology::Independent => DegenerateBasis::Bare,
        };
        let eig = diagonalize_with(&params, basis)?;
        let regime = classify(&params, topology, &left, &right);
        Ok(Self {
            params,
            topology,
            left,
            right,
            regime,
            eig,
        })
    }

    /// Two flat-spectrum reservoirs with rate `gamma`.
    pub fn flat(params: SystemParams<T>, topology: Topology, t_left: T, t_right: T, gamma: T) -> Result<Self> {
        let rates = RateTable::flat(gamma);
        Self::new(
            params,
            topology,
            ReservoirSpec::new(ReservoirLabel::Left, t_left, rates)?,
            ReservoirSpec::new(ReservoirLabel::Right, t_right, rates)?,
        )
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn eigensystem(&self) -> &EigenSystem<T> {
        &self.eig
    }

    pub fn reservoir(&self, label: ReservoirLabel) -> &ReservoirSpec<T> {
        match label {
            ReservoirLabel::Left => &self.left,
            ReservoirLabel::Right => &self.right,
        }
    }

    pub fn temperature(&self, label: ReservoirLabel) -> T {
        self.reservoir(label).temperature
    }

    pub fn with_topology(&self, topology: Topology) -> Result<Self> {
        Self::new(self.params, topology, self.left, self.right)
    }

    pub fn with_params(&self, params: SystemParams<T>) -> Result<Self> {
        Self::new(params, self.topology, self.left, self.right)
    }

    pub fn with_temperature(&self, label: ReservoirLabel, temperature: T) -> Result<Self> {
        let (mut l, mut r) = (self.left, self.right);
        match label {
            ReservoirLabel::Left => l.temperature = temperature,
            ReservoirLabel::Right => r.temperature = temperature,
        }
        Self::new(self.params, self.topology, l, r)
    }

    pub fn with_rates(&self, left: RateTable<T>, right: RateTable<T>) -> Result<Self> {
        let (mut l, mut r) = (self.left, self.right);
        l.rates = left;
        r.rates = right;
        Self::new(self.params, self.topology, l, r)
    }

    /// Every rate multiplied by `factor`.
    pub fn scaled_rates(&self, factor: T) -> Result<Self> {
        self.with_rates(self.left.rates.scaled(factor), self.right.rates.scaled(factor))
    }

    /// Equal-rate case: for each reservoir and transition, `γ¹¹ = γ²² = γ¹²`.
    pub fn is_equal_rate(&self) -> bool {
        [&self.left, &self.right]
            .iter()
            .all(|r| Branch::ALL.iter().all(|&b| r.rates.is_equal_at(b)))
    }

    /// Transition carrying qubit `m` when uncoupled (its natural frequency).
    pub fn natural_branch(&self, m: Qubit) -> Branch {
        let (own, other) = match m {
            Qubit::One => (self.params.omega1, self.params.omega2),
            Qubit::Two => (self.params.omega2, self.params.omega1),
        };
        if self.params.is_resonant() {
            // Both branches coincide; the first qubit is assigned ω₋ by convention.
            return match m {
                Qubit::One => Branch::Minus,
                Qubit::Two => Branch::Plus,
            };
        }
        if own < other {
            Branch::Minus
        } else {
            Branch::Plus
        }
    }

    /// Checks that two scenarios differ at most in topology.
    pub fn same_physics(&self, other: &Self) -> Result<()> {
        if self.params != other.params || self.left != other.left || self.right != other.right {
            return Err(invalid("scenario", "scenarios differ in parameters, temperatures or rates"));
        }
        Ok(())
    }

    pub fn require(&self, allowed: &[Regime], what: &str) -> Result<()> {
        if allowed.contains(&self.regime) {
            Ok(())
        } else {
            Err(Error::RegimeMismatch(format!(
                "{what} needs one of {allowed:?}, scenario is {} ({})",
                self.regime, self.topology
            )))
        }
    }
}

fn classify<T: Real>(
    params: &SystemParams<T>,
    topology: Topology,
    left: &ReservoirSpec<T>,
    right: &ReservoirSpec<T>,
) -> Regime {
    let resonant = params.is_resonant();
    let coupled = !params.is_uncoupled();
    let degenerate = [left, right]
        .iter()
        .all(|r| Branch::ALL.iter().all(|&b| r.rates.is_equal_at(b)));
    match topology {
        Topology::Independent => match (coupled, resonant) {
            (false, _) => Regime::UncoupledIndependent,
            (true, true) => Regime::ResonantCoupled,
            (true, false) => Regime::DetunedCoupled,
        },
        Topology::Common => match (coupled, resonant, degenerate) {
            (_, true, true) => Regime::ResonantDegenerate,
            (true, true, false) => Regime::ResonantCoupled,
            (true, false, _) => Regime::DetunedCoupled,
            (false, true, false) => Regime::UncoupledResonant,
            (false, false, _) => Regime::UncoupledDetuned,
        },
    }
}

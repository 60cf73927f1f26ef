//! Thermal reservoirs: occupations, rate tables and spectral densities.

use crate::error::{invalid, Result};
use crate::model::{Branch, Qubit};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReservoirLabel {
    Left,
    Right,
}

impl ReservoirLabel {
    pub const ALL: [ReservoirLabel; 2] = [ReservoirLabel::Left, ReservoirLabel::Right];

    pub fn short(self) -> &'static str {
        match self {
            ReservoirLabel::Left => "L",
            ReservoirLabel::Right => "R",
        }
    }
}

/// Absorption evaluates `J(+ω) = γ n̄`, emission `J(−ω) = γ (n̄ + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Absorption,
    Emission,
}

/// Dissipation rates `γ^{mn}(ω_i)` at the two transition energies.
///
/// Arrays are indexed by [`Branch::index`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTable<T> {
    pub gamma11: [T; 2],
    pub gamma22: [T; 2],
    pub gamma12: [T; 2],
}

impl<T: Real> RateTable<T> {
    /// Same rate for both qubits, both transitions, fully correlated.
    pub fn flat(gamma: T) -> Self {
        Self::per_branch(gamma, gamma)
    }

    /// Equal rates per transition (`γ^{mn}(ω₋) = γ₋`, `γ^{mn}(ω₊) = γ₊`).
    pub fn per_branch(gamma_minus: T, gamma_plus: T) -> Self {
        let g = [gamma_minus, gamma_plus];
        Self {
            gamma11: g,
            gamma22: g,
            gamma12: g,
        }
    }

    /// Per-qubit rates with the cross rate at its default `√(γ¹¹γ²²)`.
    pub fn per_qubit(gamma11: [T; 2], gamma22: [T; 2]) -> Self {
        let gamma12 = [(gamma11[0] * gamma22[0]).sqrt(), (gamma11[1] * gamma22[1]).sqrt()];
        Self {
            gamma11,
            gamma22,
            gamma12,
        }
    }

    pub fn get(&self, m: Qubit, n: Qubit, branch: Branch) -> T {
        let i = branch.index();
        match (m, n) {
            (Qubit::One, Qubit::One) => self.gamma11[i],
            (Qubit::Two, Qubit::Two) => self.gamma22[i],
            _ => self.gamma12[i],
        }
    }

    pub fn scaled(&self, factor: T) -> Self {
        let s = |a: [T; 2]| [a[0] * factor, a[1] * factor];
        Self {
            gamma11: s(self.gamma11),
            gamma22: s(self.gamma22),
            gamma12: s(self.gamma12),
        }
    }

    /// True when `γ¹² ≠ √(γ¹¹γ²²)` somewhere; such tables are accepted but flagged.
    pub fn has_nondefault_cross(&self) -> bool {
        (0..2).any(|i| {
            let d = (self.gamma11[i] * self.gamma22[i]).sqrt();
            (self.gamma12[i] - d).abs() > T::tol(1e-12) * d.max(T::lit(f64::MIN_POSITIVE))
        })
    }

    /// `γ¹¹ = γ²² = γ¹²` at the given transition, within a relative tolerance.
    pub fn is_equal_at(&self, branch: Branch) -> bool {
        let i = branch.index();
        let (a, b, c) = (self.gamma11[i], self.gamma22[i], self.gamma12[i]);
        let scale = a.max(b).max(c);
        let tol = T::tol(1e-12) * scale;
        (a - b).abs() <= tol && (a - c).abs() <= tol
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..2 {
            let (a, b, c) = (self.gamma11[i], self.gamma22[i], self.gamma12[i]);
            for (name, v) in [("gamma11", a), ("gamma22", b), ("gamma12", c)] {
                if !v.is_finite() || v < T::zero() {
                    return Err(invalid(name, "rates must be finite and >= 0"));
                }
            }
            if c * c > a * b * (T::one() + T::tol(1e-12)) {
                return Err(invalid("gamma12", "violates gamma12^2 <= gamma11*gamma22"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirSpec<T> {
    pub label: ReservoirLabel,
    pub temperature: T,
    pub rates: RateTable<T>,
}

impl<T: Real> ReservoirSpec<T> {
    pub fn new(label: ReservoirLabel, temperature: T, rates: RateTable<T>) -> Result<Self> {
        let r = Self {
            label,
            temperature,
            rates,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.temperature.is_finite() || self.temperature < T::zero() {
            return Err(invalid("temperature", "must be finite and >= 0"));
        }
        self.rates.validate()
    }

    pub fn occupation(&self, omega: T) -> Result<T> {
        bose_occupation(omega, self.temperature)
    }
}

/// Mean photon number `1/(e^{ω/T} − 1)`, zero at `T = 0`.
pub fn bose_occupation<T: Real>(omega: T, temperature: T) -> Result<T> {
    if !(omega > T::zero()) {
        return Err(invalid("omega", "occupation needs omega > 0"));
    }
    if temperature < T::zero() {
        return Err(invalid("temperature", "must be >= 0"));
    }
    if temperature == T::zero() {
        return Ok(T::zero());
    }
    Ok(T::one() / (omega / temperature).exp_m1())
}

/// `J^{mn}_α(±ω_i)` for the rate at transition `branch`, evaluated at energy `omega`.
pub fn spectral_density<T: Real>(
    res: &ReservoirSpec<T>,
    m: Qubit,
    n: Qubit,
    branch: Branch,
    omega: T,
    direction: Direction,
) -> Result<T> {
    let gamma = res.rates.get(m, n, branch);
    let nbar = res.occupation(omega)?;
    Ok(match direction {
        Direction::Absorption => gamma * nbar,
        Direction::Emission => gamma * (nbar + T::one()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn occupation_values() {
        // 1/expm1(0.03) and 1/expm1(3/21) from a 30-digit evaluation.
        assert_relative_eq!(bose_occupation(3.0, 100.0).unwrap(), 32.835_833_295_834_1, epsilon = 1e-11);
        assert_relative_eq!(bose_occupation(3.0, 21.0).unwrap(), 6.511_900_714_632_576, epsilon = 1e-12);
        assert_eq!(bose_occupation(3.0, 0.0).unwrap(), 0.0);
        assert!(bose_occupation(0.0, 1.0).is_err());
        assert!(bose_occupation(-1.0, 1.0).is_err());
    }

    #[test]
    fn spectral_density_values() {
        let r = ReservoirSpec::new(ReservoirLabel::Left, 100.0, RateTable::flat(0.003)).unwrap();
        let up = spectral_density(&r, Qubit::One, Qubit::One, Branch::Minus, 3.0, Direction::Absorption).unwrap();
        let down = spectral_density(&r, Qubit::One, Qubit::One, Branch::Minus, 3.0, Direction::Emission).unwrap();
        assert_relative_eq!(up, 0.098507, epsilon = 1e-6);
        assert_relative_eq!(down, 0.101507, epsilon = 1e-6);
        assert_relative_eq!(down - up, 0.003, epsilon = 1e-15);
        assert_relative_eq!(up / down, (-0.03f64).exp(), epsilon = 1e-13);
    }

    #[test]
    fn vacuum_reservoir() {
        let r = ReservoirSpec::new(ReservoirLabel::Right, 0.0, RateTable::flat(0.01)).unwrap();
        let up = spectral_density(&r, Qubit::Two, Qubit::Two, Branch::Plus, 2.0, Direction::Absorption).unwrap();
        let down = spectral_density(&r, Qubit::Two, Qubit::Two, Branch::Plus, 2.0, Direction::Emission).unwrap();
        assert_eq!(up, 0.0);
        assert_eq!(down, 0.01);
    }

    #[test]
    fn table_validation() {
        assert!(RateTable::flat(-1.0).validate().is_err());
        let mut t = RateTable::per_qubit([1.0, 1.0], [4.0, 4.0]);
        assert!(t.validate().is_ok());
        assert!(!t.has_nondefault_cross());
        t.gamma12 = [1.0, 1.0];
        assert!(t.validate().is_ok());
        assert!(t.has_nondefault_cross());
        t.gamma12 = [3.0, 1.0];
        assert!(t.validate().is_err());
        assert!(ReservoirSpec::new(ReservoirLabel::Left, -1.0, RateTable::flat(1.0)).is_err());
    }
}

//! Concurrence of assistance.
//!
//! `C_a(ρ) = Σ σ_k` with `σ_k` the eigenvalues of `R = √(√ρ ρ̃ √ρ)`. Since
//! `√ρ̃ = Y √ρ* Y` with `Y = σ_y⊗σ_y`, the `σ_k` are the singular values of
//! `√ρ̃ √ρ`; [`coa_general`] uses that form, which stays accurate for
//! rank-deficient states. [`coa_literal`] follows the definition step by
//! step and serves as a cross-check.

use nalgebra::{Complex, Matrix4};

use crate::dissipators::rates::degenerate_elements;
use crate::dissipators::scenario::{Regime, Scenario};
use crate::error::{Error, Result};
use crate::model::{to_bare_basis, diagonal_density, DensityMatrix, EigenSystem};
use crate::scalar::Real;
use crate::steadystate::PopulationVector;

const PSD_TOLERANCE: f64 = 1e-10;
/// Eigenvalues of `ρ` below this are roundoff and treated as zero in `√ρ`.
const RANK_FLOOR: f64 = 1e-14;

fn c<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// `σ_y ⊗ σ_y` in the bare basis `{↑↑, ↑↓, ↓↑, ↓↓}`.
fn sigma_yy<T: Real>() -> DensityMatrix<T> {
    let one = c(T::one());
    let mut m = DensityMatrix::<T>::zeros();
    m[(0, 3)] = -one;
    m[(3, 0)] = -one;
    m[(1, 2)] = one;
    m[(2, 1)] = one;
    m
}

/// `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn spin_flip<T: Real>(rho: &DensityMatrix<T>) -> DensityMatrix<T> {
    let s = sigma_yy::<T>();
    s * rho.map(|z| z.conj()) * s
}

fn check_density<T: Real>(rho: &DensityMatrix<T>) -> Result<()> {
    let herm = (rho - rho.adjoint()).norm();
    let tol = T::tol(PSD_TOLERANCE);
    if herm > tol {
        return Err(Error::InvalidParameter {
            name: "rho",
            reason: format!("not Hermitian (deviation {:e})", herm.as_f64()),
        });
    }
    let min = rho.symmetric_eigenvalues().min();
    if min < -tol {
        return Err(Error::NotPositive(min.as_f64()));
    }
    Ok(())
}

/// Concurrence of assistance as the trace norm of `√ρ̃ √ρ`.
pub fn coa_general<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    check_density(rho)?;
    let s = psd_sqrt(rho);
    let m = spin_flip(&s) * s;
    Ok(m.singular_values().iter().fold(T::zero(), |a, &b| a + b))
}

fn psd_sqrt<T: Real>(m: &DensityMatrix<T>) -> DensityMatrix<T> {
    let e = m.symmetric_eigen();
    let floor = T::tol(RANK_FLOOR);
    let d = Matrix4::from_diagonal(&e.eigenvalues.map(|x| c(if x < floor { T::zero() } else { x.sqrt() })));
    e.eigenvectors * d * e.eigenvectors.adjoint()
}

/// Concurrence of assistance evaluated literally as `tr √(√ρ ρ̃ √ρ)`.
pub fn coa_literal<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    check_density(rho)?;
    let s = psd_sqrt(rho);
    let inner = s * spin_flip(rho) * s;
    let inner = (inner + inner.adjoint()) * c(T::lit(0.5));
    Ok(inner.symmetric_eigenvalues().iter().map(|x| x.max(T::zero()).sqrt()).fold(T::zero(), |a, b| a + b))
}

/// Real entries of an X-shaped bare-basis density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XStateElements<T> {
    pub d: T,
    pub e: T,
    pub f: T,
    pub j: T,
    pub k: T,
    pub l: T,
}

impl<T: Real> XStateElements<T> {
    /// Bare-basis form of a state diagonal in the eigenbasis.
    pub fn from_populations(state: &PopulationVector<T>, eig: &EigenSystem<T>) -> Self {
        let r = state.vector();
        let (ss, cs) = (eig.theta_s.sin(), eig.theta_s.cos());
        let (sd, cd) = (eig.theta_d.sin(), eig.theta_d.cos());
        Self {
            d: ss * ss * r[0] + cs * cs * r[3],
            e: sd * sd * r[1] + cd * cd * r[2],
            f: cd * cd * r[1] + sd * sd * r[2],
            j: cs * cs * r[0] + ss * ss * r[3],
            k: ss * cs * (r[3] - r[0]),
            l: sd * cd * (r[2] - r[1]),
        }
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        let mut m = DensityMatrix::<T>::zeros();
        m[(0, 0)] = c(self.d);
        m[(1, 1)] = c(self.e);
        m[(2, 2)] = c(self.f);
        m[(3, 3)] = c(self.j);
        m[(0, 3)] = c(self.k);
        m[(3, 0)] = c(self.k);
        m[(1, 2)] = c(self.l);
        m[(2, 1)] = c(self.l);
        m
    }

    pub fn validate(&self) -> Result<()> {
        let tol = T::tol(1e-12);
        let trace = self.d + self.e + self.f + self.j;
        if (trace - T::one()).abs() > tol {
            return Err(Error::Invariant(format!("trace {}", trace.as_f64())));
        }
        if self.k.abs() > (self.d * self.j).sqrt() + tol || self.l.abs() > (self.e * self.f).sqrt() + tol {
            return Err(Error::NotPositive(self.k.abs().max(self.l.abs()).as_f64()));
        }
        Ok(())
    }

    /// `2√(DJ) + 2√(EF)`.
    pub fn coa(&self) -> T {
        let two = T::lit(2.0);
        let z = T::zero();
        two * (self.d * self.j).max(z).sqrt() + two * (self.e * self.f).max(z).sqrt()
    }
}

/// Closed-form COA of a state diagonal in the eigenbasis.
pub fn coa_detuned_closed<T: Real>(state: &PopulationVector<T>, eig: &EigenSystem<T>) -> T {
    XStateElements::from_populations(state, eig).coa()
}

/// Intercept `h` of the resonant COA line.
pub fn resonant_h<T: Real>(scenario: &Scenario<T>) -> Result<T> {
    scenario.require(&[Regime::ResonantDegenerate], "resonant COA")?;
    let eig = scenario.eigensystem();
    let l = degenerate_elements(&scenario.left, eig)?;
    let r = degenerate_elements(&scenario.right, eig)?;
    let (w1, w2, w3, w4) = (l[0] + r[0], l[1] + r[1], l[2] + r[2], l[3] + r[3]);
    let n = w2 * w4 + w1 * w4 + w1 * w3;
    let sc = eig.theta_s.sin() * eig.theta_s.cos();
    let x = w2 * w4 - w1 * w3;
    Ok((w1 * w4 + T::lit(2.0) * (x * x * sc * sc + w1 * w2 * w3 * w4).sqrt()) / n)
}

/// `C_a^R = (1 − h) ρ₂₂ + h`.
pub fn coa_resonant_closed<T: Real>(rho22: T, scenario: &Scenario<T>) -> Result<T> {
    if !(rho22 >= T::zero() && rho22 <= T::one()) {
        return Err(Error::InvalidParameter {
            name: "rho22",
            reason: format!("{} not in [0, 1]", rho22.as_f64()),
        });
    }
    let h = resonant_h(scenario)?;
    Ok((T::one() - h) * rho22 + h)
}

/// Bare-basis density matrix of an eigenbasis population vector.
pub fn bare_state<T: Real>(state: &PopulationVector<T>, eig: &EigenSystem<T>) -> DensityMatrix<T> {
    to_bare_basis(&diagonal_density(state.vector()), eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipators::scenario::Topology;
    use crate::model::{diagonalize, SystemParams};
    use crate::steadystate::solve;
    use approx::assert_relative_eq;
    use nalgebra::Vector4;

    fn pure(v: [f64; 4]) -> DensityMatrix<f64> {
        let v = nalgebra::Vector4::from(v).map(|x| Complex::new(x, 0.0));
        let v = v / Complex::new(v.norm(), 0.0);
        v * v.adjoint()
    }

    #[test]
    fn singlet_and_product() {
        let s = pure([0.0, 1.0, -1.0, 0.0]);
        assert_relative_eq!(coa_general(&s).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(coa_literal(&s).unwrap(), 1.0, epsilon = 1e-7);
        let p = pure([0.0, 0.0, 0.0, 1.0]);
        assert!(coa_general(&p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_gives_one() {
        let m = DensityMatrix::<f64>::identity() * Complex::new(0.25, 0.0);
        assert_relative_eq!(coa_general(&m).unwrap(), 1.0, epsilon = 1e-12);
        let eig = diagonalize(&SystemParams::new(3.0, 4.0, 0.3).unwrap()).unwrap();
        let st = PopulationVector::new(Vector4::repeat(0.25)).unwrap();
        assert_relative_eq!(coa_detuned_closed(&st, &eig), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_non_psd() {
        let m = pure([1.0, 0.0, 0.0, 0.0]) * Complex::new(-1.0, 0.0);
        assert!(coa_general(&m).is_err());
    }

    #[test]
    fn uncoupled_reduces() {
        let eig = diagonalize(&SystemParams::new(3.0, 4.0, 0.0).unwrap()).unwrap();
        let st = PopulationVector::new(Vector4::new(0.1, 0.2, 0.3, 0.4)).unwrap();
        let expect = 2.0 * (0.1f64 * 0.4).sqrt() + 2.0 * (0.2f64 * 0.3).sqrt();
        assert_relative_eq!(coa_detuned_closed(&st, &eig), expect, epsilon = 1e-12);
    }

    #[test]
    fn detuned_closed_matches_generic() {
        let s = Scenario::flat(SystemParams::new(3.0, 4.0, 0.3).unwrap(), Topology::Common, 100.0, 21.0, 0.003).unwrap();
        let (_, r) = solve(&s, 0.0).unwrap();
        let st = r.state();
        let x = XStateElements::from_populations(&st, s.eigensystem());
        x.validate().unwrap();
        let bare = bare_state(&st, s.eigensystem());
        assert!((x.to_density() - bare).norm() < 1e-14);
        let closed = coa_detuned_closed(&st, s.eigensystem());
        assert!(closed > 0.0 && closed < 1.0);
        assert_relative_eq!(closed, coa_general(&bare).unwrap(), epsilon = 1e-9);
        assert_relative_eq!(closed, coa_literal(&bare).unwrap(), epsilon = 1e-7);
    }

    #[test]
    fn resonant_line() {
        let s = Scenario::flat(SystemParams::new(3.0, 3.0, 0.3).unwrap(), Topology::Common, 100.0, 21.0, 0.003).unwrap();
        let h = resonant_h(&s).unwrap();
        assert_relative_eq!(coa_resonant_closed(0.0, &s).unwrap(), h, epsilon = 1e-15);
        assert_relative_eq!(coa_resonant_closed(1.0, &s).unwrap(), 1.0, epsilon = 1e-15);
        for w in [0.0, 0.5, 1.0] {
            let (_, r) = solve(&s, w).unwrap();
            let g = coa_general(&bare_state(&r.state(), s.eigensystem())).unwrap();
            assert_relative_eq!(g, coa_resonant_closed(w, &s).unwrap(), epsilon = 1e-9);
        }
        assert!(coa_resonant_closed(1.5, &s).is_err());
    }
}

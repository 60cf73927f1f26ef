//! Full 16×16 dissipator superoperator, assembled term by term.
//!
//! Used as an oracle for the closed-form rate matrices. Density matrices are
//! vectorized column-major, so `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`. The two
//! transition groups `ω₋` and `ω₊` are kept as separate terms even when
//! they coincide in energy.

use nalgebra::{Complex, Matrix4, SMatrix, SVector};

use crate::dissipators::reservoir::{spectral_density, Direction, ReservoirLabel, ReservoirSpec};
use crate::dissipators::scenario::{Scenario, Topology};
use crate::error::Result;
use crate::model::{eigenoperator, eigenoperators, Branch, DensityMatrix, EigenSystem, Qubit};
use crate::scalar::Real;

pub type Superoperator<T> = SMatrix<Complex<T>, 16, 16>;
pub type VecDensity<T> = SVector<Complex<T>, 16>;

#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian<T: Real> {
    pub left: Superoperator<T>,
    pub right: Superoperator<T>,
}

impl<T: Real> Liouvillian<T> {
    pub fn total(&self) -> Superoperator<T> {
        self.left + self.right
    }

    pub fn reservoir(&self, label: ReservoirLabel) -> &Superoperator<T> {
        match label {
            ReservoirLabel::Left => &self.left,
            ReservoirLabel::Right => &self.right,
        }
    }

    /// Image of a density matrix under the total generator.
    pub fn apply(&self, rho: &DensityMatrix<T>) -> DensityMatrix<T> {
        unvectorize(&(self.total() * vectorize(rho)))
    }

    /// Restriction to diagonal-to-diagonal entries, as a real 4×4 matrix.
    pub fn population_block(&self, label: Option<ReservoirLabel>) -> Matrix4<T> {
        let l = match label {
            Some(lab) => *self.reservoir(lab),
            None => self.total(),
        };
        Matrix4::from_fn(|p, q| l[(5 * p, 5 * q)].re)
    }
}

pub fn vectorize<T: Real>(rho: &DensityMatrix<T>) -> VecDensity<T> {
    VecDensity::from_iterator(rho.iter().copied())
}

pub fn unvectorize<T: Real>(v: &VecDensity<T>) -> DensityMatrix<T> {
    DensityMatrix::from_iterator(v.iter().copied())
}

fn kron<T: Real>(a: &Matrix4<T>, b: &Matrix4<T>) -> SMatrix<T, 16, 16> {
    let mut out = SMatrix::<T, 16, 16>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let s = a[(i, j)];
            if s != T::zero() {
                out.fixed_view_mut::<4, 4>(4 * i, 4 * j).copy_from(&(b * s));
            }
        }
    }
    out
}

fn reservoir_term<T: Real>(
    res: &ReservoirSpec<T>,
    eig: &EigenSystem<T>,
    topology: Topology,
) -> Result<SMatrix<T, 16, 16>> {
    let ops = eigenoperators(eig);
    let id = Matrix4::<T>::identity();
    let two = T::lit(2.0);
    let mut l = SMatrix::<T, 16, 16>::zeros();
    for b in Branch::ALL {
        let omega = eig.frequency(b);
        for m in Qubit::ALL {
            for n in Qubit::ALL {
                if topology == Topology::Independent && m != n {
                    continue;
                }
                let vm = eigenoperator(&ops, m, b);
                let vn = eigenoperator(&ops, n, b);
                let down = spectral_density(res, m, n, b, omega, Direction::Emission)?;
                let up = spectral_density(res, m, n, b, omega, Direction::Absorption)?;
                // J(−ω)[2 Vn ρ Vm† − Vm†Vn ρ − ρ Vm†Vn]
                let mdn = vm.transpose() * vn;
                l += (kron(vm, vn) * two - kron(&id, &mdn) - kron(&mdn.transpose(), &id)) * down;
                // J(+ω)[2 Vn† ρ Vm − Vm Vn† ρ − ρ Vm Vn†]
                let mnd = vm * vn.transpose();
                l += (kron(&vm.transpose(), &vn.transpose()) * two - kron(&id, &mnd) - kron(&mnd.transpose(), &id)) * up;
            }
        }
    }
    Ok(l)
}

/// Assembles the dissipator of each reservoir from the eigenoperators.
pub fn build_liouvillian<T: Real>(scenario: &Scenario<T>) -> Result<Liouvillian<T>> {
    let eig = scenario.eigensystem();
    let c = |m: SMatrix<T, 16, 16>| m.map(|x| Complex::new(x, T::zero()));
    Ok(Liouvillian {
        left: c(reservoir_term(&scenario.left, eig, scenario.topology)?),
        right: c(reservoir_term(&scenario.right, eig, scenario.topology)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipators::rates::rate_matrix;
    use crate::dissipators::reservoir::RateTable;
    use crate::model::{diagonal_density, SystemParams};
    use nalgebra::Vector4;

    fn fig2(top: Topology) -> Scenario<f64> {
        Scenario::flat(SystemParams::new(3.0, 4.0, 0.3).unwrap(), top, 100.0, 21.0, 0.003).unwrap()
    }

    #[test]
    fn vectorization_convention() {
        let a = Matrix4::<f64>::from_fn(|i, j| (i * 4 + j) as f64 + 1.0);
        let b = Matrix4::<f64>::from_fn(|i, j| (i as f64 - j as f64) * 0.5);
        let x = Matrix4::<f64>::from_fn(|i, j| (i + 2 * j) as f64);
        let lhs = (a * x * b).map(|v| Complex::new(v, 0.0));
        let k = kron(&b.transpose(), &a).map(|v| Complex::new(v, 0.0));
        let rhs = unvectorize(&(k * vectorize(&x.map(|v| Complex::new(v, 0.0)))));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn population_block_matches_closed_form() {
        for top in [Topology::Common, Topology::Independent] {
            let s = fig2(top);
            let l = build_liouvillian(&s).unwrap();
            let m = rate_matrix(&s).unwrap();
            assert!((l.population_block(None) - m.total()).abs().max() <= 1e-12);
            assert!((l.population_block(Some(ReservoirLabel::Left)) - m.left.total).abs().max() <= 1e-12);
        }
    }

    #[test]
    fn zero_rates_give_zero_generator() {
        let s = fig2(Topology::Common).with_rates(RateTable::flat(0.0), RateTable::flat(0.0)).unwrap();
        let l = build_liouvillian(&s).unwrap();
        assert_eq!(l.total().norm(), 0.0);
    }

    #[test]
    fn trace_preserving_and_secular() {
        let s = fig2(Topology::Common);
        let l = build_liouvillian(&s).unwrap();
        let img = l.apply(&diagonal_density(&Vector4::new(0.1, 0.2, 0.3, 0.4)));
        assert!(img.trace().norm() <= 1e-14);
        let mut off = img;
        off.fill_diagonal(Complex::new(0.0, 0.0));
        assert!(off.norm() <= 1e-14);
        let img = l.apply(&diagonal_density(&Vector4::repeat(0.25)));
        assert!(img.trace().norm() <= 1e-14);
    }
}

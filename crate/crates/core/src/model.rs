//! Two transversely coupled qubits: parameters, eigensystem and eigenoperators.
//!
//! Bare basis order is `{↑↑, ↑↓, ↓↑, ↓↓}` and the Hamiltonian is
//! `H = ω₁/2 σ₁ᶻ + ω₂/2 σ₂ᶻ + g σ₁ˣσ₂ˣ`. Eigenstates are stored with a fixed
//! sign convention so that eigenoperator entries are reproducible:
//!
//! ```text
//! |1⟩ = −sin θs |↑↑⟩ + cos θs |↓↓⟩      λ₁ = −Γs
//! |2⟩ = −sin θd |↑↓⟩ + cos θd |↓↑⟩      λ₂ = −Γd
//! |3⟩ =  cos θd |↑↓⟩ + sin θd |↓↑⟩      λ₃ =  Γd
//! |4⟩ =  cos θs |↑↑⟩ + sin θs |↓↓⟩      λ₄ =  Γs
//! ```

use nalgebra::{Complex, Matrix4, Vector4};

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// 4×4 complex density matrix.
pub type DensityMatrix<T> = Matrix4<Complex<T>>;

/// Relative detuning below which the qubits are treated as resonant.
pub const RESONANCE_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    pub omega1: T,
    pub omega2: T,
    pub g: T,
}

impl<T: Real> SystemParams<T> {
    pub fn new(omega1: T, omega2: T, g: T) -> Result<Self> {
        let p = Self { omega1, omega2, g };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega1 > T::zero()) || !self.omega1.is_finite() {
            return Err(invalid("omega1", "must be finite and > 0"));
        }
        if !(self.omega2 > T::zero()) || !self.omega2.is_finite() {
            return Err(invalid("omega2", "must be finite and > 0"));
        }
        if !(self.g >= T::zero()) || !self.g.is_finite() {
            return Err(invalid("g", "must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn omega_s(&self) -> T {
        (self.omega1 + self.omega2) / T::lit(2.0)
    }

    /// Signed half-detuning `(ω₁ − ω₂)/2`; zero when resonant.
    pub fn omega_d(&self) -> T {
        if self.is_resonant() {
            T::zero()
        } else {
            (self.omega1 - self.omega2) / T::lit(2.0)
        }
    }

    pub fn is_resonant(&self) -> bool {
        let scale = self.omega1.max(self.omega2);
        (self.omega1 - self.omega2).abs() < T::lit(RESONANCE_THRESHOLD) * scale
    }

    pub fn is_uncoupled(&self) -> bool {
        self.g == T::zero()
    }

    /// The Hamiltonian in the bare basis.
    pub fn hamiltonian(&self) -> Matrix4<T> {
        let ws = (self.omega1 + self.omega2) / T::lit(2.0);
        let wd = (self.omega1 - self.omega2) / T::lit(2.0);
        let g = self.g;
        let z = T::zero();
        Matrix4::new(
            ws, z, z, g, //
            z, wd, g, z, //
            z, g, -wd, z, //
            g, z, z, -ws,
        )
    }
}

/// Which of the two transition energies an eigenoperator belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `ω₋ = Γs − Γd`
    Minus,
    /// `ω₊ = Γs + Γd`
    Plus,
}

impl Branch {
    pub const ALL: [Branch; 2] = [Branch::Minus, Branch::Plus];

    pub fn index(self) -> usize {
        match self {
            Branch::Minus => 0,
            Branch::Plus => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    One,
    Two,
}

impl Qubit {
    pub const ALL: [Qubit; 2] = [Qubit::One, Qubit::Two];

    pub fn index(self) -> usize {
        match self {
            Qubit::One => 0,
            Qubit::Two => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem<T> {
    pub params: SystemParams<T>,
    pub gamma_s: T,
    pub gamma_d: T,
    pub theta_s: T,
    pub theta_d: T,
    pub theta_plus: T,
    pub theta_minus: T,
    pub omega_plus: T,
    pub omega_minus: T,
    pub lambdas: Vector4<T>,
    /// Columns are the eigenstates `|1⟩..|4⟩` in bare coordinates.
    pub basis: Matrix4<T>,
}

impl<T: Real> EigenSystem<T> {
    pub fn frequency(&self, branch: Branch) -> T {
        match branch {
            Branch::Minus => self.omega_minus,
            Branch::Plus => self.omega_plus,
        }
    }

    /// Resonant mixing angle `φ = θ + π/4` (equals `θ₊` when resonant).
    pub fn phi(&self) -> T {
        self.theta_s + T::frac_pi_4()
    }
}

/// How the degenerate pair `{↑↓, ↓↑}` is resolved at `ω₁ = ω₂`, `g = 0`,
/// where the Hamiltonian alone does not fix a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegenerateBasis {
    /// Singlet/triplet combinations, the natural basis for a shared reservoir.
    SingletTriplet,
    /// Bare product states, the natural basis for separate reservoirs.
    Bare,
}

/// Half-angle `θ = ½·atan2(g, ω)`, so that `sin θ = g/√((Γ+ω)²+g²)`.
fn mixing_angle<T: Real>(g: T, omega: T, degenerate: DegenerateBasis) -> T {
    if omega == T::zero() && g == T::zero() {
        return match degenerate {
            DegenerateBasis::SingletTriplet => T::frac_pi_4(),
            DegenerateBasis::Bare => T::zero(),
        };
    }
    g.atan2(omega) / T::lit(2.0)
}

/// Diagonalizes the two-qubit Hamiltonian with the fixed sign convention,
/// using the singlet/triplet basis for a degenerate uncoupled pair.
pub fn diagonalize<T: Real>(params: &SystemParams<T>) -> Result<EigenSystem<T>> {
    diagonalize_with(params, DegenerateBasis::SingletTriplet)
}

pub fn diagonalize_with<T: Real>(params: &SystemParams<T>, degenerate: DegenerateBasis) -> Result<EigenSystem<T>> {
    params.validate()?;
    let ws = params.omega_s();
    let wd = params.omega_d();
    let g = params.g;

    let gamma_s = (ws * ws + g * g).sqrt();
    let gamma_d = (wd * wd + g * g).sqrt();
    let theta_s = mixing_angle(g, ws, degenerate);
    let theta_d = mixing_angle(g, wd, degenerate);

    let (ss, cs) = theta_s.sin_cos();
    let (sd, cd) = theta_d.sin_cos();
    let z = T::zero();
    #[rustfmt::skip]
    let basis = Matrix4::new(
        -ss, z,   z,  cs,
        z,  -sd,  cd, z,
        z,   cd,  sd, z,
        cs,  z,   z,  ss,
    );

    Ok(EigenSystem {
        params: *params,
        gamma_s,
        gamma_d,
        theta_s,
        theta_d,
        theta_plus: theta_d + theta_s,
        theta_minus: theta_d - theta_s,
        omega_plus: gamma_s + gamma_d,
        omega_minus: gamma_s - gamma_d,
        lambdas: Vector4::new(-gamma_s, -gamma_d, gamma_d, gamma_s),
        basis,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenOperator<T> {
    pub qubit: Qubit,
    pub branch: Branch,
    pub frequency: T,
    /// Matrix in the eigenbasis.
    pub matrix: Matrix4<T>,
}

fn unit<T: Real>(p: usize, q: usize) -> Matrix4<T> {
    let mut m = Matrix4::zeros();
    m[(p, q)] = T::one();
    m
}

/// The four eigenoperators `V_m(ω∓)`, ordered
/// `[V₁(ω₋), V₁(ω₊), V₂(ω₋), V₂(ω₊)]`.
pub fn eigenoperators<T: Real>(eig: &EigenSystem<T>) -> [EigenOperator<T>; 4] {
    let (sp, cp) = eig.theta_plus.sin_cos();
    let (sm, cm) = eig.theta_minus.sin_cos();
    let e = unit::<T>;
    // 1↔2 and 3↔4 carry ω₋, 1↔3 and 2↔4 carry ω₊.
    let v1m = (e(2, 3) - e(0, 1)) * sp;
    let v1p = (e(0, 2) + e(1, 3)) * cp;
    let v2m = (e(0, 1) + e(2, 3)) * cm;
    let v2p = (e(0, 2) - e(1, 3)) * sm;
    let op = |qubit, branch, matrix| EigenOperator {
        qubit,
        branch,
        frequency: eig.frequency(branch),
        matrix,
    };
    [
        op(Qubit::One, Branch::Minus, v1m),
        op(Qubit::One, Branch::Plus, v1p),
        op(Qubit::Two, Branch::Minus, v2m),
        op(Qubit::Two, Branch::Plus, v2p),
    ]
}

/// Looks up `V_m(ω_i)` in the output of [`eigenoperators`].
pub fn eigenoperator<T: Real>(ops: &[EigenOperator<T>; 4], qubit: Qubit, branch: Branch) -> &Matrix4<T> {
    &ops[2 * qubit.index() + branch.index()].matrix
}

/// Transforms an eigenbasis density matrix into the bare basis.
pub fn to_bare_basis<T: Real>(rho_eigen: &DensityMatrix<T>, eig: &EigenSystem<T>) -> DensityMatrix<T> {
    let b: DensityMatrix<T> = eig.basis.map(|x| Complex::new(x, T::zero()));
    b * rho_eigen * b.transpose()
}

/// Transforms a bare-basis density matrix into the eigenbasis.
pub fn to_eigen_basis<T: Real>(rho_bare: &DensityMatrix<T>, eig: &EigenSystem<T>) -> DensityMatrix<T> {
    let b: DensityMatrix<T> = eig.basis.map(|x| Complex::new(x, T::zero()));
    b.transpose() * rho_bare * b
}

/// Diagonal density matrix from a population vector.
pub fn diagonal_density<T: Real>(populations: &Vector4<T>) -> DensityMatrix<T> {
    DensityMatrix::from_diagonal(&populations.map(|x| Complex::new(x, T::zero())))
}

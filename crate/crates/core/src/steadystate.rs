//! Steady states of the population dynamics.
//!
//! Closed forms (Levi-Civita sum, product form for direct-only dissipation,
//! the equal-rate formula and the dark-state family) plus two numerical
//! paths: Gaussian elimination on the rate matrix and the nullspace of the
//! full Liouvillian.

use nalgebra::{Complex, Matrix2, Matrix4, Vector2, Vector4};

use crate::dissipators::liouvillian::{unvectorize, Liouvillian, VecDensity};
use crate::dissipators::rates::{rate_matrix, RateMatrix};
use crate::dissipators::scenario::{Regime, Scenario, Topology};
use crate::error::{invalid, Error, Result};
use crate::model::{DensityMatrix, EigenSystem};
use crate::scalar::Real;

/// Relative singular-value threshold below which a direction counts as null.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// Populations of the four eigenlevels, nonnegative and summing to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationVector<T: Real>(Vector4<T>);

impl<T: Real> PopulationVector<T> {
    /// Validates an already normalized vector, clamping tiny negative entries.
    pub fn new(v: Vector4<T>) -> Result<Self> {
        let p = Self::clamp(v)?;
        let s = p.sum();
        if (s - T::one()).abs() > T::tol(1e-12) {
            return Err(invalid("populations", format!("sum is {} not 1", s.as_f64())));
        }
        Ok(Self(p))
    }

    /// Normalizes a vector of nonnegative weights (all of one sign is accepted).
    pub fn from_unnormalized(v: Vector4<T>) -> Result<Self> {
        let s = v.sum();
        if s == T::zero() || !s.is_finite() {
            return Err(invalid("populations", "cannot normalize a zero or non-finite vector"));
        }
        let p = Self::clamp(v / s)?;
        Ok(Self(p / p.sum()))
    }

    fn clamp(v: Vector4<T>) -> Result<Vector4<T>> {
        let mut out = v;
        for (i, x) in out.iter_mut().enumerate() {
            if !x.is_finite() {
                return Err(invalid("populations", "non-finite entry"));
            }
            if *x < -T::tol(1e-14) {
                return Err(Error::NegativePopulation {
                    level: i + 1,
                    value: x.as_f64(),
                });
            }
            if *x < T::zero() {
                *x = T::zero();
            }
        }
        Ok(out)
    }

    pub fn vector(&self) -> &Vector4<T> {
        &self.0
    }

    pub fn get(&self, level: usize) -> T {
        self.0[level]
    }

    pub fn ground() -> Self {
        Self(Vector4::new(T::one(), T::zero(), T::zero(), T::zero()))
    }

    pub fn dark() -> Self {
        Self(Vector4::new(T::zero(), T::one(), T::zero(), T::zero()))
    }

    /// `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Self, w: T) -> Self {
        Self(self.0 * w + other.0 * (T::one() - w))
    }
}

/// One-parameter family `ρ₂₂·dark + (1−ρ₂₂)·residual` of the degenerate case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkFamily<T: Real> {
    pub rho22: T,
    pub dark: PopulationVector<T>,
    pub residual: PopulationVector<T>,
}

impl<T: Real> DarkFamily<T> {
    pub fn state(&self) -> PopulationVector<T> {
        self.member(self.rho22)
    }

    pub fn member(&self, rho22: T) -> PopulationVector<T> {
        self.dark.mix(&self.residual, rho22)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SteadyStateResult<T: Real> {
    Unique(PopulationVector<T>),
    Family(DarkFamily<T>),
}

impl<T: Real> SteadyStateResult<T> {
    /// The unique state, or the selected member of the family.
    pub fn state(&self) -> PopulationVector<T> {
        match self {
            SteadyStateResult::Unique(p) => *p,
            SteadyStateResult::Family(f) => f.state(),
        }
    }
}

/// `M^{pq}` (negated rate `p → q`, 0-based) read off a rate matrix.
pub fn element<T: Real>(m: &Matrix4<T>, p: usize, q: usize) -> T {
    -m[(q, p)]
}

/// Number of singular values above `RANK_THRESHOLD · σ_max`.
pub fn numeric_rank<T: Real>(m: &Matrix4<T>) -> usize {
    let sv = m.singular_values();
    let max = sv.max();
    if max == T::zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > T::lit(RANK_THRESHOLD) * max).count()
}

fn permutation_sign(idx: [usize; 4]) -> i32 {
    let mut sign = 1;
    for a in 0..4 {
        for b in a + 1..4 {
            if idx[a] == idx[b] {
                return 0;
            }
            if idx[a] > idx[b] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Literal Levi-Civita closed form for a rank-3 generator:
/// `ϱᵢᵢ ∝ Σ_{k,l} |ε_{ijkl}| (M^{ki} + M^{kj}) M^{li} M^{jl}` with `j = 5 − i`.
pub fn steady_state_levi_civita<T: Real>(m: &Matrix4<T>) -> Result<PopulationVector<T>> {
    let el = |p, q| if p == q { T::zero() } else { element(m, p, q) };
    let mut rho = Vector4::zeros();
    for i in 0..4 {
        let j = 3 - i;
        let mut acc = T::zero();
        for k in 0..4 {
            for l in 0..4 {
                if permutation_sign([i, j, k, l]) == 0 {
                    continue;
                }
                acc += (el(k, i) + el(k, j)) * el(l, i) * el(j, l);
            }
        }
        rho[i] = acc;
    }
    PopulationVector::from_unnormalized(rho)
}

/// Solves `𝓜ϱ = 0`, `Σϱ = 1` by LU elimination.
pub fn steady_state_elimination<T: Real>(m: &Matrix4<T>) -> Result<PopulationVector<T>> {
    let mut a = *m;
    a.row_mut(0).fill(T::one());
    let b = Vector4::new(T::one(), T::zero(), T::zero(), T::zero());
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::DegenerateSteadyState(numeric_rank(m)))?;
    PopulationVector::from_unnormalized(x)
}

/// Product form for direct-only dissipation: `(M³M⁴, M¹M⁴, M²M³, M¹M²)`.
pub fn steady_state_product<T: Real>(m: &Matrix4<T>) -> Result<PopulationVector<T>> {
    let m1 = element(m, 0, 1);
    let m3 = element(m, 1, 0);
    let m2 = element(m, 0, 2);
    let m4 = element(m, 2, 0);
    PopulationVector::from_unnormalized(Vector4::new(m3 * m4, m1 * m4, m2 * m3, m1 * m2))
}

fn check_rank<T: Real>(rates: &RateMatrix<T>) -> Result<usize> {
    let expected = rates.regime.expected_rank();
    let found = numeric_rank(&rates.total());
    if found != expected {
        return Err(Error::RankMismatch { expected, found });
    }
    Ok(found)
}

/// Unique steady state from the closed forms (rank 3 required).
pub fn steady_state_closed_form<T: Real>(rates: &RateMatrix<T>) -> Result<PopulationVector<T>> {
    let rank = check_rank(rates)?;
    if rank != 3 {
        return Err(Error::DegenerateSteadyState(rank));
    }
    let total = rates.total();
    if rates.topology == Topology::Independent || rates.regime == Regime::UncoupledDetuned {
        steady_state_product(&total)
    } else {
        steady_state_levi_civita(&total)
    }
}

/// Equal-rate steady state in terms of `n(ω_i) = n̄_L(ω_i) + n̄_R(ω_i)`.
pub fn equal_rate_steady_state<T: Real>(n_minus: T, n_plus: T) -> Result<PopulationVector<T>> {
    if n_minus < T::zero() || n_plus < T::zero() {
        return Err(invalid("occupation", "occupation sums must be >= 0"));
    }
    let two = T::lit(2.0);
    PopulationVector::from_unnormalized(Vector4::new(
        (n_minus + two) * (n_plus + two),
        n_minus * (n_plus + two),
        (n_minus + two) * n_plus,
        n_minus * n_plus,
    ))
}

/// Residual state `(W̃²W̃⁴, 0, W̃¹W̃⁴, W̃¹W̃³)/Ñ` of a degenerate generator.
pub fn residual_state<T: Real>(m: &Matrix4<T>) -> Result<PopulationVector<T>> {
    let w1 = element(m, 0, 2);
    let w2 = element(m, 2, 0);
    let w3 = element(m, 2, 3);
    let w4 = element(m, 3, 2);
    PopulationVector::from_unnormalized(Vector4::new(w2 * w4, T::zero(), w1 * w4, w1 * w3))
}

/// Dark-state family for the degenerate resonant regime.
pub fn steady_state_family<T: Real>(rates: &RateMatrix<T>, rho22: T) -> Result<SteadyStateResult<T>> {
    if !(T::zero()..=T::one()).contains(&rho22) {
        return Err(invalid("rho22", "dark-state weight must lie in [0, 1]"));
    }
    let rank = numeric_rank(&rates.total());
    if rank == 3 {
        return Err(Error::NotDegenerate);
    }
    check_rank(rates)?;
    if rates.regime != Regime::ResonantDegenerate {
        return Err(Error::RegimeMismatch(format!("dark-state family needs ResonantDegenerate, got {}", rates.regime)));
    }
    Ok(SteadyStateResult::Family(DarkFamily {
        rho22,
        dark: PopulationVector::dark(),
        residual: residual_state(&rates.total())?,
    }))
}

/// Rate matrix plus the steady state; `rho22` selects the family member when degenerate.
pub fn solve<T: Real>(scenario: &Scenario<T>, rho22: T) -> Result<(RateMatrix<T>, SteadyStateResult<T>)> {
    let rates = rate_matrix(scenario)?;
    let result = if scenario.regime() == Regime::ResonantDegenerate {
        steady_state_family(&rates, rho22)?
    } else {
        SteadyStateResult::Unique(steady_state_closed_form(&rates)?)
    };
    Ok((rates, result))
}

/// Thermal populations `∝ exp(−λ_l/T)`; the ground state at `T = 0`.
pub fn gibbs_populations<T: Real>(eig: &EigenSystem<T>, temperature: T) -> Result<PopulationVector<T>> {
    if temperature == T::zero() {
        return Ok(PopulationVector::ground());
    }
    let l0 = eig.lambdas[0];
    PopulationVector::from_unnormalized(eig.lambdas.map(|l| (-(l - l0) / temperature).exp()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum NullspaceState<T: Real> {
    Unique(DensityMatrix<T>),
    Family {
        dark: DensityMatrix<T>,
        residual: DensityMatrix<T>,
    },
}

impl<T: Real> NullspaceState<T> {
    pub fn populations(m: &DensityMatrix<T>) -> Vector4<T> {
        m.diagonal().map(|c| c.re)
    }
}

fn hermitize<T: Real>(m: &DensityMatrix<T>) -> DensityMatrix<T> {
    (m + m.adjoint()) * Complex::new(T::lit(0.5), T::zero())
}

fn check_psd<T: Real>(m: &DensityMatrix<T>) -> Result<()> {
    let min = m.symmetric_eigenvalues().min();
    if min < -T::tol(1e-10) {
        return Err(Error::NotPositive(min.as_f64()));
    }
    Ok(())
}

/// Steady state(s) from the SVD nullspace of the full Liouvillian.
pub fn steady_state_nullspace<T: Real>(l: &Liouvillian<T>) -> Result<NullspaceState<T>> {
    let svd = l.total().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Invariant("SVD did not return V".into()))?;
    let max = svd.singular_values.max();
    let null: Vec<DensityMatrix<T>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= T::lit(RANK_THRESHOLD) * max)
        .map(|(k, _)| {
            let v: VecDensity<T> = v_t.row(k).adjoint();
            unvectorize(&v)
        })
        .collect();
    match null.len() {
        1 => {
            let x = &null[0];
            let rho = hermitize(&(x / x.trace()));
            check_psd(&rho)?;
            Ok(NullspaceState::Unique(rho))
        }
        2 => {
            // Pick combinations with (trace, ρ₂₂) = (1, 1) and (1, 0).
            let a = Matrix2::new(null[0].trace(), null[1].trace(), null[0][(1, 1)], null[1][(1, 1)]);
            let lu = a.lu();
            let one = Complex::new(T::one(), T::zero());
            let zero = Complex::new(T::zero(), T::zero());
            let combo = |rhs: Vector2<Complex<T>>| -> Result<DensityMatrix<T>> {
                let c = lu
                    .solve(&rhs)
                    .ok_or_else(|| Error::Invariant("nullspace does not separate the dark level".into()))?;
                let rho = hermitize(&(null[0] * c[0] + null[1] * c[1]));
                check_psd(&rho)?;
                Ok(rho)
            };
            Ok(NullspaceState::Family {
                dark: combo(Vector2::new(one, one))?,
                residual: combo(Vector2::new(one, zero))?,
            })
        }
        d => Err(Error::NullspaceDimension(d)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipators::liouvillian::build_liouvillian;
    use crate::dissipators::reservoir::{bose_occupation, RateTable};
    use crate::model::SystemParams;
    use approx::assert_relative_eq;

    fn scen(w2: f64, g: f64, top: Topology, tl: f64) -> Scenario<f64> {
        Scenario::flat(SystemParams::new(3.0, w2, g).unwrap(), top, tl, 21.0, 0.003).unwrap()
    }

    #[test]
    fn appendix_formula_example() {
        let p = equal_rate_steady_state(1.0, 0.5).unwrap();
        let expect = Vector4::new(7.5, 2.5, 1.5, 0.5) / 12.0;
        assert_relative_eq!(*p.vector(), expect, epsilon = 1e-15);
        assert_eq!(*equal_rate_steady_state(0.0f64, 0.0).unwrap().vector(), Vector4::new(1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn closed_form_paths_agree() {
        let s = scen(4.0, 0.3, Topology::Common, 100.0);
        let r = rate_matrix(&s).unwrap();
        let a = steady_state_closed_form(&r).unwrap();
        let b = steady_state_elimination(&r.total()).unwrap();
        assert_relative_eq!(*a.vector(), *b.vector(), epsilon = 1e-12);
        assert!((r.total() * a.vector()).norm() < 1e-15);
    }

    #[test]
    fn equal_rate_matches_appendix() {
        for top in [Topology::Common, Topology::Independent] {
            let s = scen(4.0, 0.3, top, 100.0);
            let eig = s.eigensystem();
            let n = |w| bose_occupation(w, 100.0).unwrap() + bose_occupation(w, 21.0).unwrap();
            let expect = equal_rate_steady_state(n(eig.omega_minus), n(eig.omega_plus)).unwrap();
            let got = steady_state_closed_form(&rate_matrix(&s).unwrap()).unwrap();
            assert_relative_eq!(*got.vector(), *expect.vector(), epsilon = 1e-12);
        }
    }

    #[test]
    fn product_form_for_independent() {
        let s = scen(4.0, 0.3, Topology::Independent, 60.0);
        let r = rate_matrix(&s).unwrap();
        let a = steady_state_product(&r.total()).unwrap();
        let b = steady_state_levi_civita(&r.total()).unwrap();
        assert_relative_eq!(*a.vector(), *b.vector(), epsilon = 1e-12);
    }

    #[test]
    fn gibbs_at_equal_temperatures() {
        let s = scen(4.0, 0.3, Topology::Common, 21.0);
        let got = steady_state_closed_form(&rate_matrix(&s).unwrap()).unwrap();
        let g = gibbs_populations(s.eigensystem(), 21.0).unwrap();
        assert_relative_eq!(*got.vector(), *g.vector(), epsilon = 1e-12);
    }

    #[test]
    fn nullspace_matches_closed_form() {
        let s = scen(4.0, 0.3, Topology::Common, 100.0);
        let closed = steady_state_closed_form(&rate_matrix(&s).unwrap()).unwrap();
        match steady_state_nullspace(&build_liouvillian(&s).unwrap()).unwrap() {
            NullspaceState::Unique(rho) => {
                assert_relative_eq!(NullspaceState::populations(&rho), *closed.vector(), epsilon = 1e-10);
            }
            other => panic!("expected unique state, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_family() {
        let s = scen(3.0, 0.3, Topology::Common, 100.0);
        let r = rate_matrix(&s).unwrap();
        assert!(matches!(steady_state_closed_form(&r), Err(Error::DegenerateSteadyState(2))));
        let SteadyStateResult::Family(f) = steady_state_family(&r, 0.25).unwrap() else {
            panic!()
        };
        for w in [0.0, 0.25, 0.5, 0.75, 1.0] {
            assert!((r.total() * f.member(w).vector()).norm() <= 1e-12);
        }
        match steady_state_nullspace(&build_liouvillian(&s).unwrap()).unwrap() {
            NullspaceState::Family { dark, residual } => {
                assert_relative_eq!(NullspaceState::populations(&dark), *PopulationVector::dark().vector(), epsilon = 1e-10);
                assert_relative_eq!(NullspaceState::populations(&residual), *f.residual.vector(), epsilon = 1e-10);
            }
            other => panic!("expected family, got {other:?}"),
        }
    }

    #[test]
    fn family_rejects_unique_case() {
        let r = rate_matrix(&scen(4.0, 0.3, Topology::Common, 100.0)).unwrap();
        assert!(matches!(steady_state_family(&r, 0.5), Err(Error::NotDegenerate)));
    }

    #[test]
    fn zero_dissipation_nullspace_is_error() {
        let s = scen(4.0, 0.3, Topology::Common, 100.0).with_rates(RateTable::flat(0.0), RateTable::flat(0.0)).unwrap();
        let l = build_liouvillian(&s).unwrap();
        assert!(matches!(steady_state_nullspace(&l), Err(Error::NullspaceDimension(16))));
    }

    #[test]
    fn negative_populations_rejected() {
        assert!(PopulationVector::new(Vector4::new(1.1, -0.1, 0.0, 0.0)).is_err());
        let p = PopulationVector::new(Vector4::new(1.0, -1e-16, 0.0, 0.0)).unwrap();
        assert_eq!(p.get(1), 0.0);
    }
}

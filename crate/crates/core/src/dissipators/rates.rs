//! Population rate matrices `d|ϱ⟩/dt = 𝓜|ϱ⟩` for every scenario.
//!
//! Off-diagonal entry `(q, p)` is the transition rate `p → q`; the elements
//! `M^{pq} ≤ 0` are the negated rates, so `𝓜[q][p] = −M^{pq}` and each
//! diagonal entry makes its column sum vanish.

use nalgebra::{Matrix2, Matrix4};

use crate::dissipators::reservoir::{spectral_density, Direction, ReservoirLabel, ReservoirSpec};
use crate::dissipators::scenario::{Regime, Scenario, Topology};
use crate::error::{Error, Result};
use crate::model::{Branch, EigenSystem, Qubit};
use crate::scalar::Real;

/// Direct elements `M¹..M⁴` and cross elements `Ξ¹..Ξ⁴` of one reservoir.
///
/// `M¹/M³` are the absorption/emission elements on ω₋, `M²/M⁴` on ω₊.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateElements<T> {
    pub m: [T; 4],
    pub xi: [T; 4],
}

/// Rate matrices of one reservoir, with the direct/cross split.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRates<T> {
    pub total: Matrix4<T>,
    pub direct: Matrix4<T>,
    pub cross: Matrix4<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix<T> {
    pub regime: Regime,
    pub topology: Topology,
    pub left: ChannelRates<T>,
    pub right: ChannelRates<T>,
}

impl<T: Real> RateMatrix<T> {
    pub fn total(&self) -> Matrix4<T> {
        self.left.total + self.right.total
    }

    pub fn reservoir(&self, label: ReservoirLabel) -> &ChannelRates<T> {
        match label {
            ReservoirLabel::Left => &self.left,
            ReservoirLabel::Right => &self.right,
        }
    }

    /// Zero column sums, nonnegative off-diagonal rates, nonpositive diagonal.
    pub fn check_invariants(&self) -> Result<()> {
        let total = self.total();
        let scale = total.abs().max().max(T::one());
        let tol = T::tol(1e-14) * scale;
        for m in [&self.left.total, &self.right.total] {
            for p in 0..4 {
                let s: T = m.column(p).sum();
                if s.abs() > tol {
                    return Err(Error::Invariant(format!("column {p} sums to {:e}", s.as_f64())));
                }
                for q in 0..4 {
                    let v = m[(q, p)];
                    if (q == p && v > tol) || (q != p && v < -tol) {
                        return Err(Error::Invariant(format!("rate entry ({q},{p}) = {:e} has the wrong sign", v.as_f64())));
                    }
                }
            }
        }
        Ok(())
    }
}

fn j<T: Real>(res: &ReservoirSpec<T>, m: Qubit, n: Qubit, b: Branch, eig: &EigenSystem<T>, dir: Direction) -> Result<T> {
    spectral_density(res, m, n, b, eig.frequency(b), dir)
}

/// Builds the rate matrix from the eight elements `M^{pq}` of the arrow pattern.
#[allow(clippy::too_many_arguments)]
pub fn arrow_matrix<T: Real>(m12: T, m21: T, m34: T, m43: T, m13: T, m31: T, m24: T, m42: T) -> Matrix4<T> {
    let mut a = Matrix4::zeros();
    for &(p, q, v) in &[
        (0, 1, m12),
        (1, 0, m21),
        (2, 3, m34),
        (3, 2, m43),
        (0, 2, m13),
        (2, 0, m31),
        (1, 3, m24),
        (3, 1, m42),
    ] {
        a[(q, p)] = -v;
        a[(p, p)] += v;
    }
    a
}

/// Direct and cross elements for reservoir `label`, valid for any topology.
pub fn rate_elements<T: Real>(scenario: &Scenario<T>, label: ReservoirLabel) -> Result<RateElements<T>> {
    let eig = scenario.eigensystem();
    let res = scenario.reservoir(label);
    let (sp, cp) = eig.theta_plus.sin_cos();
    let (sm, cm) = eig.theta_minus.sin_cos();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    use Branch::*;
    use Direction::*;
    use Qubit::*;
    let mut m = [T::zero(); 4];
    let mut xi = [T::zero(); 4];
    for (k, b, d) in [(0, Minus, Absorption), (1, Plus, Absorption), (2, Minus, Emission), (3, Plus, Emission)] {
        let j11 = j(res, One, One, b, eig, d)?;
        let j22 = j(res, Two, Two, b, eig, d)?;
        let j12 = j(res, One, Two, b, eig, d)?;
        match b {
            Minus => {
                m[k] = -two * (sp * sp * j11 + cm * cm * j22);
                xi[k] = four * sp * cm * j12;
            }
            Plus => {
                m[k] = -two * (cp * cp * j11 + sm * sm * j22);
                xi[k] = four * cp * sm * j12;
            }
        }
    }
    if scenario.topology == Topology::Independent {
        xi = [T::zero(); 4];
    }
    Ok(RateElements { m, xi })
}

/// Direct (Kronecker) part built from `M¹..M⁴`.
fn direct_matrix<T: Real>(e: &RateElements<T>) -> Matrix4<T> {
    let [m1, m2, m3, m4] = e.m;
    arrow_matrix(m1, m3, m1, m3, m2, m4, m2, m4)
}

/// Cross part built from `Ξ¹..Ξ⁴`.
fn cross_matrix<T: Real>(e: &RateElements<T>) -> Matrix4<T> {
    let [x1, x2, x3, x4] = e.xi;
    arrow_matrix(x1, x3, -x1, -x3, -x2, -x4, x2, x4)
}

/// `B₊ ⊗ 1 + 1 ⊗ A₋`: the ω₋ block acts on 1↔2 and 3↔4, the ω₊ block on 1↔3 and 2↔4.
pub fn kronecker_sum<T: Real>(e: &RateElements<T>) -> Matrix4<T> {
    let [m1, m2, m3, m4] = e.m;
    let a = Matrix2::new(m1, -m3, -m1, m3);
    let b = Matrix2::new(m2, -m4, -m2, m4);
    let id = Matrix2::<T>::identity();
    b.kronecker(&id) + id.kronecker(&a)
}

fn split<T: Real>(scenario: &Scenario<T>, label: ReservoirLabel) -> Result<(Matrix4<T>, Matrix4<T>)> {
    let e = rate_elements(scenario, label)?;
    Ok((direct_matrix(&e), cross_matrix(&e)))
}

fn assemble<T: Real>(
    scenario: &Scenario<T>,
    total: impl Fn(ReservoirLabel, &Matrix4<T>, &Matrix4<T>) -> Result<Matrix4<T>>,
) -> Result<RateMatrix<T>> {
    let side = |label| -> Result<ChannelRates<T>> {
        let (direct, cross) = split(scenario, label)?;
        Ok(ChannelRates {
            total: total(label, &direct, &cross)?,
            direct,
            cross,
        })
    };
    Ok(RateMatrix {
        regime: scenario.regime(),
        topology: scenario.topology,
        left: side(ReservoirLabel::Left)?,
        right: side(ReservoirLabel::Right)?,
    })
}

/// Common reservoirs, detuned and coupled: `𝓜 = 𝓜^d + 𝓜^c`, with the total
/// evaluated in the cancellation-free form of [`rate_matrix_breve`].
pub fn rate_matrix_common_detuned<T: Real>(scenario: &Scenario<T>) -> Result<RateMatrix<T>> {
    scenario.require(&[Regime::DetunedCoupled], "rate_matrix_common_detuned")?;
    if scenario.topology != Topology::Common {
        return Err(Error::RegimeMismatch("rate_matrix_common_detuned needs common reservoirs".into()));
    }
    assemble(scenario, |label, _, _| rate_matrix_breve(scenario, label))
}

/// Independent reservoirs (or common ones with `g = 0`, `ω₁ ≠ ω₂`): Kronecker-sum form.
pub fn rate_matrix_independent<T: Real>(scenario: &Scenario<T>) -> Result<RateMatrix<T>> {
    let ok = scenario.topology == Topology::Independent || scenario.regime() == Regime::UncoupledDetuned;
    if !ok {
        return Err(Error::RegimeMismatch(format!(
            "rate_matrix_independent needs independent reservoirs or UncoupledDetuned, got {} ({})",
            scenario.regime(),
            scenario.topology
        )));
    }
    let mut out = assemble(scenario, |label, _, _| Ok(kronecker_sum(&rate_elements(scenario, label)?)))?;
    for side in [&mut out.left, &mut out.right] {
        side.direct = side.total;
        side.cross = Matrix4::zeros();
    }
    Ok(out)
}

/// Resonant qubits: general coupled case, degenerate equal-rate case and the uncoupled variants.
pub fn rate_matrix_resonant<T: Real>(scenario: &Scenario<T>) -> Result<RateMatrix<T>> {
    if !scenario.params.is_resonant() {
        return Err(Error::RegimeMismatch("rate_matrix_resonant needs omega1 = omega2".into()));
    }
    if scenario.topology == Topology::Independent {
        return rate_matrix_independent(scenario);
    }
    let eig = scenario.eigensystem();
    match scenario.regime() {
        Regime::ResonantCoupled => assemble(scenario, |label, _, _| rate_matrix_breve(scenario, label)),
        Regime::ResonantDegenerate if scenario.params.is_uncoupled() => {
            assemble(scenario, |label, _, _| degenerate_uncoupled(scenario.reservoir(label), eig))
        }
        Regime::ResonantDegenerate => assemble(scenario, |label, _, _| {
            let w = degenerate_elements(scenario.reservoir(label), eig)?;
            Ok(degenerate_matrix(&w))
        }),
        Regime::UncoupledResonant => assemble(scenario, |label, _, _| uncoupled_resonant(scenario.reservoir(label), eig)),
        r => Err(Error::RegimeMismatch(format!("rate_matrix_resonant got regime {r}"))),
    }
}

/// Dispatches on the scenario's regime.
pub fn rate_matrix<T: Real>(scenario: &Scenario<T>) -> Result<RateMatrix<T>> {
    if scenario.topology == Topology::Independent || scenario.regime() == Regime::UncoupledDetuned {
        return rate_matrix_independent(scenario);
    }
    match scenario.regime() {
        Regime::DetunedCoupled => rate_matrix_common_detuned(scenario),
        _ => rate_matrix_resonant(scenario),
    }
}

/// `W̃¹..W̃⁴` of the degenerate resonant case (coupled form).
///
/// `W̃¹/W̃²` are absorption/emission on 1↔3 (ω₊), `W̃³/W̃⁴` on 3↔4 (ω₋).
pub fn degenerate_elements<T: Real>(res: &ReservoirSpec<T>, eig: &EigenSystem<T>) -> Result<[T; 4]> {
    let (s, c) = eig.phi().sin_cos();
    let eight = T::lit(8.0);
    let jj = |b, d| j(res, Qubit::One, Qubit::One, b, eig, d);
    Ok([
        -eight * c * c * jj(Branch::Plus, Direction::Absorption)?,
        -eight * c * c * jj(Branch::Plus, Direction::Emission)?,
        -eight * s * s * jj(Branch::Minus, Direction::Absorption)?,
        -eight * s * s * jj(Branch::Minus, Direction::Emission)?,
    ])
}

pub fn degenerate_matrix<T: Real>(w: &[T; 4]) -> Matrix4<T> {
    let z = T::zero();
    arrow_matrix(z, z, w[2], w[3], w[0], w[1], z, z)
}

/// `𝕁^± = −2J(±ω)` at transition `b` (equal rates, uncoupled).
pub fn uncoupled_j<T: Real>(res: &ReservoirSpec<T>, eig: &EigenSystem<T>, b: Branch) -> Result<[T; 2]> {
    let two = T::lit(2.0);
    Ok([
        -two * j(res, Qubit::One, Qubit::One, b, eig, Direction::Absorption)?,
        -two * j(res, Qubit::One, Qubit::One, b, eig, Direction::Emission)?,
    ])
}

fn degenerate_uncoupled<T: Real>(res: &ReservoirSpec<T>, eig: &EigenSystem<T>) -> Result<Matrix4<T>> {
    let [jp_plus, jm_plus] = uncoupled_j(res, eig, Branch::Plus)?;
    let [jp_minus, jm_minus] = uncoupled_j(res, eig, Branch::Minus)?;
    let two = T::lit(2.0);
    let z = T::zero();
    Ok(arrow_matrix(z, z, two * jp_minus, two * jm_minus, two * jp_plus, two * jm_plus, z, z))
}

/// `𝖬¹..𝖬⁴` at transition `b`: `−(J¹¹ + J²² ∓ 2J¹²)` at `+ω` (1, 2) and `−ω` (3, 4).
///
/// With the default cross rate this is `−[√J¹¹ ∓ √J²²]²`.
pub fn uncoupled_resonant_elements<T: Real>(res: &ReservoirSpec<T>, eig: &EigenSystem<T>, b: Branch) -> Result<[T; 4]> {
    let two = T::lit(2.0);
    let mut out = [T::zero(); 4];
    for (k, d) in [(0, Direction::Absorption), (2, Direction::Emission)] {
        let j11 = j(res, Qubit::One, Qubit::One, b, eig, d)?;
        let j22 = j(res, Qubit::Two, Qubit::Two, b, eig, d)?;
        let j12 = j(res, Qubit::One, Qubit::Two, b, eig, d)?;
        out[k] = -(j11 + j22 - two * j12);
        out[k + 1] = -(j11 + j22 + two * j12);
    }
    Ok(out)
}

fn uncoupled_resonant<T: Real>(res: &ReservoirSpec<T>, eig: &EigenSystem<T>) -> Result<Matrix4<T>> {
    let mm = uncoupled_resonant_elements(res, eig, Branch::Minus)?;
    let mp = uncoupled_resonant_elements(res, eig, Branch::Plus)?;
    // M¹² = M²⁴ = 𝖬¹, M¹³ = M³⁴ = 𝖬², M²¹ = M⁴² = 𝖬³, M³¹ = M⁴³ = 𝖬⁴.
    Ok(arrow_matrix(mm[0], mm[2], mm[1], mm[3], mp[1], mp[3], mp[0], mp[2]))
}

/// Total rate matrix of a common reservoir in a cancellation-free form.
///
/// Each element `−2(a₁²J¹¹ + a₂²J²² + 2a₁a₂J¹²)` is written as
/// `−2(M̆^{pq})² + 4a₁a₂(√(J¹¹J²²) − J¹²)` with `M̆ = a₁√J¹¹ + a₂√J²²`. The
/// second term vanishes for the default cross rate `γ¹² = √(γ¹¹γ²²)`. Summing
/// direct and cross parts instead loses digits when `a₁√J¹¹ ≈ −a₂√J²²`,
/// which happens close to the degenerate regime.
pub fn rate_matrix_breve<T: Real>(scenario: &Scenario<T>, label: ReservoirLabel) -> Result<Matrix4<T>> {
    let res = scenario.reservoir(label);
    if scenario.topology != Topology::Common {
        return Err(Error::RegimeMismatch("breve form needs common reservoirs".into()));
    }
    let eig = scenario.eigensystem();
    let (sp, cp) = eig.theta_plus.sin_cos();
    let (sm, cm) = eig.theta_minus.sin_cos();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let el = |b: Branch, d: Direction, a1: T, a2: T| -> Result<T> {
        let r1 = j(res, Qubit::One, Qubit::One, b, eig, d)?.sqrt();
        let r2 = j(res, Qubit::Two, Qubit::Two, b, eig, d)?.sqrt();
        let v = a1 * r1 + a2 * r2;
        let i = b.index();
        let defect = (res.rates.gamma11[i] * res.rates.gamma22[i]).sqrt() - res.rates.gamma12[i];
        let mut out = -two * v * v;
        if defect != T::zero() {
            let nbar = res.occupation(eig.frequency(b))?;
            let f = match d {
                Direction::Absorption => nbar,
                Direction::Emission => nbar + T::one(),
            };
            out += four * a1 * a2 * defect * f;
        }
        Ok(out)
    };
    use Branch::*;
    use Direction::*;
    Ok(arrow_matrix(
        el(Minus, Absorption, -sp, cm)?,
        el(Minus, Emission, -sp, cm)?,
        el(Minus, Absorption, sp, cm)?,
        el(Minus, Emission, sp, cm)?,
        el(Plus, Absorption, cp, sm)?,
        el(Plus, Emission, cp, sm)?,
        el(Plus, Absorption, cp, -sm)?,
        el(Plus, Emission, cp, -sm)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipators::reservoir::RateTable;
    use crate::model::SystemParams;
    use approx::assert_relative_eq;

    fn fig2(top: Topology) -> Scenario<f64> {
        Scenario::flat(SystemParams::new(3.0, 4.0, 0.3).unwrap(), top, 100.0, 21.0, 0.003).unwrap()
    }

    #[test]
    fn columns_sum_to_zero() {
        let m = rate_matrix(&fig2(Topology::Common)).unwrap();
        m.check_invariants().unwrap();
        for p in 0..4 {
            assert!(m.total().column(p).sum().abs() <= 1e-14);
        }
    }

    #[test]
    fn direct_part_is_independent_matrix() {
        let c = rate_matrix(&fig2(Topology::Common)).unwrap();
        let i = rate_matrix(&fig2(Topology::Independent)).unwrap();
        assert_relative_eq!(c.left.direct, i.left.total, epsilon = 1e-15);
        assert_relative_eq!(c.total() - c.left.cross - c.right.cross, i.total(), epsilon = 1e-15);
    }

    #[test]
    fn first_direct_element() {
        let s = fig2(Topology::Independent);
        let e = rate_elements(&s, ReservoirLabel::Left).unwrap();
        let eig = s.eigensystem();
        let n = 1.0 / (eig.omega_minus / 100.0).exp_m1();
        let expect = -2.0 * 0.003 * n * (eig.theta_plus.sin().powi(2) + eig.theta_minus.cos().powi(2));
        assert_relative_eq!(e.m[0], expect, epsilon = 1e-16);
    }

    #[test]
    fn zero_cross_rate_gives_zero_cross_part() {
        let mut t = RateTable::flat(0.003);
        t.gamma12 = [0.0, 0.0];
        let s = fig2(Topology::Common).with_rates(t, t).unwrap();
        let m = rate_matrix(&s).unwrap();
        assert_eq!(m.left.cross, Matrix4::zeros());
        assert_eq!(m.right.cross, Matrix4::zeros());
    }

    #[test]
    fn breve_form_agrees() {
        let mut t = RateTable::per_qubit([0.002, 0.004], [0.003, 0.001]);
        for cross in [t.gamma12, [0.001, 0.0015], [0.0, 0.0]] {
            t.gamma12 = cross;
            let s = fig2(Topology::Common).with_rates(t, t).unwrap();
            let m = rate_matrix(&s).unwrap();
            let b = rate_matrix_breve(&s, ReservoirLabel::Left).unwrap();
            assert_relative_eq!(m.left.direct + m.left.cross, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn breve_form_keeps_small_rates() {
        // g >> detuning: the 1<->2 coefficients nearly cancel
        let s = Scenario::<f64>::flat(SystemParams::new(3.0, 3.001, 2.0).unwrap(), Topology::Common, 100.0, 21.0, 0.003).unwrap();
        let b = rate_matrix_breve(&s, ReservoirLabel::Left).unwrap();
        let m = rate_matrix(&s).unwrap();
        let eig = s.eigensystem();
        let (sp, cm) = (eig.theta_plus.sin(), eig.theta_minus.cos());
        let nbar = crate::dissipators::bose_occupation(eig.omega_minus, 100.0).unwrap();
        let exact = 2.0 * 0.003 * nbar * (cm - sp) * (cm - sp);
        assert!((cm - sp).abs() < 1e-3);
        assert_relative_eq!(b[(1, 0)], exact, max_relative = 1e-12);
        assert_eq!(m.left.total, b);
        // the summed split is only good to roughly eps / (cm - sp)^2 here
        let summed = (m.left.direct + m.left.cross)[(1, 0)];
        assert_relative_eq!(summed, exact, max_relative = 1e-6);
    }

    #[test]
    fn degenerate_dark_column() {
        let s = Scenario::flat(SystemParams::new(3.0, 3.0, 0.3).unwrap(), Topology::Common, 100.0, 21.0, 0.003).unwrap();
        let m = rate_matrix(&s).unwrap();
        for side in [&m.left, &m.right] {
            assert!(side.total.column(1).iter().all(|&v| v == 0.0));
            assert!(side.total.row(1).iter().all(|&v| v == 0.0));
            assert_relative_eq!(side.total, side.direct + side.cross, epsilon = 1e-15);
        }
    }

    #[test]
    fn uncoupled_equal_rates_block_one_two() {
        let t = RateTable::per_qubit([0.003, 0.003], [0.003, 0.003]);
        let p = SystemParams::new(3.0, 3.0, 0.0).unwrap();
        let s = Scenario::flat(p, Topology::Common, 50.0, 20.0, 0.003).unwrap().with_rates(t, t).unwrap();
        let e = uncoupled_resonant_elements(s.reservoir(ReservoirLabel::Left), s.eigensystem(), Branch::Minus).unwrap();
        assert_relative_eq!(e[0], 0.0, epsilon = 1e-16);
    }

    #[test]
    fn degenerate_forms_agree_at_zero_coupling() {
        let res = ReservoirSpec::new(ReservoirLabel::Left, 40.0, RateTable::flat(0.01)).unwrap();
        let eig = crate::model::diagonalize(&SystemParams::new(2.0, 2.0, 0.0).unwrap()).unwrap();
        let a = degenerate_matrix(&degenerate_elements(&res, &eig).unwrap());
        let b = degenerate_uncoupled(&res, &eig).unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-15);
    }

    #[test]
    fn regime_guards() {
        assert!(rate_matrix_common_detuned(&fig2(Topology::Independent)).is_err());
        assert!(rate_matrix_independent(&fig2(Topology::Common)).is_err());
        assert!(rate_matrix_resonant(&fig2(Topology::Common)).is_err());
    }
}

//! Parameter grids over a scenario template.
//!
//! Each grid point is evaluated independently (in parallel via rayon) and
//! the table is returned in row-major grid order whatever the scheduling.

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector4;
use rayon::prelude::*;

use super::{evaluate, HeatCurrentReport};
use crate::dissipators::reservoir::{RateTable, ReservoirLabel};
use crate::dissipators::scenario::{Regime, Scenario, Topology};
use crate::entanglement::{bare_state, coa_general};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Absolute tolerance for the per-row invariant checks.
pub const ROW_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    TemperatureLeft,
    Coupling,
    Omega2,
    /// Sets every rate at `ω₋` (all `m, n`, both reservoirs).
    GammaMinus,
    /// Sets every rate at `ω₊` (all `m, n`, both reservoirs).
    GammaPlus,
    /// Dark-state weight used when the steady state is degenerate.
    DarkPopulation,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 6] = [
        SweepAxis::TemperatureLeft,
        SweepAxis::Coupling,
        SweepAxis::Omega2,
        SweepAxis::GammaMinus,
        SweepAxis::GammaPlus,
        SweepAxis::DarkPopulation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::TemperatureLeft => "t_left",
            SweepAxis::Coupling => "g",
            SweepAxis::Omega2 => "omega2",
            SweepAxis::GammaMinus => "gamma_minus",
            SweepAxis::GammaPlus => "gamma_plus",
            SweepAxis::DarkPopulation => "rho22",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidAxis(format!("unknown axis `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec<T> {
    pub axis: SweepAxis,
    pub values: Vec<T>,
}

impl<T: Real> AxisSpec<T> {
    /// `n` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(axis: SweepAxis, start: T, stop: T, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidAxis(format!("{axis}: empty grid")));
        }
        let values = if n == 1 {
            vec![start]
        } else {
            let step = (stop - start) / T::lit((n - 1) as f64);
            (0..n)
                .map(|k| if k == n - 1 { stop } else { start + step * T::lit(k as f64) })
                .collect()
        };
        let spec = Self { axis, values };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |v: &T| match self.axis {
            SweepAxis::TemperatureLeft | SweepAxis::GammaMinus | SweepAxis::GammaPlus | SweepAxis::Coupling => *v < T::zero(),
            SweepAxis::Omega2 => *v <= T::zero(),
            SweepAxis::DarkPopulation => *v < T::zero() || *v > T::one(),
        };
        if self.values.is_empty() {
            return Err(Error::InvalidAxis(format!("{}: empty grid", self.axis)));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite() || bad(v)) {
            return Err(Error::InvalidAxis(format!("{}: value {} out of range", self.axis, v.as_f64())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T: Real> {
    /// Axis values in the order the axes were given.
    pub coords: Vec<T>,
    pub regime: Regime,
    pub populations: Vector4<T>,
    /// Currents of the template topology; `delta_left` compares against the other one.
    pub report: HeatCurrentReport<T>,
    pub coa: T,
}

fn set_gamma<T: Real>(table: &RateTable<T>, k: usize, v: T) -> RateTable<T> {
    let mut t = *table;
    t.gamma11[k] = v;
    t.gamma22[k] = v;
    t.gamma12[k] = v;
    t
}

/// Scenario and dark weight at one grid point.
pub fn apply_axes<T: Real>(template: &Scenario<T>, axes: &[(SweepAxis, T)], rho22: T) -> Result<(Scenario<T>, T)> {
    let mut s = template.clone();
    let mut w = rho22;
    for &(axis, v) in axes {
        s = match axis {
            SweepAxis::TemperatureLeft => s.with_temperature(ReservoirLabel::Left, v)?,
            SweepAxis::Coupling => {
                let mut p = s.params;
                p.g = v;
                s.with_params(p)?
            }
            SweepAxis::Omega2 => {
                let mut p = s.params;
                p.omega2 = v;
                s.with_params(p)?
            }
            SweepAxis::GammaMinus | SweepAxis::GammaPlus => {
                let k = if axis == SweepAxis::GammaMinus { 0 } else { 1 };
                let l = set_gamma(&s.left.rates, k, v);
                let r = set_gamma(&s.right.rates, k, v);
                s.with_rates(l, r)?
            }
            SweepAxis::DarkPopulation => {
                w = v;
                s
            }
        };
    }
    Ok((s, w))
}

/// Evaluates one grid point, checking the report invariants.
pub fn sweep_point<T: Real>(template: &Scenario<T>, axes: &[(SweepAxis, T)], rho22: T) -> Result<SweepRow<T>> {
    let (s, w) = apply_axes(template, axes, rho22)?;
    let (result, mut report) = evaluate(&s, w)?;
    let other = s.with_topology(match s.topology {
        Topology::Common => Topology::Independent,
        Topology::Independent => Topology::Common,
    })?;
    let (_, other_report) = evaluate(&other, w)?;
    report.delta_left = Some(match s.topology {
        Topology::Common => other_report.left.total - report.left.total,
        Topology::Independent => report.left.total - other_report.left.total,
    });
    report.check_invariants(T::lit(ROW_TOLERANCE))?;
    let state = result.state();
    let coa = coa_general(&bare_state(&state, s.eigensystem()))?;
    Ok(SweepRow {
        coords: axes.iter().map(|a| a.1).collect(),
        regime: s.regime(),
        populations: *state.vector(),
        report,
        coa,
    })
}

/// Row-major grid over one or two axes; the last axis varies fastest.
pub fn sweep<T: Real>(template: &Scenario<T>, axes: &[AxisSpec<T>], rho22: T) -> Result<Vec<SweepRow<T>>> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::InvalidAxis(format!("expected 1 or 2 axes, got {}", axes.len())));
    }
    if axes.len() == 2 && axes[0].axis == axes[1].axis {
        return Err(Error::InvalidAxis(format!("axis {} given twice", axes[0].axis)));
    }
    for a in axes {
        a.validate()?;
    }
    let inner = axes.last().map(|a| a.values.len()).unwrap_or(1);
    let total: usize = axes.iter().map(|a| a.values.len()).product();
    (0..total)
        .into_par_iter()
        .map(|idx| {
            let point: Vec<(SweepAxis, T)> = if axes.len() == 1 {
                vec![(axes[0].axis, axes[0].values[idx])]
            } else {
                vec![(axes[0].axis, axes[0].values[idx / inner]), (axes[1].axis, axes[1].values[idx % inner])]
            };
            sweep_point(template, &point, rho22)
        })
        .collect()
}

/// Points where `values` (row-major over `xs × ys`) changes sign, by linear
/// interpolation along grid edges.
pub fn zero_contour<T: Real>(xs: &[T], ys: &[T], values: &[T]) -> Vec<(T, T)> {
    let ny = ys.len();
    let mut out = Vec::new();
    if values.len() != xs.len() * ny {
        return out;
    }
    let at = |i: usize, j: usize| values[i * ny + j];
    let cross = |a: T, b: T, pa: T, pb: T| -> Option<T> {
        if a == T::zero() {
            return Some(pa);
        }
        if (a > T::zero()) != (b > T::zero()) && b != T::zero() {
            return Some(pa + (pb - pa) * a / (a - b));
        }
        None
    };
    for i in 0..xs.len() {
        for j in 0..ny {
            if j + 1 < ny {
                if let Some(y) = cross(at(i, j), at(i, j + 1), ys[j], ys[j + 1]) {
                    out.push((xs[i], y));
                }
            }
            if i + 1 < xs.len() && at(i, j) != T::zero() {
                if let Some(x) = cross(at(i, j), at(i + 1, j), xs[i], xs[i + 1]) {
                    out.push((x, ys[j]));
                }
            }
        }
    }
    out
}

/// Zero crossings of a sampled 1-D curve.
pub fn zero_crossings<T: Real>(xs: &[T], values: &[T]) -> Vec<T> {
    zero_contour(&[T::zero()], xs, values).into_iter().map(|p| p.1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemParams;
    use approx::assert_relative_eq;

    fn template(top: Topology) -> Scenario<f64> {
        Scenario::flat(SystemParams::new(3.0, 4.0, 0.3).unwrap(), top, 100.0, 21.0, 0.003).unwrap()
    }

    #[test]
    fn temperature_root_at_equilibrium() {
        let ax = AxisSpec::linspace(SweepAxis::TemperatureLeft, 11.0, 31.0, 11).unwrap();
        let rows = sweep(&template(Topology::Common), std::slice::from_ref(&ax), 0.0).unwrap();
        let q: Vec<f64> = rows.iter().map(|r| r.report.left.total).collect();
        let roots = zero_crossings(&ax.values, &q);
        assert_eq!(roots.len(), 1);
        assert_relative_eq!(roots[0], 21.0, epsilon = 1e-12);
    }

    #[test]
    fn order_is_row_major() {
        let a = AxisSpec::linspace(SweepAxis::GammaMinus, 0.001, 0.003, 3).unwrap();
        let b = AxisSpec::linspace(SweepAxis::Coupling, 0.1, 0.3, 2).unwrap();
        let rows = sweep(&template(Topology::Common), &[a, b], 0.0).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[1].coords, vec![0.001, 0.3]);
        assert_eq!(rows[2].coords, vec![0.002, 0.1]);
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(AxisSpec::linspace(SweepAxis::TemperatureLeft, -1.0, 2.0, 3).is_err());
        assert!(AxisSpec::linspace(SweepAxis::DarkPopulation, 0.0, 1.5, 3).is_err());
        assert!("bogus".parse::<SweepAxis>().is_err());
        assert_eq!("gamma_plus".parse::<SweepAxis>().unwrap(), SweepAxis::GammaPlus);
    }

    #[test]
    fn contour_on_plane() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [0.0, 1.0, 2.0];
        let v: Vec<f64> = (0..9).map(|k| (k / 3) as f64 - 0.5).collect();
        let c = zero_contour(&xs, &ys, &v);
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(|p| (p.0 - 0.5).abs() < 1e-15));
    }
}

//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use nalgebra::SVector;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub rtol: T,
    pub atol: T,
    /// Smallest step accepted before giving up.
    pub min_step: T,
    /// Largest step taken; keeps stiff-ish linear systems inside the stability region.
    pub max_step: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            rtol: T::tol(1e-10),
            atol: T::tol(1e-12),
            min_step: T::lit(1e-14),
            max_step: T::lit(f64::MAX),
        }
    }
}

impl<T: Real> Tolerances<T> {
    pub fn with_max_step(mut self, h: T) -> Self {
        self.max_step = h;
        self
    }
}

/// Integrator state carried between calls so the step size survives across
/// sampling intervals.
#[derive(Debug, Clone)]
pub struct Dopri5<T: Real, const N: usize> {
    pub tol: Tolerances<T>,
    pub t: T,
    pub y: SVector<T, N>,
    h: Option<T>,
    pub steps: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// error weights: b - b*
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

impl<T: Real, const N: usize> Dopri5<T, N> {
    pub fn new(t0: T, y0: SVector<T, N>, tol: Tolerances<T>) -> Self {
        Self { tol, t: t0, y: y0, h: None, steps: 0 }
    }

    fn err_norm(&self, y_new: &SVector<T, N>, err: &SVector<T, N>) -> T {
        let mut acc = T::zero();
        for i in 0..N {
            let sc = self.tol.atol + self.tol.rtol * self.y[i].abs().max(y_new[i].abs());
            let r = err[i] / sc;
            acc += r * r;
        }
        (acc / T::lit(N as f64)).sqrt()
    }

    /// Advances to `t_end` (which must not lie behind the current time).
    pub fn advance<F>(&mut self, mut f: F, t_end: T) -> Result<&SVector<T, N>>
    where
        F: FnMut(T, &SVector<T, N>) -> SVector<T, N>,
    {
        let l = T::lit;
        let span = t_end - self.t;
        if span <= T::zero() {
            return Ok(&self.y);
        }
        let mut k1 = f(self.t, &self.y);
        let mut h = match self.h {
            Some(h) => h,
            None => {
                let scale = k1.norm() / (self.y.norm() + self.tol.atol);
                if scale > T::zero() {
                    (l(0.01) / scale).min(span)
                } else {
                    span
                }
            }
        };
        h = h.min(self.tol.max_step);
        while self.t < t_end {
            let last = self.t + h >= t_end;
            let hs = if last { t_end - self.t } else { h };
            if hs < self.tol.min_step && !last {
                return Err(Error::StepSizeUnderflow(hs.as_f64()));
            }
            let (t, y) = (self.t, self.y);
            let k2 = f(t + hs * l(C2), &(y + k1 * (hs * l(A21))));
            let k3 = f(t + hs * l(C3), &(y + (k1 * l(A31) + k2 * l(A32)) * hs));
            let k4 = f(t + hs * l(C4), &(y + (k1 * l(A41) + k2 * l(A42) + k3 * l(A43)) * hs));
            let k5 = f(t + hs * l(C5), &(y + (k1 * l(A51) + k2 * l(A52) + k3 * l(A53) + k4 * l(A54)) * hs));
            let k6 = f(t + hs, &(y + (k1 * l(A61) + k2 * l(A62) + k3 * l(A63) + k4 * l(A64) + k5 * l(A65)) * hs));
            let y_new = y + (k1 * l(B1) + k3 * l(B3) + k4 * l(B4) + k5 * l(B5) + k6 * l(B6)) * hs;
            let k7 = f(t + hs, &y_new);
            let err = (k1 * l(E1) + k3 * l(E3) + k4 * l(E4) + k5 * l(E5) + k6 * l(E6) + k7 * l(E7)) * hs;
            let en = self.err_norm(&y_new, &err);
            let factor = if en == T::zero() {
                l(5.0)
            } else {
                (l(0.9) * en.powf(l(-0.2))).max(l(0.2)).min(l(5.0))
            };
            if en <= T::one() {
                self.t = if last { t_end } else { t + hs };
                self.y = y_new;
                self.steps += 1;
                k1 = k7;
                if !last {
                    h = (hs * factor).min(self.tol.max_step);
                }
            } else {
                h = hs * factor.min(T::one());
                if h < self.tol.min_step {
                    return Err(Error::StepSizeUnderflow(h.as_f64()));
                }
            }
        }
        self.h = Some(h);
        Ok(&self.y)
    }
}

/// Integrates from `t0` to `t1` in one call.
pub fn integrate<T, F, const N: usize>(f: F, t0: T, y0: SVector<T, N>, t1: T, tol: Tolerances<T>) -> Result<SVector<T, N>>
where
    T: Real,
    F: FnMut(T, &SVector<T, N>) -> SVector<T, N>,
{
    let mut s = Dopri5::new(t0, y0, tol);
    s.advance(f, t1).copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{Vector1, Vector2};

    #[test]
    fn exponential_decay() {
        let y = integrate(|_, y: &Vector1<f64>| -y, 0.0, Vector1::new(1.0), 5.0, Tolerances::default()).unwrap();
        assert_relative_eq!(y[0], (-5.0f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn harmonic_oscillator_over_many_periods() {
        let f = |_, y: &Vector2<f64>| Vector2::new(y[1], -y[0]);
        let mut s = Dopri5::new(0.0, Vector2::new(1.0, 0.0), Tolerances::default());
        for k in 1..=20 {
            let t = k as f64 * 0.5 * std::f64::consts::PI;
            let y = s.advance(f, t).unwrap();
            assert!((y[0] - t.cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn fixed_point_stays_put_with_step_cap() {
        let f = |_, y: &Vector1<f64>| (y - Vector1::new(2.0)) * -3.0;
        let tol = Tolerances::default().with_max_step(1.0 / 3.0);
        let y = integrate(f, 0.0, Vector1::new(2.0 + 1e-16), 1e3, tol).unwrap();
        assert!((y[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_span_is_identity() {
        let y = integrate(|_, y: &Vector1<f64>| -y, 1.0, Vector1::new(3.0), 1.0, Tolerances::default()).unwrap();
        assert_eq!(y[0], 3.0);
    }

    #[test]
    fn single_precision() {
        let y = integrate(|_, y: &Vector1<f32>| -y, 0.0f32, Vector1::new(1.0f32), 1.0, Tolerances::default()).unwrap();
        assert!((y[0] - (-1.0f32).exp()).abs() < 1e-5);
    }
}

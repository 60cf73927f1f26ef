//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point type the library is generic over (`f32` or `f64`).
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    /// Lossy conversion back to `f64`, for reporting and output only.
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// A tolerance of `x`, never tighter than a few ulps of the type.
    ///
    /// Tolerances in the library are expressed for `f64`; for `f32` they are
    /// widened to what single precision can resolve.
    fn tol(x: f64) -> Self {
        let floor = Self::default_epsilon() * Self::lit(64.0);
        let t = Self::lit(x);
        if t > floor {
            t
        } else {
            floor
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

//! Scalar abstraction for every numeric kernel in this crate.
//!
//! All geometry code is generic over [`Real`] so the same routines run at
//! `f64`, `f32`, and — crucially — over nested forward-mode duals
//! ([`crate::dual::Dual`]), which is how higher-order jets of embeddings are
//! propagated without symbolic differentiation.

use num_traits::{Float, FromPrimitive};
use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating-point scalar usable throughout the crate.
///
/// Beyond the `num_traits` bounds this adds [`Real::approx_f64`], a lossy
/// projection to `f64` used for control flow only (domain checks, interval
/// lookup in piecewise interpolants, convergence tests). For a dual number
/// the projection returns the value part, so branching never consumes
/// derivative information.
pub trait Real:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Value part as `f64`; used for branching, never for arithmetic.
    fn approx_f64(self) -> f64;

    /// Shorthand for converting a literal into the scalar type.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal must convert")
    }
}

impl Real for f64 {
    #[inline]
    fn approx_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn approx_f64(self) -> f64 {
        self as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_of_squares<T: Real>(xs: &[T]) -> T {
        xs.iter().fold(T::zero(), |acc, &x| acc + x * x)
    }

    #[test]
    fn generic_kernel_runs_at_both_widths() {
        let a = sum_of_squares(&[3.0f64, 4.0]);
        assert_eq!(a, 25.0);
        let b = sum_of_squares(&[3.0f32, 4.0]);
        assert_eq!(b, 25.0);
    }

    #[test]
    fn literal_conversion() {
        assert_eq!(f64::of(0.5), 0.5);
        assert_eq!(f32::of(0.5), 0.5f32);
        assert_eq!(1.25f64.approx_f64(), 1.25);
    }
}

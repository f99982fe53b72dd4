//! Scalar abstraction shared by every module.
//!
//! All geometry is written against [`Real`], which is implemented for `f32`
//! and `f64`. Numerical tolerances are part of the scalar type because the
//! meaningful thresholds differ by many orders of magnitude between the two.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance table for this precision.
    fn tolerances() -> Tolerances<Self>;

    /// Converts an `f64` literal. Never fails for finite input.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Numerical thresholds used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Maximum deviation of a matrix from its conjugate transpose.
    pub hermitian: T,
    /// Slack on the operator bounds `0 <= A <= 1`.
    pub operator_bound: T,
    /// Negative square-root arguments above `-sqrt_clamp` are clamped to zero.
    pub sqrt_clamp: T,
    /// Absolute tolerance for regime and boundary comparisons.
    pub compare: T,
    /// Largest negative discriminant accepted as rounding noise.
    pub discriminant: T,
    /// Slack for the four witness inequalities and eigenvalue checks.
    pub psd: T,
    /// Membership slack in the disk feasibility test.
    pub membership: T,
}

impl Real for f64 {
    fn tolerances() -> Tolerances<f64> {
        Tolerances {
            hermitian: 1e-10,
            operator_bound: 1e-10,
            sqrt_clamp: 1e-12,
            compare: 1e-12,
            discriminant: 1e-10,
            psd: 1e-9,
            membership: 1e-12,
        }
    }
}

impl Real for f32 {
    fn tolerances() -> Tolerances<f32> {
        Tolerances {
            hermitian: 1e-5,
            operator_bound: 1e-5,
            sqrt_clamp: 1e-6,
            compare: 1e-6,
            discriminant: 1e-5,
            psd: 1e-4,
            membership: 1e-6,
        }
    }
}

/// Square root of `x`, treating values in `[-clamp, 0)` as zero.
///
/// Returns `None` for arguments further below zero.
#[inline]
pub fn clamped_sqrt<T: Real>(x: T, clamp: T) -> Option<T> {
    if x >= T::zero() {
        Some(x.sqrt())
    } else if x >= -clamp {
        Some(T::zero())
    } else {
        None
    }
}

/// Square root with the crate's default clamp; larger negatives also map to zero.
#[inline]
pub(crate) fn sqrt0<T: Real>(x: T) -> T {
    if x > T::zero() {
        x.sqrt()
    } else {
        T::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_accepts_tiny_negatives_only() {
        assert_eq!(clamped_sqrt(4.0_f64, 1e-12), Some(2.0));
        assert_eq!(clamped_sqrt(-5e-13_f64, 1e-12), Some(0.0));
        assert_eq!(clamped_sqrt(-1e-9_f64, 1e-12), None);
    }

    #[test]
    fn f32_tolerances_are_looser() {
        let t32 = f32::tolerances();
        let t64 = f64::tolerances();
        assert!(f64::from(t32.compare) > t64.compare);
        assert!(f64::from(t32.psd) > t64.psd);
    }
}

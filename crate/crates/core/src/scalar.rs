//! Scalar abstraction shared by every numeric routine in the crate.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt;

/// Floating point scalar usable for weights, cochains and operators.
///
/// Implemented for `f32` and `f64`. Dense linear algebra goes through
/// `nalgebra`, so the bound includes [`RealField`].
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + fmt::Debug + fmt::Display + 'static
{
    /// Converts an `f64` literal. Panics only if the value is not representable,
    /// which never happens for the finite literals used in this crate.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn from_count(x: usize) -> Self {
        Self::from_usize(x).expect("count fits in scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Tolerance pair used by the verification routines.
///
/// `exact` is used for identities that are rational functions of the inputs
/// (operator equalities, weight recursions). `bound` is used as additive slack
/// on inequalities and as the residual threshold of randomized identity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub exact: f64,
    pub bound: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { exact: 1e-10, bound: 1e-9 }
    }
}

impl Tolerance {
    /// Uses the same value for both thresholds.
    pub fn uniform(tol: f64) -> Self {
        Tolerance { exact: tol, bound: tol }
    }

    /// Looser pair for single precision runs.
    pub fn single_precision() -> Self {
        Tolerance { exact: 1e-4, bound: 1e-3 }
    }
}

/// `|a - b| <= tol * (1 + |a| + |b|)`.
pub fn approx_eq<T: Real>(a: T, b: T, tol: f64) -> bool {
    let t = T::lit(tol);
    (a - b).abs() <= t * (T::one() + a.abs() + b.abs())
}

/// Relative residual of `a` against `b` measured on `scale`, the sum of the
/// magnitudes of the terms that produced them. Zero when both vanish.
pub fn relative_residual<T: Real>(a: T, b: T, scale: T) -> f64 {
    let diff = (a - b).abs().as_f64();
    let s = scale.abs().as_f64();
    if diff == 0.0 {
        0.0
    } else if s == 0.0 {
        f64::INFINITY
    } else {
        diff / s
    }
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub(crate) fn factorial_real<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::from_count(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_tolerance_scales_with_magnitude() {
        assert!(approx_eq(1e6_f64, 1e6 + 1e-5, 1e-10));
        assert!(!approx_eq(0.0_f64, 1e-9, 1e-10));
        assert!(approx_eq(1.0_f32, 1.0 + 1e-7, 1e-6));
    }

    #[test]
    fn residual_of_identical_values_is_zero() {
        assert_eq!(relative_residual(3.0_f64, 3.0, 0.0), 0.0);
        assert!(relative_residual(3.0_f64, 3.5, 7.0) > 0.07);
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), 1);
        assert_eq!(factorial(5), 120);
        assert_eq!(factorial_real::<f64>(4), 24.0);
    }
}

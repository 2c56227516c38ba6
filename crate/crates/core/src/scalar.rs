//! Scalar abstraction shared by the geometric core.
//!
//! The lattice, window and torus code is written once against [`Scalar`] and
//! instantiated with `f64` (tolerance-based comparisons), `f32`, or
//! [`QuadSurd`](crate::QuadSurd) (exact arithmetic in a real quadratic field).

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Num, Signed};

/// Exact rational used for the components of quadratic surds.
pub type Rational = Ratio<i128>;

pub trait Scalar:
    Num + Signed + PartialOrd + Copy + Debug + Display + Send + Sync + 'static
{
    /// `true` when comparisons are exact and tolerances are ignored.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    /// Converts a float. Exact types convert the binary value exactly.
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Largest integer not exceeding `self`, computed exactly for exact types.
    fn floor_i64(&self) -> i64;

    /// Decomposition `a + b·√D` into rational parts, `None` for inexact types.
    fn rational_parts(&self) -> Option<(Rational, Rational)> {
        None
    }

    /// Radicand `D` of a quadratic surd, `0` for everything else.
    fn radicand(&self) -> i64 {
        0
    }

    /// Equality within `tol` for float types, exact equality otherwise.
    fn near(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (*self - *other).abs().to_f64() <= tol
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn floor_i64(&self) -> i64 {
        self.floor() as i64
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f32
    }

    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn floor_i64(&self) -> i64 {
        self.floor() as i64
    }
}

/// Converts a slice of scalars to `f64`.
pub fn to_f64_vec<T: Scalar>(v: &[T]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_near_uses_tolerance() {
        assert!(1.0f64.near(&(1.0 + 1e-10), 1e-9));
        assert!(!1.0f64.near(&(1.0 + 1e-8), 1e-9));
    }

    #[test]
    fn floor_of_negative_float() {
        assert_eq!((-0.5f64).floor_i64(), -1);
        assert_eq!(2.0f32.floor_i64(), 2);
    }
}

//! Scalar abstraction for the curvature algebra.
//!
//! The speed function and its variations only need field operations, so the
//! algebra is written once against [`Scalar`] and instantiated with `f64`,
//! `f32`, or an exact rational type.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, NumAssignOps, Signed, ToPrimitive};

/// Ordered field used by the curvature algebra.
pub trait Scalar:
    Clone + Debug + PartialOrd + Signed + NumAssignOps + FromPrimitive + ToPrimitive
{
    /// Slack below which `lambda_1 + lambda_2 - 2 kappa` counts as leaving the
    /// admissible cone. Exact types use zero.
    fn admissibility_slack(largest: &Self) -> Self;

    /// Tolerance used when comparing the two sides of an inequality of size `scale`.
    fn comparison_slack(scale: &Self) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer representable")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }
}

impl Scalar for f64 {
    fn admissibility_slack(largest: &Self) -> Self {
        1e-10 * largest.abs().max(1.0)
    }

    fn comparison_slack(scale: &Self) -> Self {
        1e-12 * scale.abs().max(1.0)
    }
}

impl Scalar for f32 {
    fn admissibility_slack(largest: &Self) -> Self {
        1e-6 * largest.abs().max(1.0)
    }

    fn comparison_slack(scale: &Self) -> Self {
        1e-5 * scale.abs().max(1.0)
    }
}

impl Scalar for BigRational {
    fn admissibility_slack(_largest: &Self) -> Self {
        BigRational::from_integer(BigInt::from(0))
    }

    fn comparison_slack(_scale: &Self) -> Self {
        BigRational::from_integer(BigInt::from(0))
    }
}

/// Builds an exact rational `num / den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

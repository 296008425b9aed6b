//! Floating-point abstraction for the estimator algebra.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};

/// Real scalar used by the mixture and allocation algebra: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + Debug + Send + Sync + 'static {
    /// Tolerance for the "weights sum to one" and "fractions sum to at most one" checks.
    fn sum_tolerance() -> Self;

    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("literal representable in scalar type")
    }
}

impl Scalar for f32 {
    fn sum_tolerance() -> f32 {
        1e-5
    }
}

impl Scalar for f64 {
    fn sum_tolerance() -> f64 {
        1e-12
    }
}

/// Neumaier-compensated sum; keeps long weight sums within the 1e-12 band.
pub(crate) fn compensated_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry = carry + ((sum - t) + v);
        } else {
            carry = carry + ((v - t) + sum);
        }
        sum = t;
    }
    sum + carry
}

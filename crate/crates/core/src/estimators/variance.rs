use super::EstimatorError;
use crate::scalar::{compensated_sum, Scalar};

/// Replicated-sampler estimate of an asymptotic variance.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceEstimate<T> {
    /// Budget of each of the `q` samplers.
    pub l: T,
    pub per_sampler_estimates: Vec<T>,
    pub value: T,
}

impl<T> VarianceEstimate<T> {
    pub fn q(&self) -> usize {
        self.per_sampler_estimates.len()
    }
}

/// Sample variance of `sqrt(l) * f_j` over `q` independent equal-budget samplers:
/// `l / (q - 1) * sum_j (f_j - mean)^2`.
pub fn sample_variance_estimate<T: Scalar>(estimates: &[T], l: T) -> Result<VarianceEstimate<T>, EstimatorError> {
    let q = estimates.len();
    if q < 2 {
        return Err(EstimatorError::TooFewEstimates(q));
    }
    if !(l > T::zero()) {
        return Err(EstimatorError::NonPositiveBudget);
    }
    let mean = compensated_sum(estimates.iter().copied()) / T::from_usize(q).unwrap();
    let ss = compensated_sum(estimates.iter().map(|&e| (e - mean) * (e - mean)));
    let value = l / T::from_usize(q - 1).unwrap() * ss;
    Ok(VarianceEstimate { l, per_sampler_estimates: estimates.to_vec(), value })
}

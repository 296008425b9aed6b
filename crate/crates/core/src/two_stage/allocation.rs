use std::cmp::Ordering;

use crate::estimators::{minimum_variance, EstimatorError};
use crate::scalar::{compensated_sum, Scalar};

/// Budget fractions across the statistics: `a_k >= 0`, `sum_k a_k <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationDecision<T> {
    fractions: Vec<T>,
}

impl<T: Scalar> AllocationDecision<T> {
    pub fn new(fractions: Vec<T>) -> Result<Self, EstimatorError> {
        if let Some(k) = fractions.iter().position(|a| !a.is_finite() || *a < T::zero()) {
            return Err(EstimatorError::InvalidEntry(k));
        }
        let sum = compensated_sum(fractions.iter().copied());
        if sum > T::one() + T::sum_tolerance() {
            return Err(EstimatorError::AllocationSum(sum.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { fractions })
    }

    /// Even split over `k` statistics.
    pub fn uniform(k: usize) -> Self {
        let share = T::one() / T::from_usize(k).unwrap();
        Self { fractions: vec![share; k] }
    }

    /// Everything on statistic `k` of `len`.
    pub fn greedy(len: usize, k: usize) -> Self {
        let mut fractions = vec![T::zero(); len];
        fractions[k] = T::one();
        Self { fractions }
    }

    /// Effective two-stage allocation: `c / K` to every statistic from the pilot stage
    /// plus the remaining `1 - c` to the inferred best statistic `chosen`.
    pub fn two_stage(len: usize, c: T, chosen: usize) -> Self {
        let share = c / T::from_usize(len).unwrap();
        let fractions = (0..len)
            .map(|k| if k == chosen { share + (T::one() - c) } else { share })
            .collect();
        Self { fractions }
    }

    pub fn fractions(&self) -> &[T] {
        &self.fractions
    }

    pub fn len(&self) -> usize {
        self.fractions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fractions.is_empty()
    }

    /// Indices with a positive fraction.
    pub fn active(&self) -> Vec<usize> {
        (0..self.fractions.len()).filter(|&k| self.fractions[k] > T::zero()).collect()
    }
}

/// Minimized variance of a decision, treating an empty active set as infinitely bad.
fn optimized_variance<T: Scalar>(alloc: &AllocationDecision<T>, sigma2: &[T]) -> Result<T, EstimatorError> {
    match minimum_variance(alloc, sigma2) {
        Err(EstimatorError::NoActiveStatistic) => Ok(T::infinity()),
        other => other,
    }
}

/// Orders two decisions by their variance under optimal weights. `Less` means `a`
/// is more efficient than `b`; values within a relative `1e-12` compare `Equal`.
pub fn compare_allocations<T: Scalar>(
    a: &AllocationDecision<T>,
    b: &AllocationDecision<T>,
    sigma2: &[T],
) -> Result<Ordering, EstimatorError> {
    if a.len() != b.len() {
        return Err(EstimatorError::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let va = optimized_variance(a, sigma2)?;
    let vb = optimized_variance(b, sigma2)?;
    if va == vb {
        return Ok(Ordering::Equal);
    }
    let scale = va.abs().max(vb.abs());
    if scale.is_finite() && (va - vb).abs() <= T::lit(1e-12) * scale {
        return Ok(Ordering::Equal);
    }
    Ok(va.partial_cmp(&vb).unwrap_or(Ordering::Equal))
}

/// All budget on the statistic with the smallest variance; ties go to the lowest index.
pub fn greedy_allocation<T: Scalar>(sigma2: &[T]) -> Result<AllocationDecision<T>, EstimatorError> {
    if sigma2.is_empty() {
        return Err(EstimatorError::NoActiveStatistic);
    }
    if let Some(k) = sigma2.iter().position(|s| !s.is_finite() || *s < T::zero()) {
        return Err(EstimatorError::InvalidEntry(k));
    }
    Ok(AllocationDecision::greedy(sigma2.len(), argmin(sigma2)))
}

/// Index of the smallest value, lowest index on ties.
pub(crate) fn argmin<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = k;
        }
    }
    best
}

use super::EstimatorError;
use crate::scalar::{compensated_sum, Scalar};
use crate::two_stage::AllocationDecision;

/// Linear-combination weights, one per statistic. Statistics outside the active set
/// carry weight zero; the weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T> {
    weights: Vec<T>,
}

impl<T: Scalar> WeightVector<T> {
    pub fn new(weights: Vec<T>) -> Result<Self, EstimatorError> {
        if let Some(k) = weights.iter().position(|w| !w.is_finite()) {
            return Err(EstimatorError::InvalidEntry(k));
        }
        let sum = compensated_sum(weights.iter().copied());
        if (sum - T::one()).abs() > T::sum_tolerance() {
            return Err(EstimatorError::WeightSum(sum.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { weights })
    }

    /// Rescales nonnegative raw weights to sum to one.
    pub fn normalized(raw: Vec<T>) -> Result<Self, EstimatorError> {
        if let Some(k) = raw.iter().position(|w| !w.is_finite() || *w < T::zero()) {
            return Err(EstimatorError::InvalidEntry(k));
        }
        let sum = compensated_sum(raw.iter().copied());
        if sum <= T::zero() {
            return Err(EstimatorError::NoActiveStatistic);
        }
        Self::new(raw.into_iter().map(|w| w / sum).collect())
    }

    /// All weight on statistic `k` of `len`.
    pub fn unit(len: usize, k: usize) -> Self {
        let mut weights = vec![T::zero(); len];
        weights[k] = T::one();
        Self { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.weights
    }
}

/// Convex combination of per-statistic estimates.
pub fn mixture_estimate<T: Scalar>(estimates: &[T], weights: &WeightVector<T>) -> Result<T, EstimatorError> {
    if estimates.len() != weights.len() {
        return Err(EstimatorError::DimensionMismatch { expected: weights.len(), found: estimates.len() });
    }
    Ok(compensated_sum(estimates.iter().zip(weights.as_slice()).filter(|(_, w)| !w.is_zero()).map(|(e, w)| *e * *w)))
}

fn check_variances<T: Scalar>(sigma2: &[T], expected: usize) -> Result<(), EstimatorError> {
    if sigma2.len() != expected {
        return Err(EstimatorError::DimensionMismatch { expected, found: sigma2.len() });
    }
    match sigma2.iter().position(|s| !s.is_finite() || *s < T::zero()) {
        Some(k) => Err(EstimatorError::InvalidEntry(k)),
        None => Ok(()),
    }
}

/// Asymptotic variance of the mixture estimator: `sum_k w_k^2 / a_k * sigma_k^2`
/// over the active statistics.
pub fn mixture_asymptotic_variance<T: Scalar>(
    alloc: &AllocationDecision<T>,
    weights: &WeightVector<T>,
    sigma2: &[T],
) -> Result<T, EstimatorError> {
    let a = alloc.fractions();
    if weights.len() != a.len() {
        return Err(EstimatorError::DimensionMismatch { expected: a.len(), found: weights.len() });
    }
    check_variances(sigma2, a.len())?;
    let mut terms = Vec::with_capacity(a.len());
    for (k, ((&ak, &wk), &s)) in a.iter().zip(weights.as_slice()).zip(sigma2).enumerate() {
        if ak > T::zero() {
            terms.push(wk * wk / ak * s);
        } else if !wk.is_zero() {
            return Err(EstimatorError::WeightWithoutBudget(k));
        }
    }
    Ok(compensated_sum(terms))
}

/// Variance-minimizing weights `w_k ∝ a_k / sigma_k^2` over the active statistics.
///
/// A zero variance means the statistic is exact: if one active statistic has
/// `sigma^2 = 0` it takes all the weight, several such statistics split it evenly.
pub fn optimal_weights<T: Scalar>(alloc: &AllocationDecision<T>, sigma2: &[T]) -> Result<WeightVector<T>, EstimatorError> {
    let a = alloc.fractions();
    check_variances(sigma2, a.len())?;
    let active: Vec<usize> = (0..a.len()).filter(|&k| a[k] > T::zero()).collect();
    if active.is_empty() {
        return Err(EstimatorError::NoActiveStatistic);
    }
    let exact: Vec<usize> = active.iter().copied().filter(|&k| sigma2[k].is_zero()).collect();
    let mut raw = vec![T::zero(); a.len()];
    if exact.is_empty() {
        for &k in &active {
            raw[k] = a[k] / sigma2[k];
        }
    } else {
        for &k in &exact {
            raw[k] = T::one();
        }
    }
    WeightVector::normalized(raw)
}

/// Closed-form minimum `[sum_k a_k / sigma_k^2]^{-1}`; zero when an active statistic is exact.
pub fn minimum_variance<T: Scalar>(alloc: &AllocationDecision<T>, sigma2: &[T]) -> Result<T, EstimatorError> {
    let a = alloc.fractions();
    check_variances(sigma2, a.len())?;
    let active: Vec<usize> = (0..a.len()).filter(|&k| a[k] > T::zero()).collect();
    if active.is_empty() {
        return Err(EstimatorError::NoActiveStatistic);
    }
    if active.iter().any(|&k| sigma2[k].is_zero()) {
        return Ok(T::zero());
    }
    if let [k] = active[..] {
        // Exact for a single statistic, so the greedy optimum is sigma^2 itself.
        return Ok(sigma2[k] / a[k]);
    }
    Ok(compensated_sum(active.iter().map(|&k| a[k] / sigma2[k])).recip())
}

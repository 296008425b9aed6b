//! Point estimators and the mixture-estimator algebra.

mod mixture;
mod variance;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, MultiGraph, Relation};
use crate::samplers::{SamplerKind, Visit};
use crate::scalar::Scalar;

pub use mixture::{minimum_variance, mixture_asymptotic_variance, mixture_estimate, optimal_weights, WeightVector};
pub use variance::{sample_variance_estimate, VarianceEstimate};

#[derive(Debug, Error, PartialEq)]
pub enum EstimatorError {
    #[error("estimate requested from an empty trace")]
    EmptyTrace,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("weights over the active statistics sum to {0}, not 1")]
    WeightSum(f64),
    #[error("allocation fractions sum to {0}, more than 1")]
    AllocationSum(f64),
    #[error("entry {0} is negative or not finite")]
    InvalidEntry(usize),
    #[error("statistic {0} has a nonzero weight but no budget")]
    WeightWithoutBudget(usize),
    #[error("no statistic has a positive allocation")]
    NoActiveStatistic,
    #[error("sample variance needs q >= 2 estimates, got {0}")]
    TooFewEstimates(usize),
    #[error("per-sampler budget must be positive")]
    NonPositiveBudget,
    #[error("visit with non-positive denominator")]
    NonPositiveDenominator,
}

/// Hansen-Hurwitz ratio estimator: `sum f/den / sum 1/den` over the visits.
///
/// Each visit's stored denominator is its unnormalized stationary weight
/// (`d + alpha` for RWuR, `d` for SRW and FS, 1 for uniform draws).
pub fn hansen_hurwitz<T: Scalar>(visits: &[Visit], property: &[T]) -> Result<T, EstimatorError> {
    if visits.is_empty() {
        return Err(EstimatorError::EmptyTrace);
    }
    let mut num = T::zero();
    let mut den = T::zero();
    for v in visits {
        if !(v.denominator > 0.0) {
            return Err(EstimatorError::NonPositiveDenominator);
        }
        let w = T::lit(v.denominator).recip();
        num = num + property[v.node] * w;
        den = den + w;
    }
    Ok(num / den)
}

/// One sampler kind on one relation, aimed at one property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticProfile {
    pub id: usize,
    pub name: String,
    pub sampler: SamplerKind,
    pub relation: String,
    pub property: String,
    pub est_asym_var: Option<f64>,
}

impl StatisticProfile {
    pub fn new(id: usize, name: impl Into<String>, sampler: SamplerKind, relation: &str, property: &str) -> Self {
        Self {
            id,
            name: name.into(),
            sampler,
            relation: relation.to_string(),
            property: property.to_string(),
            est_asym_var: None,
        }
    }

    pub fn bind<'g>(&self, graph: &'g MultiGraph) -> Result<BoundStatistic<'g>, GraphError> {
        Ok(BoundStatistic {
            id: self.id,
            sampler: self.sampler,
            relation: graph.relation(&self.relation)?,
            property: graph.property(&self.property)?,
        })
    }
}

/// A profile resolved against a concrete graph.
#[derive(Debug, Clone, Copy)]
pub struct BoundStatistic<'g> {
    pub id: usize,
    pub sampler: SamplerKind,
    pub relation: &'g Relation,
    pub property: &'g [f64],
}

//! Budget allocation and the two-stage (pilot + regular) sampling framework.

mod adaptive;
mod allocation;
mod bound;
mod pilot;
mod strategy;

use thiserror::Error;

use crate::estimators::EstimatorError;
use crate::graph::GraphError;
use crate::samplers::SamplerError;

pub use adaptive::{adaptive_two_stage, adaptive_two_stage_with, AdaptiveParams};
pub use allocation::{compare_allocations, greedy_allocation, AllocationDecision};
pub use bound::{default_grid, estimate_pilot_fraction_bound, pilot_fraction_bound, FractionBound};
pub use pilot::{run_pilot, subrun_seed, Pilot, PilotResult, SamplingParams};
pub use strategy::{run_benchmark, run_two_stage_fixed, Benchmark, StrategyOutcome, Weighting};

#[derive(Debug, Error)]
pub enum TwoStageError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error("no statistics supplied")]
    NoStatistics,
    #[error("statistic {statistic} needs budget {needed} for its runs to start, has {available}")]
    BudgetTooSmall { statistic: usize, needed: f64, available: f64 },
    #[error("no statistic collected any sample")]
    NoSamples,
    #[error("{0}")]
    InvalidParameter(String),
}

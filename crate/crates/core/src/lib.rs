//! Estimating a population mean on a multi-relation social graph with several
//! random-walk statistics, and deciding how to split a sampling budget between them.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: multi-relation graphs, loaders and seeded synthetic generators.
//! - [`samplers`]: SRW, RWuR, frontier sampling and uniform draws under a budget ledger.
//! - [`estimators`]: Hansen-Hurwitz estimates, mixture weights and variance estimates.
//! - [`two_stage`]: allocation decisions, pilot studies and the adaptive two-stage strategy.
//! - [`harness`]: replicated experiments, NRMSE, oracle variances and CSV reports.
//!
//! The estimator and allocation algebra is generic over [`Scalar`] (`f32` or `f64`);
//! the aliases below fix it to `f64`.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod estimators;
pub mod graph;
pub mod harness;
pub mod samplers;
mod scalar;
pub mod two_stage;

pub use scalar::Scalar;

pub use estimators::{hansen_hurwitz, StatisticProfile};
pub use graph::{MultiGraph, NodeId, Relation};
pub use harness::{run_experiment, ExperimentReport, ExperimentSpec};
pub use samplers::{BudgetLedger, CostModel, SamplerKind, Walk, WalkTrace};
pub use two_stage::{adaptive_two_stage, AdaptiveParams, SamplingParams, StrategyOutcome};

pub type Weights = estimators::WeightVector<f64>;
pub type Allocation = two_stage::AllocationDecision<f64>;
pub type VarianceEstimate = estimators::VarianceEstimate<f64>;

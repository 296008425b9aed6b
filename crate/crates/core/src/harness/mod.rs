//! Experiment runner: strategy comparisons over replications, NRMSE, oracle
//! variances and CSV reports.

mod experiment;
mod metrics;
mod oracle;
pub mod presets;
pub mod seeds;

use thiserror::Error;

use crate::estimators::EstimatorError;
use crate::graph::GraphError;
use crate::samplers::SamplerError;
use crate::two_stage::TwoStageError;

pub use experiment::{
    run_experiment, run_oracles, run_strategy, run_trace, write_oracle_csv, CellRecord, Experiment, ExperimentReport,
    ExperimentSpec, FileEntry, FileGraph, GraphSource, ReportRow, StatisticSpec, Strategy, StrategySpec, TraceParams,
};
pub use metrics::{accuracy, budget_needed, budget_ratios, nrmse, Accuracy, BudgetNeed, BudgetRatio};
pub use oracle::{oracle_asymptotic_variance, stabilized_oracle, OracleEstimate, OracleParams, OracleReport, MIN_ORACLE_RUNS};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    TwoStage(#[from] TwoStageError),
    #[error("truth is zero; RMSE is {rmse}")]
    ZeroTruth { rmse: f64 },
    #[error("no strategy reaches NRMSE {target}")]
    TargetUnattainable { target: f64 },
    #[error("cell strategy={strategy} budget={budget} replication={replication} failed: {message}")]
    Cell { strategy: String, budget: f64, replication: usize, message: String },
    #[error("{0}")]
    Runtime(String),
}

impl HarnessError {
    /// Errors caused by the configuration rather than by running it.
    pub fn is_config_error(&self) -> bool {
        matches!(self, HarnessError::Config(_) | HarnessError::InvalidSpec(_) | HarnessError::Graph(_))
    }
}

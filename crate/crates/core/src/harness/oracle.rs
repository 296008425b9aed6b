use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::seeds::splitmix64;
use super::HarnessError;
use crate::estimators::{hansen_hurwitz, StatisticProfile};
use crate::graph::MultiGraph;
use crate::samplers::{CostModel, Walk};

pub const MIN_ORACLE_RUNS: usize = 100;

/// Settings for the brute-force asymptotic variance oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleParams {
    /// Starting budget `m`; the oracle is evaluated at `m` and `2m`.
    pub budget: f64,
    #[serde(default = "OracleParams::default_runs")]
    pub runs: usize,
    /// Accept when the two evaluations differ by at most this relative amount.
    #[serde(default = "OracleParams::default_tolerance")]
    pub tolerance: f64,
    /// How many times `m` may be doubled while the pair disagrees.
    #[serde(default = "OracleParams::default_doublings")]
    pub max_doublings: usize,
}

impl OracleParams {
    fn default_runs() -> usize {
        1000
    }

    fn default_tolerance() -> f64 {
        0.15
    }

    fn default_doublings() -> usize {
        3
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(self.budget.is_finite() && self.budget > 0.0) {
            return Err(HarnessError::InvalidSpec(format!("oracle budget must be positive, got {}", self.budget)));
        }
        if self.runs < MIN_ORACLE_RUNS {
            return Err(HarnessError::InvalidSpec(format!(
                "oracle needs at least {MIN_ORACLE_RUNS} runs, got {}",
                self.runs
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(HarnessError::InvalidSpec("oracle tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleEstimate {
    pub budget: f64,
    pub runs: usize,
    /// `m` times the sample variance of the run estimates.
    pub value: f64,
    pub mean_estimate: f64,
    /// Every run produced the same estimate although the property varies.
    pub degenerate: bool,
}

/// `m * Var(f_hat(m))` over `runs` independent executions seeded `seed, seed + 1, ...`.
pub fn oracle_asymptotic_variance(
    graph: &MultiGraph,
    profile: &StatisticProfile,
    costs: CostModel,
    m: f64,
    runs: usize,
    seed: u64,
) -> Result<OracleEstimate, HarnessError> {
    if runs < MIN_ORACLE_RUNS {
        return Err(HarnessError::InvalidSpec(format!("oracle needs at least {MIN_ORACLE_RUNS} runs, got {runs}")));
    }
    let stat = profile.bind(graph)?;
    let estimates = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut walk = Walk::new(stat.relation, stat.sampler, costs, seed.wrapping_add(i as u64))?;
            walk.fund(m);
            if !walk.is_started() {
                return Err(HarnessError::InvalidSpec(format!(
                    "oracle budget {m} cannot pay the initial cost {} of {}",
                    walk.initial_cost(),
                    profile.name
                )));
            }
            Ok(hansen_hurwitz(&walk.trace().visits, stat.property)?)
        })
        .collect::<Result<Vec<f64>, HarnessError>>()?;

    let n = runs as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let active = stat.relation.active_nodes();
    let varies = active.iter().any(|&v| stat.property[v] != stat.property[active[0]]);
    let degenerate = varies && estimates.iter().all(|&e| e == estimates[0]);
    Ok(OracleEstimate { budget: m, runs, value: m * var, mean_estimate: mean, degenerate })
}

/// Oracle evaluated at `m` and `2m`, doubling `m` until the pair agrees.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub statistic: String,
    pub first: OracleEstimate,
    pub second: OracleEstimate,
    pub relative_change: f64,
    pub stabilized: bool,
}

impl OracleReport {
    /// The estimate at the larger budget.
    pub fn value(&self) -> f64 {
        self.second.value
    }
}

pub fn stabilized_oracle(
    graph: &MultiGraph,
    profile: &StatisticProfile,
    costs: CostModel,
    params: &OracleParams,
    seed: u64,
) -> Result<OracleReport, HarnessError> {
    params.validate()?;
    let level_seed = |level: usize| splitmix64(seed ^ splitmix64(level as u64));
    let mut m = params.budget;
    let mut first = oracle_asymptotic_variance(graph, profile, costs, m, params.runs, level_seed(0))?;
    let mut level = 1;
    loop {
        let second = oracle_asymptotic_variance(graph, profile, costs, 2.0 * m, params.runs, level_seed(level))?;
        let scale = first.value.max(second.value);
        let relative_change = if scale > 0.0 { (second.value - first.value).abs() / scale } else { 0.0 };
        let stabilized = relative_change <= params.tolerance;
        if stabilized || level > params.max_doublings {
            return Ok(OracleReport { statistic: profile.name.clone(), first, second, relative_change, stabilized });
        }
        m *= 2.0;
        first = second;
        level += 1;
    }
}

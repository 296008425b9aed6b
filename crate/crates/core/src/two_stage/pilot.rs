//! Per-statistic replicated sampler runs shared by the pilot and regular stages.

use serde::{Deserialize, Serialize};

use super::allocation::argmin;
use super::TwoStageError;
use crate::estimators::{sample_variance_estimate, BoundStatistic, StatisticProfile, VarianceEstimate};
use crate::graph::MultiGraph;
use crate::samplers::{CostModel, Walk, WalkTrace};

/// Sampler costs plus the number `q` of independent sub-runs per statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingParams {
    #[serde(flatten)]
    pub costs: CostModel,
    #[serde(default = "SamplingParams::default_q")]
    pub q: usize,
}

impl SamplingParams {
    fn default_q() -> usize {
        5
    }
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self { costs: CostModel::default(), q: 5 }
    }
}

/// Seed of sub-run `j` of statistic `k` under a strategy seeded with `seed`.
pub fn subrun_seed(seed: u64, statistic: usize, q: usize, run: usize) -> u64 {
    seed.wrapping_add(1 + (statistic * q + run) as u64)
}

/// `q` resumable sampler runs per statistic. Funding a statistic splits the amount
/// evenly over its runs, so all runs of a statistic always share one budget `l`.
#[derive(Debug, Clone)]
pub struct Pilot<'g> {
    statistics: Vec<BoundStatistic<'g>>,
    runs: Vec<Vec<Walk<'g>>>,
    q: usize,
    costs: CostModel,
}

impl<'g> Pilot<'g> {
    pub fn new(
        graph: &'g MultiGraph,
        profiles: &[StatisticProfile],
        params: &SamplingParams,
        seed: u64,
    ) -> Result<Self, TwoStageError> {
        if profiles.is_empty() {
            return Err(TwoStageError::NoStatistics);
        }
        if params.q < 2 {
            return Err(TwoStageError::InvalidParameter(format!("q must be at least 2, got {}", params.q)));
        }
        let mut statistics = Vec::with_capacity(profiles.len());
        let mut runs = Vec::with_capacity(profiles.len());
        for (k, profile) in profiles.iter().enumerate() {
            let stat = profile.bind(graph)?;
            let walks = (0..params.q)
                .map(|j| {
                    Walk::new(stat.relation, stat.sampler, params.costs, subrun_seed(seed, k, params.q, j))
                        .map(|w| w.with_statistic(k))
                })
                .collect::<Result<Vec<_>, _>>()?;
            statistics.push(stat);
            runs.push(walks);
        }
        Ok(Self { statistics, runs, q: params.q, costs: params.costs })
    }

    pub fn len(&self) -> usize {
        self.statistics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statistics.is_empty()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn statistic(&self, k: usize) -> &BoundStatistic<'g> {
        &self.statistics[k]
    }

    /// Smallest statistic budget at which all `q` runs of statistic `k` can start.
    pub fn viable_budget(&self, k: usize) -> f64 {
        self.q as f64 * self.statistics[k].sampler.start_cost(&self.costs)
    }

    pub fn fund_statistic(&mut self, k: usize, amount: f64) {
        let share = amount / self.q as f64;
        for walk in &mut self.runs[k] {
            walk.fund(share);
        }
    }

    /// Splits `amount` evenly over all statistics.
    pub fn fund_evenly(&mut self, amount: f64) {
        let share = amount / self.len() as f64;
        for k in 0..self.len() {
            self.fund_statistic(k, share);
        }
    }

    /// Budget assigned to statistic `k` so far.
    pub fn funded(&self, k: usize) -> f64 {
        self.runs[k].iter().map(|w| w.trace().ledger.total).sum()
    }

    pub fn spent(&self) -> f64 {
        self.runs.iter().flatten().map(|w| w.trace().ledger.spent).sum()
    }

    pub fn traces(&self, k: usize) -> impl Iterator<Item = &WalkTrace> {
        self.runs[k].iter().map(Walk::trace)
    }

    /// Hansen-Hurwitz estimate pooled over the runs of statistic `k`.
    pub fn estimate(&self, k: usize) -> Option<f64> {
        let property = self.statistics[k].property;
        let (mut num, mut den) = (0.0, 0.0);
        for v in self.traces(k).flat_map(|t| &t.visits) {
            num += property[v.node] / v.denominator;
            den += 1.0 / v.denominator;
        }
        (den > 0.0).then(|| num / den)
    }

    /// Replicated-sampler variance estimate for statistic `k`, available once every run
    /// has recorded at least one visit.
    pub fn variance(&self, k: usize) -> Option<VarianceEstimate<f64>> {
        let property = self.statistics[k].property;
        let per_run = self
            .traces(k)
            .map(|t| crate::estimators::hansen_hurwitz(&t.visits, property).ok())
            .collect::<Option<Vec<f64>>>()?;
        let l = self.runs[k][0].trace().ledger.total;
        sample_variance_estimate(&per_run, l).ok()
    }

    pub fn variances(&self) -> Vec<Option<VarianceEstimate<f64>>> {
        (0..self.len()).map(|k| self.variance(k)).collect()
    }

    /// Statistic with the smallest estimated variance among those that have one.
    pub fn inferred_best(&self) -> Option<usize> {
        let values: Vec<f64> = self
            .variances()
            .iter()
            .map(|v| v.as_ref().map_or(f64::INFINITY, |v| v.value))
            .collect();
        let k = argmin(&values);
        values[k].is_finite().then_some(k)
    }

    pub fn into_traces(self) -> Vec<Vec<WalkTrace>> {
        self.runs.into_iter().map(|runs| runs.into_iter().map(Walk::into_trace).collect()).collect()
    }
}

/// Result of an evenly split pilot stage.
#[derive(Debug, Clone)]
pub struct PilotResult<'g> {
    pub pilot: Pilot<'g>,
    pub variances: Vec<VarianceEstimate<f64>>,
    pub chosen: usize,
}

/// Spends `pilot_budget` evenly over the statistics (each split into `q` runs) and
/// infers the most efficient statistic from the replicated variance estimates.
pub fn run_pilot<'g>(
    graph: &'g MultiGraph,
    profiles: &[StatisticProfile],
    pilot_budget: f64,
    params: &SamplingParams,
    seed: u64,
) -> Result<PilotResult<'g>, TwoStageError> {
    let mut pilot = Pilot::new(graph, profiles, params, seed)?;
    ensure_viable(&pilot, pilot_budget)?;
    pilot.fund_evenly(pilot_budget);
    let variances = pilot
        .variances()
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .expect("every viable run records its start visit");
    let values: Vec<f64> = variances.iter().map(|v| v.value).collect();
    let chosen = argmin(&values);
    Ok(PilotResult { pilot, variances, chosen })
}

pub(crate) fn ensure_viable(pilot: &Pilot<'_>, budget: f64) -> Result<(), TwoStageError> {
    let per_statistic = budget / pilot.len() as f64;
    for k in 0..pilot.len() {
        let needed = pilot.viable_budget(k);
        if per_statistic + 1e-9 * needed < needed {
            return Err(TwoStageError::BudgetTooSmall { statistic: k, needed, available: per_statistic });
        }
    }
    Ok(())
}

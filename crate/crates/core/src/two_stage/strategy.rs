use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pilot::{ensure_viable, Pilot, SamplingParams};
use super::{AllocationDecision, TwoStageError};
use crate::estimators::{mixture_estimate, optimal_weights, StatisticProfile, VarianceEstimate, WeightVector};
use crate::graph::MultiGraph;
use crate::samplers::WalkTrace;

/// How the final mixture combines the per-statistic estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Estimated optimal weights `a_k / sigma_k^2`, normalized.
    Estimated,
    /// Weights equal to the allocation, i.e. every sample point counts the same.
    Proportional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    /// All budget on one uniformly chosen statistic.
    Rnd,
    /// Budget split evenly, mixed with weights equal to the allocation.
    Avg,
}

#[derive(Debug, Clone)]
pub struct StrategyOutcome {
    /// Inferred most efficient statistic (the random pick when no pilot ran).
    pub chosen: usize,
    pub pilot_fraction: f64,
    pub allocation: AllocationDecision<f64>,
    pub weighting: Weighting,
    pub weights: WeightVector<f64>,
    pub estimate: f64,
    /// Mixture with weights equal to the allocation, from the same samples.
    pub equal_weight_estimate: f64,
    pub statistic_estimates: Vec<Option<f64>>,
    pub variance_estimates: Vec<Option<VarianceEstimate<f64>>>,
    pub traces: Vec<Vec<WalkTrace>>,
    pub spent: f64,
    /// Pilot funding rounds (1 for fixed strategies with a pilot, 0 without).
    pub iterations: usize,
    /// Pilot-fraction bound evaluated after each adaptive round.
    pub bound_history: Vec<f64>,
}

fn proportional_weights(alloc: &AllocationDecision<f64>, usable: &[bool]) -> Result<WeightVector<f64>, TwoStageError> {
    let raw = alloc.fractions().iter().zip(usable).map(|(&a, &u)| if u { a } else { 0.0 }).collect();
    Ok(WeightVector::normalized(raw)?)
}

/// Builds the final outcome once pilot and regular budgets have been spent.
///
/// Statistics without samples drop out of the mixture. Under estimated weighting a
/// sampled statistic without a variance estimate also drops out, unless no statistic
/// has one, in which case the proportional weights are used.
pub(crate) fn finish(
    pilot: Pilot<'_>,
    c: f64,
    chosen: usize,
    weighting: Weighting,
    iterations: usize,
    bound_history: Vec<f64>,
) -> Result<StrategyOutcome, TwoStageError> {
    let len = pilot.len();
    let allocation = AllocationDecision::two_stage(len, c, chosen);
    let statistic_estimates: Vec<Option<f64>> = (0..len).map(|k| pilot.estimate(k)).collect();
    let variance_estimates = pilot.variances();
    let sampled: Vec<bool> = (0..len)
        .map(|k| statistic_estimates[k].is_some() && allocation.fractions()[k] > 0.0)
        .collect();
    if !sampled.iter().any(|&s| s) {
        return Err(TwoStageError::NoSamples);
    }
    let values: Vec<f64> = statistic_estimates.iter().map(|e| e.unwrap_or(0.0)).collect();

    let equal = proportional_weights(&allocation, &sampled)?;
    let weights = match weighting {
        Weighting::Proportional => equal.clone(),
        Weighting::Estimated => {
            let with_variance: Vec<bool> =
                (0..len).map(|k| sampled[k] && variance_estimates[k].is_some()).collect();
            let sampled_count = sampled.iter().filter(|&&s| s).count();
            if sampled_count == 1 || !with_variance.iter().any(|&v| v) {
                equal.clone()
            } else {
                let restricted = AllocationDecision::new(
                    (0..len).map(|k| if with_variance[k] { allocation.fractions()[k] } else { 0.0 }).collect(),
                )?;
                let sigma2: Vec<f64> =
                    variance_estimates.iter().map(|v| v.as_ref().map_or(0.0, |v| v.value)).collect();
                optimal_weights(&restricted, &sigma2)?
            }
        }
    };
    let estimate = mixture_estimate(&values, &weights)?;
    let equal_weight_estimate = mixture_estimate(&values, &equal)?;
    let spent = pilot.spent();
    Ok(StrategyOutcome {
        chosen,
        pilot_fraction: c,
        allocation,
        weighting,
        weights,
        estimate,
        equal_weight_estimate,
        statistic_estimates,
        variance_estimates,
        traces: pilot.into_traces(),
        spent,
        iterations,
        bound_history,
    })
}

pub(crate) fn check_budget(total_budget: f64) -> Result<(), TwoStageError> {
    if total_budget.is_finite() && total_budget > 0.0 {
        Ok(())
    } else {
        Err(TwoStageError::InvalidParameter(format!("total budget must be positive, got {total_budget}")))
    }
}

/// Two-stage strategy with a fixed pilot fraction `c`.
///
/// The pilot spends `cM` evenly over the statistics and infers the best one; the
/// regular stage extends that statistic's runs with the remaining `(1 - c)M`. With
/// `c = 0` there is no pilot and the statistic is drawn uniformly at random.
pub fn run_two_stage_fixed(
    graph: &MultiGraph,
    profiles: &[StatisticProfile],
    total_budget: f64,
    c: f64,
    params: &SamplingParams,
    weighting: Weighting,
    seed: u64,
) -> Result<StrategyOutcome, TwoStageError> {
    check_budget(total_budget)?;
    if !(0.0..=1.0).contains(&c) {
        return Err(TwoStageError::InvalidParameter(format!("pilot fraction must lie in [0, 1], got {c}")));
    }
    let mut pilot = Pilot::new(graph, profiles, params, seed)?;
    let chosen = if c > 0.0 {
        let pilot_budget = c * total_budget;
        ensure_viable(&pilot, pilot_budget)?;
        pilot.fund_evenly(pilot_budget);
        pilot.inferred_best().expect("viable pilot yields variance estimates")
    } else {
        ChaCha8Rng::seed_from_u64(seed).random_range(0..pilot.len())
    };
    let regular = (1.0 - c) * total_budget;
    if regular > 0.0 {
        if c == 0.0 && regular < pilot.viable_budget(chosen) {
            return Err(TwoStageError::BudgetTooSmall {
                statistic: chosen,
                needed: pilot.viable_budget(chosen),
                available: regular,
            });
        }
        pilot.fund_statistic(chosen, regular);
    }
    finish(pilot, c, chosen, weighting, usize::from(c > 0.0), Vec::new())
}

/// Random Statistics (`c = 0`) or Average Statistics (`c = 1`, weights equal to the allocation).
pub fn run_benchmark(
    graph: &MultiGraph,
    profiles: &[StatisticProfile],
    total_budget: f64,
    which: Benchmark,
    params: &SamplingParams,
    seed: u64,
) -> Result<StrategyOutcome, TwoStageError> {
    match which {
        Benchmark::Rnd => run_two_stage_fixed(graph, profiles, total_budget, 0.0, params, Weighting::Proportional, seed),
        Benchmark::Avg => run_two_stage_fixed(graph, profiles, total_budget, 1.0, params, Weighting::Proportional, seed),
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bound::{default_grid, pilot_fraction_bound, validate_bound_params};
use super::pilot::{Pilot, SamplingParams};
use super::strategy::{check_budget, finish, StrategyOutcome, Weighting};
use super::TwoStageError;
use crate::estimators::StatisticProfile;
use crate::graph::MultiGraph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveParams {
    /// Pilot stepsize as a fraction of the total budget.
    #[serde(default = "AdaptiveParams::default_step")]
    pub step_fraction: f64,
    /// Number of realizations `B` used by the pilot-fraction bound.
    #[serde(default = "AdaptiveParams::default_realizations")]
    pub realizations: usize,
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
    /// Pilot spending never exceeds this fraction of the total budget.
    #[serde(default = "AdaptiveParams::default_cap")]
    pub max_pilot_fraction: f64,
}

impl AdaptiveParams {
    fn default_step() -> f64 {
        0.02
    }

    fn default_realizations() -> usize {
        10
    }

    fn default_cap() -> f64 {
        0.9
    }

    pub fn validate(&self) -> Result<(), TwoStageError> {
        if !(self.step_fraction > 0.0 && self.step_fraction < 1.0) {
            return Err(TwoStageError::InvalidParameter(format!(
                "step fraction must lie in (0, 1), got {}",
                self.step_fraction
            )));
        }
        if !(self.max_pilot_fraction > 0.0 && self.max_pilot_fraction <= 1.0) {
            return Err(TwoStageError::InvalidParameter(format!(
                "max pilot fraction must lie in (0, 1], got {}",
                self.max_pilot_fraction
            )));
        }
        validate_bound_params(self.realizations, &self.grid)
    }
}

impl Default for AdaptiveParams {
    fn default() -> Self {
        Self {
            step_fraction: Self::default_step(),
            realizations: Self::default_realizations(),
            grid: default_grid(),
            max_pilot_fraction: Self::default_cap(),
        }
    }
}

/// Adaptive two-stage sampling with the bundled pilot-fraction bound.
pub fn adaptive_two_stage(
    graph: &MultiGraph,
    profiles: &[StatisticProfile],
    total_budget: f64,
    adaptive: &AdaptiveParams,
    params: &SamplingParams,
    seed: u64,
) -> Result<StrategyOutcome, TwoStageError> {
    adaptive.validate()?;
    let (realizations, grid) = (adaptive.realizations, adaptive.grid.clone());
    let last = *grid.last().unwrap();
    adaptive_two_stage_with(graph, profiles, total_budget, adaptive, params, seed, move |pilot, _| {
        pilot_fraction_bound(pilot, realizations, &grid).map_or(last, |b| b.fraction)
    })
}

/// Adaptive two-stage sampling with a caller-supplied bound `bound(pilot, cM)`.
///
/// Starts with `c = Δ/M` and one pilot step of `Δ`, then keeps adding steps while
/// `c < bound`, never letting the pilot exceed the configured cap. Pilot steps extend
/// the existing runs. The statistic with the smallest estimated variance then receives
/// the remaining `(1 - c)M`.
pub fn adaptive_two_stage_with<F>(
    graph: &MultiGraph,
    profiles: &[StatisticProfile],
    total_budget: f64,
    adaptive: &AdaptiveParams,
    params: &SamplingParams,
    seed: u64,
    mut bound: F,
) -> Result<StrategyOutcome, TwoStageError>
where
    F: FnMut(&Pilot<'_>, f64) -> f64,
{
    check_budget(total_budget)?;
    adaptive.validate()?;
    let mut pilot = Pilot::new(graph, profiles, params, seed)?;
    let step = adaptive.step_fraction * total_budget;
    let reserve = params.q as f64 * params.costs.visit_cost / total_budget;
    let cap = adaptive.max_pilot_fraction.min(1.0 - reserve);
    let max_rounds = (1.0 / adaptive.step_fraction).ceil() as usize;

    let mut rounds = 1;
    pilot.fund_evenly(step);
    let mut history = Vec::new();
    loop {
        let c = rounds as f64 * adaptive.step_fraction;
        let b = bound(&pilot, c * total_budget);
        history.push(b);
        let next = (rounds + 1) as f64 * adaptive.step_fraction;
        if !(c < b) || next > cap + 1e-12 || rounds >= max_rounds {
            break;
        }
        rounds += 1;
        pilot.fund_evenly(step);
    }
    let c = rounds as f64 * adaptive.step_fraction;
    let chosen = match pilot.inferred_best() {
        Some(k) => k,
        None => ChaCha8Rng::seed_from_u64(seed).random_range(0..pilot.len()),
    };
    pilot.fund_statistic(chosen, (1.0 - c) * total_budget);
    finish(pilot, c, chosen, Weighting::Estimated, rounds, history)
}

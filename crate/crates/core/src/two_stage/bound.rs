//! Estimated upper bound of the optimal pilot fraction.
//!
//! The pilot runs collected with budget `m` are cut into `B` groups of sample sets of
//! budget `m' ≈ m / (B K)` per statistic. For each candidate fraction `c` every group
//! replays a two-stage strategy at total budget `m'`, giving `B` realizations of the
//! mixture estimate; the candidate with the smallest sample variance is returned.

use super::allocation::argmin;
use super::pilot::{ensure_viable, Pilot, SamplingParams};
use super::{AllocationDecision, TwoStageError};
use crate::estimators::{mixture_estimate, optimal_weights, StatisticProfile};
use crate::graph::MultiGraph;

/// Candidate grid `{0.05, 0.10, ..., 0.95}`.
pub fn default_grid() -> Vec<f64> {
    (1..20).map(|i| i as f64 / 20.0).collect()
}

pub(crate) fn validate_bound_params(realizations: usize, grid: &[f64]) -> Result<(), TwoStageError> {
    if realizations < 2 {
        return Err(TwoStageError::InvalidParameter(format!("need at least 2 realizations, got {realizations}")));
    }
    if grid.is_empty() {
        return Err(TwoStageError::InvalidParameter("empty pilot-fraction grid".into()));
    }
    if grid.iter().any(|c| !(*c > 0.0 && *c < 1.0)) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TwoStageError::InvalidParameter("grid values must be ascending and inside (0, 1)".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionBound {
    pub fraction: f64,
    /// False when no candidate could be evaluated; `fraction` is then the largest candidate.
    pub feasible: bool,
    /// Sample variance of the realizations per candidate, `None` where not evaluable.
    pub variances: Vec<Option<f64>>,
    /// Budget of one sample set.
    pub set_budget: f64,
}

/// Prefix sums over one run for O(log n) Hansen-Hurwitz estimates on budget windows.
struct RunIndex {
    spent: Vec<f64>,
    num: Vec<f64>,
    den: Vec<f64>,
}

impl RunIndex {
    fn new(visits: &[crate::samplers::Visit], property: &[f64]) -> Self {
        let mut num = Vec::with_capacity(visits.len() + 1);
        let mut den = Vec::with_capacity(visits.len() + 1);
        num.push(0.0);
        den.push(0.0);
        for v in visits {
            num.push(num.last().unwrap() + property[v.node] / v.denominator);
            den.push(den.last().unwrap() + 1.0 / v.denominator);
        }
        Self { spent: visits.iter().map(|v| v.spent).collect(), num, den }
    }

    /// Estimate over visits paid for within the spend window `(lo, hi]`.
    fn window(&self, lo: f64, hi: f64) -> Option<f64> {
        let tol = 1e-9 * hi.abs().max(1.0);
        let a = self.spent.partition_point(|&s| s <= lo + tol);
        let b = self.spent.partition_point(|&s| s <= hi + tol);
        (b > a).then(|| (self.num[b] - self.num[a]) / (self.den[b] - self.den[a]))
    }

    /// Pooled estimate and replicated variance over `q` equal consecutive batches of `(lo, hi]`.
    fn batched(&self, lo: f64, hi: f64, q: usize) -> Option<(f64, f64)> {
        let width = (hi - lo) / q as f64;
        let mut batches = Vec::with_capacity(q);
        for t in 0..q {
            batches.push(self.window(lo + t as f64 * width, lo + (t + 1) as f64 * width)?);
        }
        let mean = batches.iter().sum::<f64>() / q as f64;
        let ss: f64 = batches.iter().map(|b| (b - mean).powi(2)).sum();
        Some((self.window(lo, hi)?, width / (q - 1) as f64 * ss))
    }
}

/// One sample set: a run and the spend offset where its window starts.
#[derive(Clone, Copy)]
struct SampleSet {
    run: usize,
    offset: f64,
}

/// Realization of the two-stage mixture at fraction `c` on group `sets`.
fn replay(indexes: &[Vec<RunIndex>], sets: &[SampleSet], width: f64, c: f64, q: usize) -> Option<f64> {
    let k_count = indexes.len();
    let pilot = c * width / k_count as f64;
    let mut estimates = Vec::with_capacity(k_count);
    let mut variances = Vec::with_capacity(k_count);
    for (k, set) in sets.iter().enumerate() {
        let (est, var) = indexes[k][set.run].batched(set.offset, set.offset + pilot, q)?;
        estimates.push(est);
        variances.push(var);
    }
    let chosen = argmin(&variances);
    let alloc = AllocationDecision::two_stage(k_count, c, chosen);
    let set = sets[chosen];
    let extended = alloc.fractions()[chosen] * width;
    let (est, var) = indexes[chosen][set.run].batched(set.offset, set.offset + extended, q)?;
    estimates[chosen] = est;
    variances[chosen] = var;
    let weights = optimal_weights(&alloc, &variances).ok()?;
    mixture_estimate(&estimates, &weights).ok()
}

/// Pilot-fraction bound from the runs already held by `pilot`.
pub fn pilot_fraction_bound(pilot: &Pilot<'_>, realizations: usize, grid: &[f64]) -> Result<FractionBound, TwoStageError> {
    validate_bound_params(realizations, grid)?;
    let q = pilot.q();
    let sets_per_run = realizations.div_ceil(q);
    let indexes: Vec<Vec<RunIndex>> = (0..pilot.len())
        .map(|k| {
            let property = pilot.statistic(k).property;
            pilot.traces(k).map(|t| RunIndex::new(&t.visits, property)).collect()
        })
        .collect();
    // Runs of every statistic are funded alike, so one geometry serves all of them.
    let run_budget = pilot.funded(0) / q as f64;
    let width = run_budget / sets_per_run as f64;
    let groups: Vec<SampleSet> = (0..q)
        .flat_map(|run| (0..sets_per_run).map(move |i| SampleSet { run, offset: i as f64 * width }))
        .take(realizations)
        .collect();

    let mut variances = Vec::with_capacity(grid.len());
    for &c in grid {
        let mut values = Vec::with_capacity(realizations);
        for set in &groups {
            let sets = vec![*set; pilot.len()];
            match replay(&indexes, &sets, width, c, q) {
                Some(v) => values.push(v),
                None => break,
            }
        }
        variances.push((values.len() == realizations).then(|| {
            let mean = values.iter().sum::<f64>() / realizations as f64;
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (realizations - 1) as f64
        }));
    }
    let scores: Vec<f64> = variances.iter().map(|v| v.unwrap_or(f64::INFINITY)).collect();
    let best = argmin(&scores);
    let feasible = scores[best].is_finite();
    let fraction = if feasible { grid[best] } else { *grid.last().unwrap() };
    Ok(FractionBound { fraction, feasible, variances, set_budget: width })
}

/// Collects a fresh evenly split pilot of budget `m` and evaluates the bound on it.
#[allow(clippy::too_many_arguments)]
pub fn estimate_pilot_fraction_bound(
    graph: &MultiGraph,
    profiles: &[StatisticProfile],
    m: f64,
    realizations: usize,
    grid: &[f64],
    params: &SamplingParams,
    seed: u64,
) -> Result<FractionBound, TwoStageError> {
    validate_bound_params(realizations, grid)?;
    let mut pilot = Pilot::new(graph, profiles, params, seed)?;
    ensure_viable(&pilot, m)?;
    pilot.fund_evenly(m);
    pilot_fraction_bound(&pilot, realizations, grid)
}

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{accuracy, budget_ratios, BudgetRatio};
use super::oracle::{stabilized_oracle, OracleParams, OracleReport};
use super::seeds::{cell_seed, fnv1a64, splitmix64};
use super::HarnessError;
use crate::estimators::StatisticProfile;
use crate::graph::{generate_synthetic, ground_truth_mean, parse_edge_list, parse_property, GeneratorSpec, GraphError, MultiGraph};
use crate::samplers::{SamplerKind, Walk, WalkTrace};
use crate::two_stage::{
    adaptive_two_stage, run_benchmark, run_two_stage_fixed, AdaptiveParams, Benchmark, SamplingParams, StrategyOutcome,
    Weighting,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum GraphSource {
    Synthetic(GeneratorSpec),
    Files(FileGraph),
}

/// Edge lists and property files on disk; relative paths resolve against the config's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileGraph {
    pub nodes: usize,
    pub relations: Vec<FileEntry>,
    pub properties: Vec<FileEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileEntry {
    pub name: String,
    pub path: PathBuf,
}

/// One member of the statistic ensemble: a sampler on a relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticSpec {
    pub name: String,
    pub relation: String,
    #[serde(flatten)]
    pub sampler: SamplerKind,
}

/// Strategy entry of a config, written as a string:
/// `ATS`, `AVG`, `RND`, `singles`, `single:<statistic>`, `fixed:<c>` or `fixed-equal:<c>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StrategySpec {
    Ats,
    Avg,
    Rnd,
    /// One `single:` entry per statistic.
    Singles,
    Single(String),
    Fixed { c: f64, weighting: Weighting },
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::Ats => write!(f, "ATS"),
            StrategySpec::Avg => write!(f, "AVG"),
            StrategySpec::Rnd => write!(f, "RND"),
            StrategySpec::Singles => write!(f, "singles"),
            StrategySpec::Single(name) => write!(f, "single:{name}"),
            StrategySpec::Fixed { c, weighting: Weighting::Estimated } => write!(f, "fixed:{c}"),
            StrategySpec::Fixed { c, weighting: Weighting::Proportional } => write!(f, "fixed-equal:{c}"),
        }
    }
}

impl FromStr for StrategySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fraction = |v: &str| -> Result<f64, String> {
            let c: f64 = v.trim().parse().map_err(|_| format!("invalid pilot fraction {v:?}"))?;
            if (0.0..=1.0).contains(&c) {
                Ok(c)
            } else {
                Err(format!("pilot fraction {c} outside [0, 1]"))
            }
        };
        match s.trim() {
            t if t.eq_ignore_ascii_case("ats") => Ok(StrategySpec::Ats),
            t if t.eq_ignore_ascii_case("avg") => Ok(StrategySpec::Avg),
            t if t.eq_ignore_ascii_case("rnd") => Ok(StrategySpec::Rnd),
            "singles" => Ok(StrategySpec::Singles),
            t => {
                if let Some(name) = t.strip_prefix("single:") {
                    Ok(StrategySpec::Single(name.to_string()))
                } else if let Some(c) = t.strip_prefix("fixed-equal:") {
                    Ok(StrategySpec::Fixed { c: fraction(c)?, weighting: Weighting::Proportional })
                } else if let Some(c) = t.strip_prefix("fixed:") {
                    Ok(StrategySpec::Fixed { c: fraction(c)?, weighting: Weighting::Estimated })
                } else {
                    Err(format!("unknown strategy {t:?}"))
                }
            }
        }
    }
}

impl TryFrom<String> for StrategySpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<StrategySpec> for String {
    fn from(s: StrategySpec) -> Self {
        s.to_string()
    }
}

/// Strategy with statistic names resolved to indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Ats,
    Avg,
    Rnd,
    Single(usize),
    Fixed { c: f64, weighting: Weighting },
}

/// Visit-level trace request: one statistic at one budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceParams {
    pub statistic: String,
    pub budget: f64,
    /// Explicit SRW start node (charged the visit cost only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    /// Base seed for every cell; absent means the caller picks one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Seed of the synthetic graph; defaults to one derived from `seed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_seed: Option<u64>,
    pub property: String,
    #[serde(default = "ExperimentSpec::default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub budgets: Vec<f64>,
    #[serde(default)]
    pub strategies: Vec<StrategySpec>,
    /// Worker threads; 0 means the available hardware parallelism.
    #[serde(default)]
    pub jobs: usize,
    #[serde(default)]
    pub sampling: SamplingParams,
    #[serde(default)]
    pub adaptive: AdaptiveParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceParams>,
    pub graph: GraphSource,
    pub statistics: Vec<StatisticSpec>,
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::InvalidSpec(msg.into())
}

impl ExperimentSpec {
    fn default_replications() -> usize {
        25
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes to TOML")
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Checks that do not need the graph.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.replications == 0 {
            return Err(invalid("replications must be at least 1"));
        }
        if self.budgets.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(invalid("budgets must be positive"));
        }
        if self.budgets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("budgets must be strictly ascending"));
        }
        if self.statistics.is_empty() {
            return Err(invalid("statistic ensemble is empty"));
        }
        let mut names = BTreeSet::new();
        for s in &self.statistics {
            if s.name.is_empty() || s.name.contains([',', '"', '\n']) {
                return Err(invalid(format!("statistic name {:?} must be non-empty without commas or quotes", s.name)));
            }
            if !names.insert(s.name.as_str()) {
                return Err(invalid(format!("duplicate statistic {}", s.name)));
            }
            s.sampler.validate().map_err(|e| invalid(format!("statistic {}: {e}", s.name)))?;
        }
        for strategy in &self.strategies {
            if let StrategySpec::Single(name) = strategy {
                if !names.contains(name.as_str()) {
                    return Err(invalid(format!("strategy single:{name} names an unknown statistic")));
                }
            }
        }
        self.sampling.costs.validate().map_err(|e| invalid(e.to_string()))?;
        if self.sampling.q < 2 {
            return Err(invalid("sampling.q must be at least 2"));
        }
        self.adaptive.validate().map_err(|e| invalid(format!("adaptive: {e}")))?;
        if let Some(oracle) = &self.oracle {
            oracle.validate()?;
        }
        if let Some(trace) = &self.trace {
            if !names.contains(trace.statistic.as_str()) {
                return Err(invalid(format!("trace names unknown statistic {}", trace.statistic)));
            }
            if !(trace.budget.is_finite() && trace.budget > 0.0) {
                return Err(invalid(format!("trace budget must be positive, got {}", trace.budget)));
            }
        }
        Ok(())
    }

    pub fn graph_seed(&self) -> u64 {
        self.graph_seed.unwrap_or_else(|| splitmix64(self.seed_or_default() ^ fnv1a64(b"graph")))
    }

    /// Loads or generates the graph; `base` resolves relative file paths.
    pub fn build_graph(&self, base: &Path) -> Result<MultiGraph, HarnessError> {
        match &self.graph {
            GraphSource::Synthetic(spec) => Ok(generate_synthetic(spec, self.graph_seed())?),
            GraphSource::Files(files) => {
                let read = |p: &Path| {
                    let path = if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
                    std::fs::read_to_string(&path)
                        .map_err(|source| GraphError::Io { path: path.display().to_string(), source })
                };
                let mut graph = MultiGraph::new(files.nodes);
                for r in &files.relations {
                    let text = read(&r.path)?;
                    graph.add_relation(parse_edge_list(&text, &r.name, files.nodes).map_err(|e| {
                        invalid(format!("{}: {e}", r.path.display()))
                    })?)?;
                }
                for p in &files.properties {
                    let text = read(&p.path)?;
                    let values =
                        parse_property(&text, files.nodes).map_err(|e| invalid(format!("{}: {e}", p.path.display())))?;
                    graph.add_property(p.name.clone(), values)?;
                }
                Ok(graph)
            }
        }
    }

    pub fn profiles(&self) -> Vec<StatisticProfile> {
        self.statistics
            .iter()
            .enumerate()
            .map(|(k, s)| StatisticProfile::new(k, s.name.clone(), s.sampler, &s.relation, &self.property))
            .collect()
    }

    /// Expands `singles` and resolves names, keeping the configured order.
    pub fn strategies(&self) -> Vec<(String, Strategy)> {
        let index = |name: &str| self.statistics.iter().position(|s| s.name == name).expect("validated");
        let mut out = Vec::new();
        for s in &self.strategies {
            match s {
                StrategySpec::Ats => out.push((s.to_string(), Strategy::Ats)),
                StrategySpec::Avg => out.push((s.to_string(), Strategy::Avg)),
                StrategySpec::Rnd => out.push((s.to_string(), Strategy::Rnd)),
                StrategySpec::Singles => {
                    for (k, stat) in self.statistics.iter().enumerate() {
                        out.push((format!("single:{}", stat.name), Strategy::Single(k)));
                    }
                }
                StrategySpec::Single(name) => out.push((s.to_string(), Strategy::Single(index(name)))),
                StrategySpec::Fixed { c, weighting } => {
                    out.push((s.to_string(), Strategy::Fixed { c: *c, weighting: *weighting }))
                }
            }
        }
        out
    }

    /// Resolves statistics against `graph`; all statistics must cover the same population.
    pub fn bind(&self, graph: &MultiGraph) -> Result<Experiment, HarnessError> {
        self.validate()?;
        graph.property(&self.property)?;
        let first = graph.relation(&self.statistics[0].relation)?;
        for s in &self.statistics {
            let relation = graph.relation(&s.relation)?;
            if relation.active_nodes() != first.active_nodes() {
                return Err(invalid(format!(
                    "relations {} and {} have different sets of active nodes; the mixture needs one population",
                    first.name(),
                    relation.name()
                )));
            }
        }
        let truth = ground_truth_mean(graph, &self.property, &first.active_subset())?;
        Ok(Experiment { profiles: self.profiles(), strategies: self.strategies(), truth })
    }
}

/// A spec bound to a graph.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub profiles: Vec<StatisticProfile>,
    pub strategies: Vec<(String, Strategy)>,
    pub truth: f64,
}

/// One executed cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRecord {
    pub strategy: String,
    pub budget: f64,
    pub replication: usize,
    pub seed: u64,
    pub estimate: f64,
    pub equal_weight_estimate: f64,
    pub final_c: f64,
    pub chosen: usize,
    pub iterations: usize,
    pub spent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub strategy: String,
    pub budget: f64,
    /// NRMSE, or RMSE when the truth is zero.
    pub nrmse: f64,
    pub nrmse_se: f64,
    pub mean_estimate: f64,
    pub truth: f64,
    pub mean_final_c: f64,
    /// Share of replications choosing each statistic.
    pub chosen_frequencies: Vec<f64>,
    pub k_hat_mode: usize,
    /// Accuracy of the equal-weight mixture from the same samples.
    pub equal_weight_nrmse: f64,
    pub equal_weight_nrmse_se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    pub truth: f64,
    /// False when the truth is zero and rows hold RMSE values.
    pub normalized: bool,
    pub statistics: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub cells: Vec<CellRecord>,
    pub oracles: Vec<OracleReport>,
}

/// Runs one strategy at one budget.
pub fn run_strategy(
    graph: &MultiGraph,
    profiles: &[StatisticProfile],
    strategy: &Strategy,
    budget: f64,
    sampling: &SamplingParams,
    adaptive: &AdaptiveParams,
    seed: u64,
) -> Result<StrategyOutcome, HarnessError> {
    let outcome = match strategy {
        Strategy::Ats => adaptive_two_stage(graph, profiles, budget, adaptive, sampling, seed)?,
        Strategy::Avg => run_benchmark(graph, profiles, budget, Benchmark::Avg, sampling, seed)?,
        Strategy::Rnd => run_benchmark(graph, profiles, budget, Benchmark::Rnd, sampling, seed)?,
        Strategy::Single(k) => {
            let mut outcome =
                run_two_stage_fixed(graph, &profiles[*k..=*k], budget, 0.0, sampling, Weighting::Proportional, seed)?;
            outcome.chosen = *k;
            outcome
        }
        Strategy::Fixed { c, weighting } => run_two_stage_fixed(graph, profiles, budget, *c, sampling, *weighting, seed)?,
    };
    Ok(outcome)
}

fn mode(freq: &[f64]) -> usize {
    let mut best = 0;
    for (k, &f) in freq.iter().enumerate() {
        if f > freq[best] {
            best = k;
        }
    }
    best
}

/// Executes every (strategy, budget, replication) cell and aggregates the report.
///
/// Cells run in parallel on the current rayon pool; results are gathered in cell order,
/// so the report depends only on the spec and seed.
pub fn run_experiment(spec: &ExperimentSpec, graph: &MultiGraph) -> Result<ExperimentReport, HarnessError> {
    let experiment = spec.bind(graph)?;
    if spec.budgets.is_empty() {
        return Err(invalid("budget schedule is empty"));
    }
    if experiment.strategies.is_empty() {
        return Err(invalid("no strategies to run"));
    }
    let seed = spec.seed_or_default();
    let r = spec.replications;
    let coords: Vec<(usize, usize, usize)> = (0..experiment.strategies.len())
        .flat_map(|s| (0..spec.budgets.len()).flat_map(move |b| (0..r).map(move |i| (s, b, i))))
        .collect();
    let cells = coords
        .par_iter()
        .map(|&(s, b, i)| {
            let (label, strategy) = &experiment.strategies[s];
            let budget = spec.budgets[b];
            let cell = cell_seed(seed, label, budget, i);
            let outcome = run_strategy(graph, &experiment.profiles, strategy, budget, &spec.sampling, &spec.adaptive, cell)
                .map_err(|e| HarnessError::Cell {
                    strategy: label.clone(),
                    budget,
                    replication: i,
                    message: e.to_string(),
                })?;
            Ok(CellRecord {
                strategy: label.clone(),
                budget,
                replication: i,
                seed: cell,
                estimate: outcome.estimate,
                equal_weight_estimate: outcome.equal_weight_estimate,
                final_c: outcome.pilot_fraction,
                chosen: outcome.chosen,
                iterations: outcome.iterations,
                spent: outcome.spent,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;

    let k_count = experiment.profiles.len();
    let truth = experiment.truth;
    let mut rows = Vec::new();
    for group in cells.chunks(r) {
        let estimates: Vec<f64> = group.iter().map(|c| c.estimate).collect();
        let equal: Vec<f64> = group.iter().map(|c| c.equal_weight_estimate).collect();
        let acc = accuracy(&estimates, truth)?;
        let eq = accuracy(&equal, truth)?;
        let mut chosen_frequencies = vec![0.0; k_count];
        for c in group {
            chosen_frequencies[c.chosen] += 1.0 / r as f64;
        }
        rows.push(ReportRow {
            strategy: group[0].strategy.clone(),
            budget: group[0].budget,
            nrmse: acc.value,
            nrmse_se: acc.standard_error,
            mean_estimate: estimates.iter().sum::<f64>() / r as f64,
            truth,
            mean_final_c: group.iter().map(|c| c.final_c).sum::<f64>() / r as f64,
            k_hat_mode: mode(&chosen_frequencies),
            chosen_frequencies,
            equal_weight_nrmse: eq.value,
            equal_weight_nrmse_se: eq.standard_error,
        });
    }

    let oracles = match &spec.oracle {
        Some(params) => run_oracles(spec, graph, params)?,
        None => Vec::new(),
    };
    Ok(ExperimentReport {
        name: spec.name.clone(),
        seed,
        truth,
        normalized: truth != 0.0,
        statistics: spec.statistics.iter().map(|s| s.name.clone()).collect(),
        rows,
        cells,
        oracles,
    })
}

/// Stabilized oracle for every statistic of the ensemble.
pub fn run_oracles(spec: &ExperimentSpec, graph: &MultiGraph, params: &OracleParams) -> Result<Vec<OracleReport>, HarnessError> {
    spec.bind(graph)?;
    let seed = spec.seed_or_default();
    spec.profiles()
        .iter()
        .map(|p| stabilized_oracle(graph, p, spec.sampling.costs, params, cell_seed(seed, &format!("oracle:{}", p.name), params.budget, 0)))
        .collect()
}

/// Visit-level trace of the statistic named in `spec.trace`.
pub fn run_trace(spec: &ExperimentSpec, graph: &MultiGraph) -> Result<WalkTrace, HarnessError> {
    spec.validate()?;
    let trace = spec.trace.as_ref().ok_or_else(|| invalid("config has no [trace] section"))?;
    let stat = spec.statistics.iter().find(|s| s.name == trace.statistic).expect("validated");
    let relation = graph.relation(&stat.relation)?;
    let seed = cell_seed(spec.seed_or_default(), &format!("trace:{}", stat.name), trace.budget, 0);
    let costs = spec.sampling.costs;
    let mut walk = match (trace.start, stat.sampler) {
        (Some(start), SamplerKind::Srw) => Walk::srw_from(relation, start, costs, seed)?,
        (Some(_), kind) => return Err(invalid(format!("an explicit start node needs SRW, statistic uses {kind}"))),
        (None, kind) => Walk::new(relation, kind, costs, seed)?,
    };
    walk.fund(trace.budget);
    if !walk.is_started() {
        return Err(HarnessError::Runtime(format!(
            "trace budget {} cannot pay the initial cost {}",
            trace.budget,
            walk.initial_cost()
        )));
    }
    Ok(walk.into_trace())
}

fn num(x: f64) -> String {
    format!("{x}")
}

impl ExperimentReport {
    pub fn row(&self, strategy: &str, budget: f64) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.strategy == strategy && r.budget == budget)
    }

    pub fn strategies(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.strategy) {
                out.push(r.strategy.clone());
            }
        }
        out
    }

    /// `strategy,budget,nrmse,mean_estimate,truth,mean_final_c,k_hat_mode`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "strategy,budget,nrmse,mean_estimate,truth,mean_final_c,k_hat_mode")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.strategy,
                num(r.budget),
                num(r.nrmse),
                num(r.mean_estimate),
                num(r.truth),
                num(r.mean_final_c),
                self.statistics[r.k_hat_mode]
            )?;
        }
        Ok(())
    }

    /// One row per replication.
    pub fn write_replications_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "strategy,budget,replication,seed,estimate,equal_weight_estimate,final_c,k_hat,iterations,spent")?;
        for c in &self.cells {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                c.strategy,
                num(c.budget),
                c.replication,
                c.seed,
                num(c.estimate),
                num(c.equal_weight_estimate),
                num(c.final_c),
                self.statistics[c.chosen],
                c.iterations,
                num(c.spent)
            )?;
        }
        Ok(())
    }

    /// Mean chosen-statistic frequencies, one column per statistic.
    pub fn write_frequencies_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "strategy,budget,nrmse_se")?;
        for s in &self.statistics {
            write!(out, ",{s}")?;
        }
        writeln!(out)?;
        for r in &self.rows {
            write!(out, "{},{},{}", r.strategy, num(r.budget), num(r.nrmse_se))?;
            for f in &r.chosen_frequencies {
                write!(out, ",{}", num(*f))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Budget ratio of `reference` against every strategy at `target`.
    pub fn budget_ratio_report(&self, reference: &str, target: f64) -> Result<Vec<BudgetRatio>, HarnessError> {
        let curves: Vec<(String, Vec<f64>, Vec<f64>)> = self
            .strategies()
            .into_iter()
            .map(|s| {
                let rows: Vec<&ReportRow> = self.rows.iter().filter(|r| r.strategy == s).collect();
                (s, rows.iter().map(|r| r.budget).collect(), rows.iter().map(|r| r.nrmse).collect())
            })
            .collect();
        budget_ratios(&curves, reference, target)
    }
}

pub fn write_oracle_csv<W: Write>(reports: &[OracleReport], mut out: W) -> io::Result<()> {
    writeln!(out, "statistic,budget,sigma2,budget_doubled,sigma2_doubled,relative_change,stabilized,degenerate")?;
    for o in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            o.statistic,
            num(o.first.budget),
            num(o.first.value),
            num(o.second.budget),
            num(o.second.value),
            num(o.relative_change),
            o.stabilized,
            o.first.degenerate || o.second.degenerate
        )?;
    }
    Ok(())
}

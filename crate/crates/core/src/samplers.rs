//! Random-walk samplers that produce node-visit traces under a budget ledger.
//!
//! Every sampler is a resumable [`Walk`]: funding it with more budget continues the
//! same walk where it stopped. The one-shot entry points [`run_srw`], [`run_rwur`],
//! [`run_fs`] and [`run_uni`] fund a fresh walk once and return its trace.

use std::fmt;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{NodeId, Relation};

/// Relative slack used when comparing budget amounts built from repeated fractional splits.
const BUDGET_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("start node {0} is not active in the relation")]
    InactiveStart(NodeId),
    #[error("relation {0} has no active nodes")]
    NoActiveNodes(String),
    #[error("budget {available} cannot cover the initial cost {needed}")]
    InsufficientBudget { needed: f64, available: f64 },
    #[error("alpha must be finite and >= 0, got {0}")]
    InvalidAlpha(f64),
    #[error("frontier sampling needs at least one walker")]
    NoWalkers,
    #[error("invalid costs: visit {visit_cost}, jump {jump_cost}")]
    InvalidCosts { visit_cost: f64, jump_cost: f64 },
}

/// Per-visit and per-uniform-draw prices in budget units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModel {
    #[serde(default = "CostModel::default_visit")]
    pub visit_cost: f64,
    #[serde(default = "CostModel::default_jump")]
    pub jump_cost: f64,
}

impl CostModel {
    fn default_visit() -> f64 {
        1.0
    }

    fn default_jump() -> f64 {
        14.0
    }

    pub fn new(visit_cost: f64, jump_cost: f64) -> Result<Self, SamplerError> {
        let costs = Self { visit_cost, jump_cost };
        costs.validate()?;
        Ok(costs)
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        let ok = self.visit_cost.is_finite() && self.visit_cost > 0.0 && self.jump_cost.is_finite() && self.jump_cost >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(SamplerError::InvalidCosts { visit_cost: self.visit_cost, jump_cost: self.jump_cost })
        }
    }

    /// Price of one uniformly drawn node: the draw plus the visit.
    pub fn uniform_draw(&self) -> f64 {
        self.jump_cost + self.visit_cost
    }
}

impl Default for CostModel {
    fn default() -> Self {
        Self { visit_cost: 1.0, jump_cost: 14.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetLedger {
    pub total: f64,
    pub spent: f64,
    pub costs: CostModel,
}

impl BudgetLedger {
    pub fn new(total: f64) -> Self {
        Self::with_costs(total, CostModel::default())
    }

    pub fn with_costs(total: f64, costs: CostModel) -> Self {
        Self { total, spent: 0.0, costs }
    }

    pub fn remaining(&self) -> f64 {
        self.total - self.spent
    }

    pub fn can_afford(&self, cost: f64) -> bool {
        self.spent + cost <= self.total + BUDGET_EPS * self.total.max(1.0)
    }

    fn charge(&mut self, cost: f64) {
        debug_assert!(self.can_afford(cost));
        self.spent += cost;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sampler", rename_all = "lowercase")]
pub enum SamplerKind {
    /// Simple random walk.
    Srw,
    /// Random walk with uniform restarts: jump with probability `alpha / (d + alpha)`.
    Rwur { alpha: f64 },
    /// Frontier sampling with `walkers` coordinated walkers.
    Fs { walkers: usize },
    /// Independent uniform node draws.
    Uni,
}

impl SamplerKind {
    pub fn validate(&self) -> Result<(), SamplerError> {
        match *self {
            SamplerKind::Rwur { alpha } if !(alpha.is_finite() && alpha >= 0.0) => Err(SamplerError::InvalidAlpha(alpha)),
            SamplerKind::Fs { walkers: 0 } => Err(SamplerError::NoWalkers),
            _ => Ok(()),
        }
    }

    /// Budget a fresh uniformly started walk needs before it records anything.
    pub fn start_cost(&self, costs: &CostModel) -> f64 {
        match *self {
            SamplerKind::Fs { walkers } => walkers as f64 * costs.uniform_draw(),
            _ => costs.uniform_draw(),
        }
    }

    /// Offset added to the degree in the Hansen-Hurwitz denominator.
    fn denominator_offset(&self) -> f64 {
        match *self {
            SamplerKind::Rwur { alpha } => alpha,
            _ => 0.0,
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplerKind::Srw => write!(f, "SRW"),
            SamplerKind::Rwur { alpha } => write!(f, "RWuR(alpha={alpha})"),
            SamplerKind::Fs { walkers } => write!(f, "FS(s={walkers})"),
            SamplerKind::Uni => write!(f, "UNI"),
        }
    }
}

/// How a visit was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// Explicitly supplied start node; charged the visit cost only.
    Placed,
    /// Uniform draw over active nodes (start, restart or independent sample).
    Jump,
    /// Move along an edge from the given node.
    Move { from: NodeId },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Visit {
    pub node: NodeId,
    pub degree: usize,
    /// Hansen-Hurwitz weight denominator: `d + alpha` for RWuR, `d` for SRW/FS, 1 for UNI.
    pub denominator: f64,
    pub step: Step,
    /// Ledger spend right after this visit was paid for.
    pub spent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkTrace {
    pub statistic: usize,
    pub visits: Vec<Visit>,
    pub ledger: BudgetLedger,
    pub seed: u64,
}

impl WalkTrace {
    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.visits.iter().map(|v| v.node)
    }

    pub fn jumps(&self) -> usize {
        self.visits.iter().filter(|v| v.step == Step::Jump).count()
    }

    /// Writes `node_id,denominator,cumulative_spent` rows with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "node_id,denominator,cumulative_spent")?;
        for v in &self.visits {
            writeln!(out, "{},{},{}", v.node, v.denominator, v.spent)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Position {
    Unstarted,
    Pending(NodeId),
    At(NodeId),
    Frontier(Vec<NodeId>),
}

/// A resumable sampler run over one relation with its own PRNG stream.
#[derive(Debug, Clone)]
pub struct Walk<'g> {
    relation: &'g Relation,
    kind: SamplerKind,
    rng: ChaCha8Rng,
    position: Position,
    trace: WalkTrace,
}

impl<'g> Walk<'g> {
    /// Unfunded walk whose start node(s) will be drawn uniformly from the active nodes.
    pub fn new(relation: &'g Relation, kind: SamplerKind, costs: CostModel, seed: u64) -> Result<Self, SamplerError> {
        kind.validate()?;
        costs.validate()?;
        if relation.active_nodes().is_empty() {
            return Err(SamplerError::NoActiveNodes(relation.name().to_string()));
        }
        Ok(Self {
            relation,
            kind,
            rng: ChaCha8Rng::seed_from_u64(seed),
            position: Position::Unstarted,
            trace: WalkTrace { statistic: 0, visits: Vec::new(), ledger: BudgetLedger::with_costs(0.0, costs), seed },
        })
    }

    /// Unfunded simple random walk from an explicit start node.
    pub fn srw_from(relation: &'g Relation, start: NodeId, costs: CostModel, seed: u64) -> Result<Self, SamplerError> {
        if start >= relation.node_count() || relation.degree(start) == 0 {
            return Err(SamplerError::InactiveStart(start));
        }
        let mut walk = Self::new(relation, SamplerKind::Srw, costs, seed)?;
        walk.position = Position::Pending(start);
        Ok(walk)
    }

    pub fn with_statistic(mut self, statistic: usize) -> Self {
        self.trace.statistic = statistic;
        self
    }

    pub fn kind(&self) -> SamplerKind {
        self.kind
    }

    pub fn relation(&self) -> &'g Relation {
        self.relation
    }

    pub fn trace(&self) -> &WalkTrace {
        &self.trace
    }

    pub fn into_trace(self) -> WalkTrace {
        self.trace
    }

    pub fn is_started(&self) -> bool {
        !matches!(self.position, Position::Unstarted | Position::Pending(_))
    }

    /// Budget needed before the first visit can be recorded.
    pub fn initial_cost(&self) -> f64 {
        match self.position {
            Position::Pending(_) => self.trace.ledger.costs.visit_cost,
            _ => self.kind.start_cost(&self.trace.ledger.costs),
        }
    }

    /// Adds `amount` to the ledger and walks until the stopping rule holds.
    pub fn fund(&mut self, amount: f64) {
        self.trace.ledger.total += amount.max(0.0);
        self.advance();
    }

    fn record(&mut self, node: NodeId, step: Step) {
        let costs = self.trace.ledger.costs;
        let cost = match step {
            Step::Jump => costs.uniform_draw(),
            Step::Placed | Step::Move { .. } => costs.visit_cost,
        };
        self.trace.ledger.charge(cost);
        let degree = self.relation.degree(node);
        let denominator = match self.kind {
            SamplerKind::Uni => 1.0,
            kind => degree as f64 + kind.denominator_offset(),
        };
        self.trace.visits.push(Visit { node, degree, denominator, step, spent: self.trace.ledger.spent });
    }

    fn uniform_node(&mut self) -> NodeId {
        let active = self.relation.active_nodes();
        active[self.rng.random_range(0..active.len())]
    }

    fn random_neighbor(&mut self, u: NodeId) -> NodeId {
        let nbrs = self.relation.neighbors(u);
        nbrs[self.rng.random_range(0..nbrs.len())]
    }

    fn advance(&mut self) {
        let costs = self.trace.ledger.costs;
        match std::mem::replace(&mut self.position, Position::Unstarted) {
            Position::Unstarted => {
                if !self.trace.ledger.can_afford(self.kind.start_cost(&costs)) {
                    return;
                }
                match self.kind {
                    SamplerKind::Fs { walkers } => {
                        let mut frontier = Vec::with_capacity(walkers);
                        for _ in 0..walkers {
                            let v = self.uniform_node();
                            self.record(v, Step::Jump);
                            frontier.push(v);
                        }
                        self.position = Position::Frontier(frontier);
                    }
                    _ => {
                        let v = self.uniform_node();
                        self.record(v, Step::Jump);
                        self.position = Position::At(v);
                    }
                }
                self.advance();
            }
            Position::Pending(start) => {
                if !self.trace.ledger.can_afford(costs.visit_cost) {
                    self.position = Position::Pending(start);
                    return;
                }
                self.record(start, Step::Placed);
                self.position = Position::At(start);
                self.advance();
            }
            Position::At(mut u) => {
                match self.kind {
                    SamplerKind::Srw | SamplerKind::Fs { .. } => {
                        while self.trace.ledger.can_afford(costs.visit_cost) {
                            let v = self.random_neighbor(u);
                            self.record(v, Step::Move { from: u });
                            u = v;
                        }
                    }
                    SamplerKind::Rwur { alpha } => {
                        // Reserve the worst-case step so a restart never overspends.
                        while self.trace.ledger.can_afford(costs.uniform_draw().max(costs.visit_cost)) {
                            let d = self.relation.degree(u) as f64;
                            if alpha > 0.0 && self.rng.random::<f64>() * (d + alpha) < alpha {
                                u = self.uniform_node();
                                self.record(u, Step::Jump);
                            } else {
                                let v = self.random_neighbor(u);
                                self.record(v, Step::Move { from: u });
                                u = v;
                            }
                        }
                    }
                    SamplerKind::Uni => {
                        while self.trace.ledger.can_afford(costs.uniform_draw()) {
                            u = self.uniform_node();
                            self.record(u, Step::Jump);
                        }
                    }
                }
                self.position = Position::At(u);
            }
            Position::Frontier(mut frontier) => {
                let mut degree_sum: usize = frontier.iter().map(|&v| self.relation.degree(v)).sum();
                while self.trace.ledger.can_afford(costs.visit_cost) {
                    let r = pick_walker(self.relation, &frontier, degree_sum, &mut self.rng);
                    let u = frontier[r];
                    let v = self.random_neighbor(u);
                    self.record(v, Step::Move { from: u });
                    degree_sum = degree_sum - self.relation.degree(u) + self.relation.degree(v);
                    frontier[r] = v;
                }
                self.position = Position::Frontier(frontier);
            }
        }
    }
}

/// Chooses walker `r` with probability `d(v_r) / sum_i d(v_i)`.
fn pick_walker<R: Rng>(relation: &Relation, frontier: &[NodeId], degree_sum: usize, rng: &mut R) -> usize {
    let mut target = rng.random_range(0..degree_sum);
    for (r, &v) in frontier.iter().enumerate() {
        let d = relation.degree(v);
        if target < d {
            return r;
        }
        target -= d;
    }
    unreachable!("degree sum out of sync with frontier")
}

/// Probability that walker `r` is selected next, for diagnostics and tests.
pub fn walker_selection_probabilities(relation: &Relation, frontier: &[NodeId]) -> Vec<f64> {
    let total: usize = frontier.iter().map(|&v| relation.degree(v)).sum();
    frontier.iter().map(|&v| relation.degree(v) as f64 / total as f64).collect()
}

/// Probability that an RWuR step from a node of degree `degree` restarts uniformly.
pub fn rwur_jump_probability(degree: usize, alpha: f64) -> f64 {
    alpha / (degree as f64 + alpha)
}

fn run_funded(mut walk: Walk<'_>, ledger: BudgetLedger) -> Result<WalkTrace, SamplerError> {
    let needed = walk.initial_cost();
    if !ledger.can_afford(needed) {
        return Err(SamplerError::InsufficientBudget { needed, available: ledger.total });
    }
    walk.fund(ledger.total);
    Ok(walk.into_trace())
}

/// Simple random walk from `start`, recording the start node itself.
pub fn run_srw(relation: &Relation, start: NodeId, ledger: BudgetLedger, seed: u64) -> Result<WalkTrace, SamplerError> {
    run_funded(Walk::srw_from(relation, start, ledger.costs, seed)?, ledger)
}

/// Random walk with uniform restarts from a uniformly drawn start node.
pub fn run_rwur(relation: &Relation, alpha: f64, ledger: BudgetLedger, seed: u64) -> Result<WalkTrace, SamplerError> {
    run_funded(Walk::new(relation, SamplerKind::Rwur { alpha }, ledger.costs, seed)?, ledger)
}

/// Frontier sampling with `walkers` uniformly started walkers.
pub fn run_fs(relation: &Relation, walkers: usize, ledger: BudgetLedger, seed: u64) -> Result<WalkTrace, SamplerError> {
    run_funded(Walk::new(relation, SamplerKind::Fs { walkers }, ledger.costs, seed)?, ledger)
}

/// Independent uniform draws over the active nodes.
pub fn run_uni(relation: &Relation, ledger: BudgetLedger, seed: u64) -> Result<WalkTrace, SamplerError> {
    run_funded(Walk::new(relation, SamplerKind::Uni, ledger.costs, seed)?, ledger)
}

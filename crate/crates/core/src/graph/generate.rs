//! Seeded synthetic generators for desk-scale analogues of social relations.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GraphError, MultiGraph, NodeId, Relation};

const MAX_ATTEMPTS: usize = 16;
const PROPERTY_STREAM_BASE: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub nodes: usize,
    pub relations: Vec<RelationSpec>,
    pub properties: Vec<PropertySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub name: String,
    #[serde(flatten)]
    pub family: RelationFamily,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum RelationFamily {
    /// Growth model: each arrival links to `edges_per_node` distinct uniformly chosen earlier nodes.
    UniformAttachment { edges_per_node: usize },
    /// Growth model: targets chosen proportionally to current degree.
    PreferentialAttachment { edges_per_node: usize },
    /// Nodes `0..V/2` and `V/2..V` form two communities. Every node links to
    /// `intra_degree` random members of its own community, then `inter_edges`
    /// distinct random cross-community edges are added. With `preferential` each
    /// community instead grows by preferential attachment with `intra_degree` links
    /// per arrival, giving heavy-tailed degrees.
    PlantedTwoCommunity {
        intra_degree: usize,
        inter_edges: usize,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        preferential: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertySpec {
    pub name: String,
    #[serde(flatten)]
    pub rule: PropertyRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum PropertyRule {
    Constant { value: f64 },
    /// Degree of the node in the named relation.
    Degree { relation: String },
    /// Independent draws from `[low, high)`.
    Uniform { low: f64, high: f64 },
    /// `first` on nodes `0..V/2`, `second` on the rest, plus independent `[0, noise)` draws.
    /// Matches the planted communities, so the property is correlated with them.
    Community { first: f64, second: f64, noise: f64 },
}

fn invalid(msg: impl Into<String>) -> GraphError {
    GraphError::InvalidSpec(msg.into())
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<(), GraphError> {
        let v = self.nodes;
        if v < 2 {
            return Err(invalid("node count must be at least 2"));
        }
        if self.properties.is_empty() {
            return Err(invalid("at least one property rule is required"));
        }
        for r in &self.relations {
            match r.family {
                RelationFamily::UniformAttachment { edges_per_node }
                | RelationFamily::PreferentialAttachment { edges_per_node } => {
                    if edges_per_node == 0 || edges_per_node >= v {
                        return Err(invalid(format!("{}: edges_per_node must be in 1..{v}", r.name)));
                    }
                }
                RelationFamily::PlantedTwoCommunity { intra_degree, inter_edges, .. } => {
                    let (a, b) = (v / 2, v - v / 2);
                    if intra_degree == 0 || intra_degree >= a {
                        return Err(invalid(format!("{}: intra_degree must be in 1..{a}", r.name)));
                    }
                    if inter_edges == 0 || inter_edges > a * b {
                        return Err(invalid(format!("{}: inter_edges must be in 1..={}", r.name, a * b)));
                    }
                }
            }
        }
        for p in &self.properties {
            match &p.rule {
                PropertyRule::Constant { value } if !value.is_finite() => {
                    return Err(invalid(format!("{}: constant must be finite", p.name)));
                }
                PropertyRule::Degree { relation } if !self.relations.iter().any(|r| &r.name == relation) => {
                    return Err(invalid(format!("{}: unknown relation {relation}", p.name)));
                }
                PropertyRule::Uniform { low, high } if !(low.is_finite() && high.is_finite() && low < high) => {
                    return Err(invalid(format!("{}: need finite low < high", p.name)));
                }
                PropertyRule::Community { first, second, noise }
                    if !(first.is_finite() && second.is_finite() && noise.is_finite() && *noise >= 0.0) =>
                {
                    return Err(invalid(format!("{}: need finite values and noise >= 0", p.name)));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn attachment(nodes: usize, m: usize, preferential: bool, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    let mut order: Vec<NodeId> = (0..nodes).collect();
    order.shuffle(rng);
    let mut edges = Vec::with_capacity(m * nodes);
    // Seed clique on the first m + 1 arrivals.
    for i in 0..=m {
        for j in 0..i {
            edges.push((order[j], order[i]));
        }
    }
    let mut endpoints: Vec<NodeId> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    let mut targets = Vec::with_capacity(m);
    for i in (m + 1)..nodes {
        targets.clear();
        while targets.len() < m {
            let t = if preferential {
                endpoints[rng.random_range(0..endpoints.len())]
            } else {
                order[rng.random_range(0..i)]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((order[i], t));
            endpoints.push(order[i]);
            endpoints.push(t);
        }
    }
    edges
}

fn planted(nodes: usize, intra: usize, inter: usize, preferential: bool, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    let split = nodes / 2;
    let ranges = [(0, split), (split, nodes)];
    let mut edges = BTreeSet::new();
    for &(lo, hi) in &ranges {
        if preferential {
            for (u, v) in attachment(hi - lo, intra, true, rng) {
                let (u, v) = (u + lo, v + lo);
                edges.insert((u.min(v), u.max(v)));
            }
            continue;
        }
        for v in lo..hi {
            let mut added = 0;
            while added < intra {
                let u = rng.random_range(lo..hi);
                if u != v {
                    edges.insert((u.min(v), u.max(v)));
                    added += 1;
                }
            }
        }
    }
    let mut cross = BTreeSet::new();
    while cross.len() < inter {
        let u = rng.random_range(0..split);
        let v = rng.random_range(split..nodes);
        cross.insert((u, v));
    }
    edges.extend(cross);
    edges.into_iter().collect()
}

fn build_relation(spec: &RelationSpec, nodes: usize, seed: u64, index: u64) -> Result<Relation, GraphError> {
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = stream(seed, (index << 8) | attempt as u64);
        let edges = match spec.family {
            RelationFamily::UniformAttachment { edges_per_node } => attachment(nodes, edges_per_node, false, &mut rng),
            RelationFamily::PreferentialAttachment { edges_per_node } => {
                attachment(nodes, edges_per_node, true, &mut rng)
            }
            RelationFamily::PlantedTwoCommunity { intra_degree, inter_edges, preferential } => {
                planted(nodes, intra_degree, inter_edges, preferential, &mut rng)
            }
        };
        let relation = Relation::from_edges(spec.name.clone(), nodes, edges)?;
        if relation.is_connected_on_active() {
            return Ok(relation);
        }
    }
    Err(GraphError::Disconnected { name: spec.name.clone(), attempts: MAX_ATTEMPTS })
}

/// Builds a [`MultiGraph`] from `spec`. Equal `(spec, seed)` give identical graphs;
/// each relation and property draws from its own random stream.
pub fn generate_synthetic(spec: &GeneratorSpec, seed: u64) -> Result<MultiGraph, GraphError> {
    spec.validate()?;
    let nodes = spec.nodes;
    let mut graph = MultiGraph::new(nodes);
    for (i, r) in spec.relations.iter().enumerate() {
        graph.add_relation(build_relation(r, nodes, seed, i as u64)?)?;
    }
    for (j, p) in spec.properties.iter().enumerate() {
        let mut rng = stream(seed, PROPERTY_STREAM_BASE + j as u64);
        let values = match &p.rule {
            PropertyRule::Constant { value } => vec![*value; nodes],
            PropertyRule::Degree { relation } => {
                graph.relation(relation)?.degrees().into_iter().map(|d| d as f64).collect()
            }
            PropertyRule::Uniform { low, high } => (0..nodes).map(|_| rng.random_range(*low..*high)).collect(),
            PropertyRule::Community { first, second, noise } => (0..nodes)
                .map(|v| {
                    let base = if v < nodes / 2 { *first } else { *second };
                    base + if *noise > 0.0 { rng.random_range(0.0..*noise) } else { 0.0 }
                })
                .collect(),
        };
        graph.add_property(p.name.clone(), values)?;
    }
    Ok(graph)
}

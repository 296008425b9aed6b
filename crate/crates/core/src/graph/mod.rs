//! Multi-relation graph model.
//!
//! A [`MultiGraph`] holds several undirected simple relations over one dense node
//! universe `0..V` together with per-node real-valued properties. Graphs are
//! immutable once built and can be shared freely between sampler threads.

mod generate;
mod load;

use std::collections::BTreeMap;

use thiserror::Error;

pub use generate::{generate_synthetic, GeneratorSpec, PropertyRule, PropertySpec, RelationFamily, RelationSpec};
pub use load::{load_edge_list, load_property, parse_edge_list, parse_property};

pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: node {node} out of range for {node_count} nodes")]
    NodeOutOfRange { line: usize, node: usize, node_count: usize },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: usize },
    #[error("line {line}: node {node} listed more than once")]
    DuplicateNode { line: usize, node: usize },
    #[error("node {0} has no property value")]
    MissingNode(usize),
    #[error("non-finite property value for node {node}")]
    NonFinite { node: usize },
    #[error("property {name} has {len} entries, expected {expected}")]
    LengthMismatch { name: String, len: usize, expected: usize },
    #[error("relation {name} spans {found} nodes, graph has {expected}")]
    NodeCountMismatch { name: String, found: usize, expected: usize },
    #[error("duplicate name {0}")]
    DuplicateName(String),
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("unknown property {0}")]
    UnknownProperty(String),
    #[error("no active nodes in the measurement population")]
    EmptyPopulation,
    #[error("relation {name} not connected after {attempts} attempts")]
    Disconnected { name: String, attempts: usize },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

/// One undirected simple relation in compressed adjacency form.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    name: String,
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    active: Vec<NodeId>,
    edge_count: usize,
}

impl Relation {
    /// Builds a relation from an edge iterator. Mirrored and repeated edges collapse,
    /// self-loops and out-of-range endpoints are rejected. The error's `line` field
    /// carries the 1-based position of the offending edge in the iterator.
    pub fn from_edges<I>(name: impl Into<String>, node_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut lists: Vec<Vec<NodeId>> = vec![Vec::new(); node_count];
        for (i, (u, v)) in edges.into_iter().enumerate() {
            for node in [u, v] {
                if node >= node_count {
                    return Err(GraphError::NodeOutOfRange { line: i + 1, node, node_count });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { line: i + 1, node: u });
            }
            lists[u].push(v);
            lists[v].push(u);
        }
        Ok(Self::from_lists(name.into(), lists))
    }

    fn from_lists(name: String, mut lists: Vec<Vec<NodeId>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let mut neighbors = Vec::new();
        let mut active = Vec::new();
        for (v, list) in lists.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if !list.is_empty() {
                active.push(v);
            }
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
        }
        let edge_count = neighbors.len() / 2;
        Self { name, offsets, neighbors, active, edge_count }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|v| self.degree(v)).collect()
    }

    /// Nodes with at least one incident edge, ascending.
    pub fn active_nodes(&self) -> &[NodeId] {
        &self.active
    }

    pub fn active_subset(&self) -> NodeSubset {
        let mut active = vec![false; self.node_count()];
        for &v in &self.active {
            active[v] = true;
        }
        NodeSubset { relation: self.name.clone(), active }
    }

    /// True when the active nodes form a single connected component.
    pub fn is_connected_on_active(&self) -> bool {
        let Some(&root) = self.active.first() else {
            return true;
        };
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![root];
        seen[root] = true;
        let mut reached = 1;
        while let Some(u) = stack.pop() {
            for &w in self.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == self.active.len()
    }
}

/// Measurement population of one relation: the nodes it can reach.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSubset {
    pub relation: String,
    pub active: Vec<bool>,
}

impl NodeSubset {
    /// Subset with every node active, for properties defined over the whole universe.
    pub fn all(relation: impl Into<String>, node_count: usize) -> Self {
        Self { relation: relation.into(), active: vec![true; node_count] }
    }

    pub fn is_active(&self, v: NodeId) -> bool {
        self.active[v]
    }

    pub fn len(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Several relations over a shared node universe plus named per-node properties.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiGraph {
    node_count: usize,
    relations: Vec<Relation>,
    properties: BTreeMap<String, Vec<f64>>,
}

impl MultiGraph {
    pub fn new(node_count: usize) -> Self {
        Self { node_count, relations: Vec::new(), properties: BTreeMap::new() }
    }

    pub fn with_relation(mut self, relation: Relation) -> Result<Self, GraphError> {
        self.add_relation(relation)?;
        Ok(self)
    }

    pub fn with_property(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self, GraphError> {
        self.add_property(name, values)?;
        Ok(self)
    }

    pub fn add_relation(&mut self, relation: Relation) -> Result<(), GraphError> {
        if relation.node_count() != self.node_count {
            return Err(GraphError::NodeCountMismatch {
                name: relation.name.clone(),
                found: relation.node_count(),
                expected: self.node_count,
            });
        }
        if self.relations.iter().any(|r| r.name == relation.name) {
            return Err(GraphError::DuplicateName(relation.name));
        }
        self.relations.push(relation);
        Ok(())
    }

    pub fn add_property(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<(), GraphError> {
        let name = name.into();
        if values.len() != self.node_count {
            return Err(GraphError::LengthMismatch { name, len: values.len(), expected: self.node_count });
        }
        if let Some(node) = values.iter().position(|x| !x.is_finite()) {
            return Err(GraphError::NonFinite { node });
        }
        if self.properties.contains_key(&name) {
            return Err(GraphError::DuplicateName(name));
        }
        self.properties.insert(name, values);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Result<&Relation, GraphError> {
        self.relations
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| GraphError::UnknownRelation(name.to_string()))
    }

    pub fn property(&self, name: &str) -> Result<&[f64], GraphError> {
        self.properties
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| GraphError::UnknownProperty(name.to_string()))
    }

    pub fn property_names(&self) -> impl Iterator<Item = &str> {
        self.properties.keys().map(String::as_str)
    }
}

/// Exact mean of a property over the active nodes of `subset`.
pub fn ground_truth_mean(graph: &MultiGraph, property: &str, subset: &NodeSubset) -> Result<f64, GraphError> {
    let values = graph.property(property)?;
    let (sum, count) = values
        .iter()
        .zip(&subset.active)
        .filter(|(_, active)| **active)
        .fold((0.0, 0usize), |(s, n), (x, _)| (s + x, n + 1));
    if count == 0 {
        return Err(GraphError::EmptyPopulation);
    }
    Ok(sum / count as f64)
}

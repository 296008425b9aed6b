use std::fs;
use std::path::Path;

use super::{GraphError, NodeId, Relation};

fn read(path: &Path) -> Result<String, GraphError> {
    fs::read_to_string(path).map_err(|source| GraphError::Io { path: path.display().to_string(), source })
}

/// Meaningful lines: trimmed, non-empty, not starting with `#`, with 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_node(token: Option<&str>, line: usize, node_count: usize) -> Result<NodeId, GraphError> {
    let token = token.ok_or_else(|| GraphError::Parse { line, message: "expected two fields".into() })?;
    let node: usize = token
        .parse()
        .map_err(|_| GraphError::Parse { line, message: format!("invalid node id {token:?}") })?;
    if node >= node_count {
        return Err(GraphError::NodeOutOfRange { line, node, node_count });
    }
    Ok(node)
}

/// Parses "u v" lines into a relation. Comment lines start with `#`.
pub fn parse_edge_list(text: &str, name: &str, node_count: usize) -> Result<Relation, GraphError> {
    let mut edges = Vec::new();
    for (line, content) in content_lines(text) {
        let mut fields = content.split_whitespace();
        let u = parse_node(fields.next(), line, node_count)?;
        let v = parse_node(fields.next(), line, node_count)?;
        if fields.next().is_some() {
            return Err(GraphError::Parse { line, message: "expected exactly two fields".into() });
        }
        if u == v {
            return Err(GraphError::SelfLoop { line, node: u });
        }
        edges.push((u, v));
    }
    Relation::from_edges(name, node_count, edges)
}

/// Loads an undirected edge list; the relation is named after the file stem.
pub fn load_edge_list(path: impl AsRef<Path>, node_count: usize) -> Result<Relation, GraphError> {
    let path = path.as_ref();
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_edge_list(&read(path)?, &name, node_count)
}

/// Parses "node_id value" lines; every node in `0..node_count` must appear exactly once.
pub fn parse_property(text: &str, node_count: usize) -> Result<Vec<f64>, GraphError> {
    let mut values: Vec<Option<f64>> = vec![None; node_count];
    for (line, content) in content_lines(text) {
        let mut fields = content.split_whitespace();
        let node = parse_node(fields.next(), line, node_count)?;
        let token = fields
            .next()
            .ok_or_else(|| GraphError::Parse { line, message: "expected node id and value".into() })?;
        if fields.next().is_some() {
            return Err(GraphError::Parse { line, message: "expected exactly two fields".into() });
        }
        let value: f64 = token
            .parse()
            .map_err(|_| GraphError::Parse { line, message: format!("invalid value {token:?}") })?;
        if !value.is_finite() {
            return Err(GraphError::NonFinite { node });
        }
        if values[node].replace(value).is_some() {
            return Err(GraphError::DuplicateNode { line, node });
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(node, v)| v.ok_or(GraphError::MissingNode(node)))
        .collect()
}

pub fn load_property(path: impl AsRef<Path>, node_count: usize) -> Result<Vec<f64>, GraphError> {
    parse_property(&read(path.as_ref())?, node_count)
}

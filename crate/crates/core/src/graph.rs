//! Labeled graphs shared by the pattern and data sides of a match.
//!
//! A [`LabeledGraph`] is immutable once built. Nodes are addressed two ways:
//! by their [`NodeId`] from the source document, and by a dense `usize`
//! index assigned in document order. Everything downstream (peering,
//! pheromone fields, agents) works on dense indices.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("malformed graph document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("cannot read graph document: {0}")]
    Io(#[from] std::io::Error),
    #[error("node {0:?} has an empty label")]
    EmptyLabel(String),
    #[error("node id {0:?} is empty")]
    EmptyId(String),
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("dangling endpoint: edge {source_id:?} -> {target:?} references unknown node {missing:?}")]
    DanglingEndpoint {
        source_id: String,
        target: String,
        missing: String,
    },
    #[error("duplicate edge between {0:?} and {1:?}")]
    DuplicateEdge(String, String),
    #[error("self-loop on node {0:?}")]
    SelfLoop(String),
    #[error("mixed timestamped and untimestamped edges")]
    MixedTimestamps,
    #[error("edge {0:?} -> {1:?} has a negative or non-finite timestamp")]
    InvalidTimestamp(String, String),
    #[error("unknown node id {0:?}")]
    UnknownNode(String),
}

/// Identifier of a node, unique within one graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// Node or edge label. Compared case-sensitively.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(label: impl Into<String>) -> Self {
        Self(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphRole {
    Pattern,
    Data,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub label: Label,
}

/// An edge between two dense node indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub label: Option<Label>,
    pub directed: bool,
    /// Event time or partial-order rank; only relative order is meaningful.
    pub timestamp: Option<f64>,
}

impl Edge {
    /// The endpoint opposite `n`.
    pub fn other(&self, n: usize) -> usize {
        if self.source == n {
            self.target
        } else {
            self.source
        }
    }
}

/// How an incident edge relates to the node it is listed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Undirected,
    Out,
    In,
}

impl Direction {
    /// True when an agent may walk along the edge from the listing node.
    pub fn traversable(self) -> bool {
        !matches!(self, Direction::In)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub edge: usize,
    pub neighbor: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub label_histogram: BTreeMap<Label, usize>,
    pub max_degree: usize,
}

#[derive(Debug, Clone)]
pub struct LabeledGraph {
    role: GraphRole,
    nodes: Vec<Node>,
    index: HashMap<NodeId, usize>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<Incidence>>,
    // ordered (a, b) -> edge; undirected edges occupy both orders
    pairs: HashMap<(usize, usize), usize>,
    directed: bool,
    temporal: bool,
}

impl LabeledGraph {
    pub fn role(&self) -> GraphRole {
        self.role
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, ix: usize) -> &Node {
        &self.nodes[ix]
    }

    pub fn edge(&self, ix: usize) -> &Edge {
        &self.edges[ix]
    }

    pub fn label(&self, ix: usize) -> &Label {
        &self.nodes[ix].label
    }

    pub fn id(&self, ix: usize) -> &NodeId {
        &self.nodes[ix].id
    }

    /// Document-level default for edge direction.
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// True when at least one edge is directed.
    pub fn has_directed_edges(&self) -> bool {
        self.edges.iter().any(|e| e.directed)
    }

    pub fn is_temporal(&self) -> bool {
        self.temporal
    }

    pub fn index_of(&self, id: &NodeId) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Incidences of the node at dense index `ix`.
    pub fn incident(&self, ix: usize) -> &[Incidence] {
        &self.adjacency[ix]
    }

    pub fn degree(&self, ix: usize) -> usize {
        self.adjacency[ix].len()
    }

    /// Edge that can be walked from `a` to `b` (undirected, or directed a -> b).
    pub fn edge_from(&self, a: usize, b: usize) -> Option<usize> {
        self.pairs.get(&(a, b)).copied().filter(|&e| {
            let edge = &self.edges[e];
            !edge.directed || edge.source == a
        })
    }

    /// Any edge joining `a` and `b`, regardless of direction.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.pairs
            .get(&(a, b))
            .or_else(|| self.pairs.get(&(b, a)))
            .copied()
    }

    /// Direction of edge `e` as seen from endpoint `from`.
    pub fn direction_from(&self, e: usize, from: usize) -> Direction {
        let edge = &self.edges[e];
        if !edge.directed {
            Direction::Undirected
        } else if edge.source == from {
            Direction::Out
        } else {
            Direction::In
        }
    }

    /// All incident edges of `id` together with the opposite endpoint.
    pub fn neighbors(&self, id: &NodeId) -> Result<&[Incidence], GraphError> {
        let ix = self
            .index_of(id)
            .ok_or_else(|| GraphError::UnknownNode(id.to_string()))?;
        Ok(self.incident(ix))
    }

    pub fn stats(&self) -> GraphStats {
        let mut label_histogram = BTreeMap::new();
        for node in &self.nodes {
            *label_histogram.entry(node.label.clone()).or_insert(0) += 1;
        }
        GraphStats {
            node_count: self.nodes.len(),
            edge_count: self.edges.len(),
            label_histogram,
            max_degree: self.adjacency.iter().map(Vec::len).max().unwrap_or(0),
        }
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            directed: self.directed,
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDoc {
                    id: n.id.0.clone(),
                    label: n.label.0.clone(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    source: self.nodes[e.source].id.0.clone(),
                    target: self.nodes[e.target].id.0.clone(),
                    label: e.label.as_ref().map(|l| l.0.clone()),
                    directed: (e.directed != self.directed).then_some(e.directed),
                    t: e.timestamp,
                })
                .collect(),
        }
    }

    /// Same graph with a different role.
    pub fn with_role(mut self, role: GraphRole) -> Self {
        self.role = role;
        self
    }
}

/// On-disk graph document: `nodes`, `edges`, optional `directed` default.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GraphDocument {
    #[serde(default)]
    pub directed: bool,
    pub nodes: Vec<NodeDoc>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

impl GraphDocument {
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph documents always serialize")
    }
}

/// Parse and validate a graph document.
pub fn load_graph(text: &str, role: GraphRole) -> Result<LabeledGraph, GraphError> {
    build_graph(GraphDocument::parse(text)?, role)
}

pub fn load_graph_file(path: impl AsRef<Path>, role: GraphRole) -> Result<LabeledGraph, GraphError> {
    let text = std::fs::read_to_string(path)?;
    load_graph(&text, role)
}

/// Validate a parsed document and build adjacency.
pub fn build_graph(doc: GraphDocument, role: GraphRole) -> Result<LabeledGraph, GraphError> {
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    let mut index = HashMap::with_capacity(doc.nodes.len());
    for n in doc.nodes {
        if n.id.is_empty() {
            return Err(GraphError::EmptyId(n.label));
        }
        if n.label.is_empty() {
            return Err(GraphError::EmptyLabel(n.id));
        }
        let id = NodeId(n.id);
        if index.insert(id.clone(), nodes.len()).is_some() {
            return Err(GraphError::DuplicateNode(id.0));
        }
        nodes.push(Node {
            id,
            label: Label(n.label),
        });
    }

    let timestamped = doc.edges.iter().filter(|e| e.t.is_some()).count();
    if timestamped != 0 && timestamped != doc.edges.len() {
        return Err(GraphError::MixedTimestamps);
    }

    let mut edges = Vec::with_capacity(doc.edges.len());
    let mut adjacency = vec![Vec::new(); nodes.len()];
    let mut pairs = HashMap::with_capacity(doc.edges.len() * 2);
    for e in doc.edges {
        let lookup = |id: &str| {
            index.get(&NodeId::from(id)).copied().ok_or_else(|| GraphError::DanglingEndpoint {
                source_id: e.source.clone(),
                target: e.target.clone(),
                missing: id.to_owned(),
            })
        };
        let source = lookup(&e.source)?;
        let target = lookup(&e.target)?;
        if source == target {
            return Err(GraphError::SelfLoop(e.source));
        }
        if let Some(t) = e.t {
            if !t.is_finite() || t < 0.0 {
                return Err(GraphError::InvalidTimestamp(e.source, e.target));
            }
        }
        if matches!(&e.label, Some(l) if l.is_empty()) {
            return Err(GraphError::EmptyLabel(format!("{}->{}", e.source, e.target)));
        }
        let directed = e.directed.unwrap_or(doc.directed);
        let ix = edges.len();
        let occupied = if directed {
            vec![(source, target)]
        } else {
            vec![(source, target), (target, source)]
        };
        // undirected edges occupy both orders, so one lookup per order suffices
        if occupied.iter().any(|key| pairs.contains_key(key)) {
            return Err(GraphError::DuplicateEdge(e.source, e.target));
        }
        for key in occupied {
            pairs.insert(key, ix);
        }
        if directed {
            adjacency[source].push(Incidence {
                edge: ix,
                neighbor: target,
                direction: Direction::Out,
            });
            adjacency[target].push(Incidence {
                edge: ix,
                neighbor: source,
                direction: Direction::In,
            });
        } else {
            adjacency[source].push(Incidence {
                edge: ix,
                neighbor: target,
                direction: Direction::Undirected,
            });
            adjacency[target].push(Incidence {
                edge: ix,
                neighbor: source,
                direction: Direction::Undirected,
            });
        }
        edges.push(Edge {
            source,
            target,
            label: e.label.map(Label),
            directed,
            timestamp: e.t,
        });
    }

    Ok(LabeledGraph {
        role,
        nodes,
        index,
        edges,
        adjacency,
        pairs,
        directed: doc.directed,
        temporal: timestamped != 0,
    })
}

/// Convenience builder used by tests, fixtures and generators.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    doc: GraphDocument,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn directed(mut self, directed: bool) -> Self {
        self.doc.directed = directed;
        self
    }

    pub fn node(mut self, id: &str, label: &str) -> Self {
        self.doc.nodes.push(NodeDoc {
            id: id.to_owned(),
            label: label.to_owned(),
        });
        self
    }

    pub fn edge(mut self, source: &str, target: &str) -> Self {
        self.doc.edges.push(EdgeDoc {
            source: source.to_owned(),
            target: target.to_owned(),
            label: None,
            directed: None,
            t: None,
        });
        self
    }

    pub fn timed_edge(mut self, source: &str, target: &str, t: f64) -> Self {
        self.doc.edges.push(EdgeDoc {
            source: source.to_owned(),
            target: target.to_owned(),
            label: None,
            directed: None,
            t: Some(t),
        });
        self
    }

    pub fn labeled_edge(mut self, source: &str, target: &str, label: &str) -> Self {
        self.doc.edges.push(EdgeDoc {
            source: source.to_owned(),
            target: target.to_owned(),
            label: Some(label.to_owned()),
            directed: None,
            t: None,
        });
        self
    }

    pub fn document(self) -> GraphDocument {
        self.doc
    }

    pub fn build(self, role: GraphRole) -> Result<LabeledGraph, GraphError> {
        build_graph(self.doc, role)
    }
}

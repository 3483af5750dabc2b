//! Reading a converged field: ranked correspondences, thresholded
//! subgraphs and an optional one-to-one mapping.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::MatchContext;
use crate::extensions::precedes;
use crate::graph::LabeledGraph;
use crate::pheromone::PheromoneState;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractOptions {
    /// Also build the greedy one-to-one mapping.
    pub greedy: bool,
    /// Overrides the context's extraction threshold θ.
    pub threshold: Option<f64>,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            greedy: true,
            threshold: None,
        }
    }
}

/// A correspondence with its peer pheromone normalized to the strongest one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    pub pattern: usize,
    pub data: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Subgraph {
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Subgraph {
    pub fn contains(&self, node: usize) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeMatch {
    pub pattern: usize,
    pub data: usize,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub size: usize,
    pub mean_score: f64,
    /// Distinct pattern nodes with a positive pair, over all pattern nodes.
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MatchResult {
    pub pairs: Vec<ScoredPair>,
    pub pattern_subgraph: Subgraph,
    pub data_subgraph: Subgraph,
    pub matched_edges: Vec<EdgeMatch>,
    pub summary: Summary,
    pub mapping: Option<Vec<(usize, usize)>>,
}

impl MatchResult {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn threshold_subgraph(g: &LabeledGraph, node: &[f64], edge: &[f64], theta: f64) -> Subgraph {
    let max_node = node.iter().copied().fold(0.0, f64::max);
    if max_node <= 0.0 {
        return Subgraph::default();
    }
    let nodes: Vec<usize> = (0..g.node_count())
        .filter(|&n| node[n] > 0.0 && node[n] >= theta * max_node)
        .collect();
    let max_edge = edge.iter().copied().fold(0.0, f64::max);
    let keep: BTreeSet<usize> = nodes.iter().copied().collect();
    let edges = (0..g.edge_count())
        .filter(|&e| {
            let ed = g.edge(e);
            edge[e] > 0.0 && edge[e] >= theta * max_edge && keep.contains(&ed.source) && keep.contains(&ed.target)
        })
        .collect();
    Subgraph { nodes, edges }
}

/// Ranked pairs, thresholded subgraphs and, if asked, a greedy mapping.
pub fn extract_matches(state: &PheromoneState, ctx: &MatchContext, opts: &ExtractOptions) -> MatchResult {
    let (pattern, data) = (&ctx.pattern, &ctx.data);
    let theta = opts.threshold.unwrap_or(ctx.params.extraction_threshold);

    let max_peer = state.peer.iter().copied().fold(0.0, f64::max);
    let mut pairs: Vec<ScoredPair> = ctx
        .peers
        .pairs()
        .iter()
        .zip(&state.peer)
        .filter(|(_, &f)| f > 0.0)
        .map(|(p, &f)| ScoredPair {
            pattern: p.pattern,
            data: p.data,
            score: f / max_peer,
        })
        .collect();
    pairs.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| pattern.id(a.pattern).cmp(pattern.id(b.pattern)))
            .then_with(|| data.id(a.data).cmp(data.id(b.data)))
    });

    let pattern_subgraph = threshold_subgraph(pattern, &state.pattern.node, &state.pattern.edge, theta);
    let data_subgraph = threshold_subgraph(data, &state.data.node, &state.data.edge, theta);

    let score_of: BTreeMap<(usize, usize), f64> = pairs.iter().map(|p| ((p.pattern, p.data), p.score)).collect();
    let max_pe = state.pattern.edge.iter().copied().fold(0.0, f64::max);
    let max_de = state.data.edge.iter().copied().fold(0.0, f64::max);
    let mut matched_edges = Vec::new();
    for &pe in &pattern_subgraph.edges {
        let f = pattern.edge(pe);
        for &de in &data_subgraph.edges {
            let d = data.edge(de);
            let forward = score_of.contains_key(&(f.source, d.source)) && score_of.contains_key(&(f.target, d.target));
            let backward = score_of.contains_key(&(f.source, d.target)) && score_of.contains_key(&(f.target, d.source));
            let oriented = if f.directed { d.directed && forward } else { forward || backward };
            if oriented {
                matched_edges.push(EdgeMatch {
                    pattern: pe,
                    data: de,
                    score: (state.pattern.edge[pe] / max_pe).min(state.data.edge[de] / max_de),
                });
            }
        }
    }

    let matched_pattern: BTreeSet<usize> = pairs.iter().map(|p| p.pattern).collect();
    let summary = Summary {
        size: pairs.len(),
        mean_score: if pairs.is_empty() {
            0.0
        } else {
            pairs.iter().map(|p| p.score).sum::<f64>() / pairs.len() as f64
        },
        coverage: if pattern.node_count() == 0 {
            0.0
        } else {
            matched_pattern.len() as f64 / pattern.node_count() as f64
        },
    };
    let mapping = opts.greedy.then(|| greedy_mapping(ctx, &pairs));
    MatchResult {
        pairs,
        pattern_subgraph,
        data_subgraph,
        matched_edges,
        summary,
        mapping,
    }
}

/// Claim pairs in ranked order, skipping any that reuse a node or would
/// leave an already mapped pattern edge without an image.
fn greedy_mapping(ctx: &MatchContext, ranked: &[ScoredPair]) -> Vec<(usize, usize)> {
    let mut image: BTreeMap<usize, usize> = BTreeMap::new();
    let mut used = BTreeSet::new();
    for p in ranked {
        if image.contains_key(&p.pattern) || used.contains(&p.data) {
            continue;
        }
        image.insert(p.pattern, p.data);
        if violations(ctx, &image).is_empty() {
            used.insert(p.data);
        } else {
            image.remove(&p.pattern);
        }
    }
    let mut mapping: Vec<(usize, usize)> = ranked
        .iter()
        .filter(|p| image.get(&p.pattern) == Some(&p.data))
        .map(|p| (p.pattern, p.data))
        .collect();
    mapping.dedup();
    mapping
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    LabelMismatch { pattern: usize, data: usize },
    MissingImageEdge { pattern_edge: usize },
    OrderViolation { first: usize, second: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LabelMismatch { pattern, data } => write!(f, "label mismatch: {pattern} -> {data}"),
            Violation::MissingImageEdge { pattern_edge } => write!(f, "missing image edge for pattern edge {pattern_edge}"),
            Violation::OrderViolation { first, second } => {
                write!(f, "order violation between pattern edges {first} and {second}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MappingError {
    #[error("pattern node {0} mapped twice")]
    DuplicatePattern(usize),
    #[error("data node {0} mapped twice")]
    DuplicateData(usize),
    #[error("node index {0} out of range")]
    OutOfRange(usize),
}

/// Image of pattern edge `e` under `image`, if both ends are mapped:
/// `Some(None)` when no compatible data edge exists.
fn image_edge(ctx: &MatchContext, image: &BTreeMap<usize, usize>, e: usize) -> Option<Option<usize>> {
    let f = ctx.pattern.edge(e);
    let (x, y) = (*image.get(&f.source)?, *image.get(&f.target)?);
    let data = &ctx.data;
    let found = if f.directed {
        data.edge_from(x, y).filter(|&d| data.edge(d).directed)
    } else {
        data.edge_between(x, y)
    };
    Some(found)
}

/// In missing mode a mapped pattern edge may be carried by a short data
/// route instead of a single edge.
fn bridged(ctx: &MatchContext, x: usize, y: usize) -> bool {
    ctx.mode.missing
        && crate::extensions::multi_hop_sense(&ctx.data, x, ctx.data.label(y), ctx.mode.missing_radius, 1.0)
            .iter()
            .any(|s| s.node == y)
}

fn violations(ctx: &MatchContext, image: &BTreeMap<usize, usize>) -> Vec<Violation> {
    let (pattern, data) = (&ctx.pattern, &ctx.data);
    let mut out = Vec::new();
    for (&u, &x) in image {
        if !ctx.matcher.quality(pattern.label(u), data.label(x)).is_match() {
            out.push(Violation::LabelMismatch { pattern: u, data: x });
        }
    }
    let mut images = BTreeMap::new();
    for e in 0..pattern.edge_count() {
        match image_edge(ctx, image, e) {
            None => {}
            Some(Some(d)) => {
                images.insert(e, d);
            }
            Some(None) => {
                let f = pattern.edge(e);
                let (x, y) = (image[&f.source], image[&f.target]);
                if !(bridged(ctx, x, y) || (!f.directed && bridged(ctx, y, x))) {
                    out.push(Violation::MissingImageEdge { pattern_edge: e });
                }
            }
        }
    }
    if ctx.mode.temporal {
        for (&f1, &d1) in &images {
            for (&f2, &d2) in &images {
                if f1 != f2 && precedes(pattern, f1, f2) && !precedes(data, d1, d2) {
                    out.push(Violation::OrderViolation { first: f1, second: f2 });
                }
            }
        }
    }
    out
}

/// Check the isomorphism conditions on a one-to-one list of pairs.
pub fn validate_mapping(ctx: &MatchContext, pairs: &[(usize, usize)]) -> Result<MappingReport, MappingError> {
    let mut image = BTreeMap::new();
    let mut used = BTreeSet::new();
    for &(u, x) in pairs {
        if u >= ctx.pattern.node_count() {
            return Err(MappingError::OutOfRange(u));
        }
        if x >= ctx.data.node_count() {
            return Err(MappingError::OutOfRange(x));
        }
        if image.insert(u, x).is_some() {
            return Err(MappingError::DuplicatePattern(u));
        }
        if !used.insert(x) {
            return Err(MappingError::DuplicateData(x));
        }
    }
    let violations = violations(ctx, &image);
    Ok(MappingReport {
        valid: violations.is_empty(),
        violations,
    })
}

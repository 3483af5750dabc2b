//! Exhaustive maximum common subgraph for small graphs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::MatchContext;
use crate::extraction::{validate_mapping, MatchResult};
use crate::graph::{Label, LabeledGraph, NodeId};

pub const DEFAULT_NODE_BUDGET: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("graph with {nodes} nodes exceeds the oracle budget of {budget}")]
pub struct BudgetExceeded {
    pub nodes: usize,
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct McsResult {
    /// Mapped nodes.
    pub size: usize,
    /// Pattern edges whose image exists.
    pub edges: usize,
    pub mapping: Vec<(usize, usize)>,
}

struct Search<'a> {
    g1: &'a LabeledGraph,
    g2: &'a LabeledGraph,
    labels: Vec<Label>,
    label_of1: Vec<usize>,
    label_of2: Vec<usize>,
    image: Vec<Option<usize>>,
    taken: Vec<bool>,
    remaining1: Vec<usize>,
    free2: Vec<usize>,
    best: McsResult,
}

impl Search<'_> {
    /// Image edge for pattern edge `e` when both endpoints are mapped.
    fn carried(&self, e: usize) -> bool {
        let f = self.g1.edge(e);
        let (Some(x), Some(y)) = (self.image[f.source], self.image[f.target]) else {
            return true;
        };
        if f.directed {
            self.g2.edge_from(x, y).is_some_and(|d| self.g2.edge(d).directed)
        } else {
            self.g2.edge_between(x, y).is_some()
        }
    }

    fn consistent(&self, u: usize) -> bool {
        self.g1.incident(u).iter().all(|inc| self.carried(inc.edge))
    }

    fn bound(&self, mapped: usize) -> usize {
        mapped
            + (0..self.labels.len())
                .map(|l| self.remaining1[l].min(self.free2[l]))
                .sum::<usize>()
    }

    fn go(&mut self, u: usize, mapped: usize, edges: usize) {
        if u == self.g1.node_count() {
            if (mapped, edges) > (self.best.size, self.best.edges) {
                self.best = McsResult {
                    size: mapped,
                    edges,
                    mapping: (0..u).filter_map(|a| self.image[a].map(|x| (a, x))).collect(),
                };
            }
            return;
        }
        let edge_room = edges + (u..self.g1.node_count()).map(|a| self.g1.degree(a)).sum::<usize>();
        if (self.bound(mapped), edge_room) <= (self.best.size, self.best.edges) {
            return;
        }
        let l = self.label_of1[u];
        self.remaining1[l] -= 1;
        for x in 0..self.g2.node_count() {
            if self.taken[x] || self.label_of2[x] != l {
                continue;
            }
            self.image[u] = Some(x);
            if self.consistent(u) {
                let gained = self
                    .g1
                    .incident(u)
                    .iter()
                    .filter(|inc| inc.neighbor < u && self.image[inc.neighbor].is_some())
                    .count();
                self.taken[x] = true;
                self.free2[l] -= 1;
                self.go(u + 1, mapped + 1, edges + gained);
                self.free2[l] += 1;
                self.taken[x] = false;
            }
            self.image[u] = None;
        }
        self.go(u + 1, mapped, edges);
        self.remaining1[l] += 1;
    }
}

/// Largest one-to-one label-preserving mapping under which every pattern
/// edge between mapped nodes has an image edge. Ties prefer more carried
/// edges. Direction is respected on directed edges.
pub fn exact_mcs(g1: &LabeledGraph, g2: &LabeledGraph, node_budget: usize) -> Result<McsResult, BudgetExceeded> {
    for g in [g1, g2] {
        if g.node_count() > node_budget {
            return Err(BudgetExceeded {
                nodes: g.node_count(),
                budget: node_budget,
            });
        }
    }
    let mut ids: BTreeMap<&Label, usize> = BTreeMap::new();
    for n in g1.nodes().iter().chain(g2.nodes()) {
        let next = ids.len();
        ids.entry(&n.label).or_insert(next);
    }
    let labels: Vec<Label> = {
        let mut v: Vec<(&Label, usize)> = ids.iter().map(|(l, &i)| (*l, i)).collect();
        v.sort_by_key(|&(_, i)| i);
        v.into_iter().map(|(l, _)| l.clone()).collect()
    };
    let label_of1: Vec<usize> = (0..g1.node_count()).map(|n| ids[g1.label(n)]).collect();
    let label_of2: Vec<usize> = (0..g2.node_count()).map(|n| ids[g2.label(n)]).collect();
    let mut remaining1 = vec![0; labels.len()];
    let mut free2 = vec![0; labels.len()];
    label_of1.iter().for_each(|&l| remaining1[l] += 1);
    label_of2.iter().for_each(|&l| free2[l] += 1);
    let mut search = Search {
        g1,
        g2,
        labels,
        label_of1,
        label_of2,
        image: vec![None; g1.node_count()],
        taken: vec![false; g2.node_count()],
        remaining1,
        free2,
        best: McsResult {
            size: 0,
            edges: 0,
            mapping: Vec::new(),
        },
    };
    search.go(0, 0, 0);
    Ok(search.best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub valid: bool,
    pub size_ratio: f64,
    /// Share of planted correspondences present in the mapping.
    pub node_recall: Option<f64>,
}

/// Score a result's greedy mapping against the oracle and, if given, the
/// planted ground truth.
pub fn compare_to_oracle(
    ctx: &MatchContext,
    result: &MatchResult,
    oracle: &McsResult,
    planted: Option<&[(NodeId, NodeId)]>,
) -> OracleComparison {
    let mapping: &[(usize, usize)] = result.mapping.as_deref().unwrap_or(&[]);
    let valid = validate_mapping(ctx, mapping).is_ok_and(|r| r.valid);
    let size_ratio = if oracle.size == 0 {
        if mapping.is_empty() { 1.0 } else { 0.0 }
    } else {
        mapping.len() as f64 / oracle.size as f64
    };
    let node_recall = planted.map(|planted| planted_recall(ctx, mapping, planted));
    OracleComparison {
        valid,
        size_ratio,
        node_recall,
    }
}

/// Share of `planted` id pairs present in `mapping`; 1 when nothing was planted.
pub fn planted_recall(ctx: &MatchContext, mapping: &[(usize, usize)], planted: &[(NodeId, NodeId)]) -> f64 {
    if planted.is_empty() {
        return 1.0;
    }
    let hits = planted
        .iter()
        .filter(|(p, d)| {
            let (Some(u), Some(x)) = (ctx.pattern.index_of(p), ctx.data.index_of(d)) else {
                return false;
            };
            mapping.contains(&(u, x))
        })
        .count();
    hits as f64 / planted.len() as f64
}

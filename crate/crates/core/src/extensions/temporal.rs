//! Ordered two-edge loops.

use std::collections::BTreeSet;

use rand::Rng;

use crate::graph::{Direction, Label, LabeledGraph};
use crate::pheromone::CycleRecord;
use crate::swarm::{orientation_compatible, weighted_choice, AgentFailure, Snapshot};

/// Strict "happens before" between two edges of one graph.
///
/// Timestamps decide when both edges carry one; otherwise both edges must be
/// directed and chained head to tail.
pub fn precedes(g: &LabeledGraph, e1: usize, e2: usize) -> bool {
    let (a, b) = (g.edge(e1), g.edge(e2));
    match (a.timestamp, b.timestamp) {
        (Some(t1), Some(t2)) => t1 < t2,
        _ => a.directed && b.directed && a.target == b.source,
    }
}

/// Labels of pattern nodes two hops from `u`.
fn second_ring(g: &LabeledGraph, u: usize) -> BTreeSet<&Label> {
    g.incident(u)
        .iter()
        .flat_map(|i| g.incident(i.neighbor))
        .filter(|i| i.neighbor != u)
        .map(|i| g.label(i.neighbor))
        .collect()
}

struct Step {
    edge: usize,
    to: usize,
    direction: Direction,
}

fn walk_steps(g: &LabeledGraph, from: usize) -> Vec<Step> {
    g.incident(from)
        .iter()
        .filter(|i| i.direction.traversable())
        .map(|i| Step {
            edge: i.edge,
            to: i.neighbor,
            direction: i.direction,
        })
        .collect()
}

/// Jump in, walk two data edges in strictly increasing order, jump back to
/// the far end of an equally ordered pattern path from `u`, walk it home.
pub fn temporal_cycle<R: Rng + ?Sized>(snap: &Snapshot<'_>, u: usize, rng: &mut R) -> Result<CycleRecord, AgentFailure> {
    let (pattern, data) = (&snap.ctx.pattern, &snap.ctx.data);
    let field = &snap.state.data;
    let x = snap.enter(u, rng)?;

    let near = snap.wanted_labels(u);
    let first = walk_steps(data, x);
    let weights: Vec<f64> = first
        .iter()
        .map(|s| (snap.floor + field.edge[s.edge]) * (1.0 + snap.gradient(s.to, &near)))
        .collect();
    let s1 = &first[weighted_choice(&weights, rng).map_err(|_| AgentFailure::Stuck(2))?];
    let y = s1.to;

    let far = second_ring(pattern, u);
    let second: Vec<Step> = walk_steps(data, y)
        .into_iter()
        .filter(|s| s.edge != s1.edge && precedes(data, s1.edge, s.edge))
        .collect();
    let weights: Vec<f64> = second
        .iter()
        .map(|s| (snap.floor + field.edge[s.edge]) * (1.0 + snap.gradient(s.to, &far)))
        .collect();
    let s2 = &second[weighted_choice(&weights, rng).map_err(|_| AgentFailure::Stuck(3))?];
    let z = s2.to;

    // ordered pattern paths u -f1- w -f2- v whose nodes peer with x, y, z
    let peers = &snap.ctx.peers;
    let mut closings = Vec::new();
    for f1 in pattern.incident(u) {
        let w = f1.neighbor;
        if !orientation_compatible(f1.direction, s1.direction) || peers.slot(w, y).is_none() {
            continue;
        }
        for f2 in pattern.incident(w) {
            let v = f2.neighbor;
            if f2.edge == f1.edge
                || v == u
                || !orientation_compatible(f2.direction, s2.direction)
                || !precedes(pattern, f1.edge, f2.edge)
                || peers.slot(v, z).is_none()
            {
                continue;
            }
            closings.push((f1.edge, w, f2.edge, v));
        }
    }
    let weights: Vec<f64> = closings
        .iter()
        .map(|&(_, _, _, v)| snap.floor + snap.peer_strength(v, z))
        .collect();
    let (f1, w, f2, v) = closings[weighted_choice(&weights, rng).map_err(|_| AgentFailure::Stuck(4))?];

    let quality = snap.pair_quality(u, x) * snap.pair_quality(w, y) * snap.pair_quality(v, z);
    Ok(CycleRecord {
        pattern_start: u,
        data_entry: x,
        data_nodes: vec![x, y, z],
        data_path: vec![s1.edge, s2.edge],
        pattern_return: v,
        pattern_nodes: vec![v, w, u],
        pattern_path: vec![f2, f1],
        pairs: vec![(u, x), (w, y), (v, z)],
        data_bridges: vec![],
        pattern_bridges: vec![],
        quality: quality.value(),
        length: 6,
    })
}

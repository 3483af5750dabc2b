//! Multi-hop sensing across nodes absent from one of the graphs.

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;

use crate::extensions::MatchQuality;
use crate::graph::{Label, LabeledGraph};
use crate::pheromone::CycleRecord;
use crate::swarm::{orientation_compatible, weighted_choice, AgentFailure, Snapshot};

/// A node reachable within the sensing radius.
#[derive(Debug, Clone, PartialEq)]
pub struct SensedNode {
    pub node: usize,
    pub hops: usize,
    /// `δ^hops`
    pub weight: f64,
}

/// A shortest walkable route from the BFS root.
#[derive(Debug, Clone)]
pub(crate) struct Route {
    pub node: usize,
    /// Nodes from the root to `node`, both included.
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Route {
    pub fn hops(&self) -> usize {
        self.edges.len()
    }
}

/// Breadth-first routes along walkable edges, at most `radius` hops.
/// Each node keeps the first route found, scanning incidences in order.
pub(crate) fn routes(g: &LabeledGraph, from: usize, radius: usize) -> Vec<Route> {
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; g.node_count()];
    let mut depth = vec![usize::MAX; g.node_count()];
    depth[from] = 0;
    let mut order = Vec::new();
    let mut queue = VecDeque::from([from]);
    while let Some(m) = queue.pop_front() {
        if depth[m] == radius {
            continue;
        }
        for inc in g.incident(m).iter().filter(|i| i.direction.traversable()) {
            if depth[inc.neighbor] == usize::MAX {
                depth[inc.neighbor] = depth[m] + 1;
                parent[inc.neighbor] = Some((m, inc.edge));
                order.push(inc.neighbor);
                queue.push_back(inc.neighbor);
            }
        }
    }
    order
        .into_iter()
        .map(|node| {
            let (mut nodes, mut edges) = (vec![node], Vec::new());
            let mut at = node;
            while let Some((p, e)) = parent[at] {
                nodes.push(p);
                edges.push(e);
                at = p;
            }
            nodes.reverse();
            edges.reverse();
            Route { node, nodes, edges }
        })
        .collect()
}

/// Nodes labeled `want` within `radius` walkable hops of `from`, nearest first.
pub fn multi_hop_sense(g: &LabeledGraph, from: usize, want: &Label, radius: usize, delta: f64) -> Vec<SensedNode> {
    routes(g, from, radius)
        .into_iter()
        .filter(|r| g.label(r.node) == want)
        .map(|r| SensedNode {
            node: r.node,
            hops: r.hops(),
            weight: delta.powi(r.hops() as i32),
        })
        .collect()
}

/// Labels of pattern nodes within `radius` walkable hops of `u`.
fn wanted_within(g: &LabeledGraph, u: usize, radius: usize) -> BTreeSet<&Label> {
    routes(g, u, radius).into_iter().map(|r| g.label(r.node)).collect()
}

/// The basic loop generalized to bridges: the data walk and the pattern walk
/// may each span up to `missing_radius` edges. Bridge interiors are logged
/// but carry no correspondence.
pub fn bridged_cycle<R: Rng + ?Sized>(snap: &Snapshot<'_>, u: usize, rng: &mut R) -> Result<CycleRecord, AgentFailure> {
    let ctx = snap.ctx;
    let (pattern, data) = (&ctx.pattern, &ctx.data);
    let (radius, delta, gamma) = (ctx.mode.missing_radius, ctx.params.propagation_decay, ctx.params.imprecise_quality);
    let x = snap.enter(u, rng)?;

    let wanted = wanted_within(pattern, u, radius);
    let targets: Vec<Route> = routes(data, x, radius)
        .into_iter()
        .filter(|r| r.hops() == 1 || wanted.iter().any(|w| ctx.matcher.quality(w, data.label(r.node)).is_match()))
        .collect();
    let weights: Vec<f64> = targets
        .iter()
        .map(|r| {
            let weakest = r.edges.iter().map(|&e| snap.state.data.edge[e]).fold(f64::INFINITY, f64::min);
            (snap.floor + weakest) * delta.powi(r.hops() as i32 - 1) * (1.0 + snap.gradient(r.node, &wanted))
        })
        .collect();
    let walk = &targets[weighted_choice(&weights, rng).map_err(|_| AgentFailure::Stuck(2))?];
    let y = walk.node;
    let h_d = walk.hops();

    let closings: Vec<Route> = routes(pattern, u, radius)
        .into_iter()
        .filter(|r| ctx.peers.slot(r.node, y).is_some())
        .filter(|r| {
            r.hops() > 1
                || h_d > 1
                || orientation_compatible(
                    pattern.direction_from(r.edges[0], u),
                    data.direction_from(walk.edges[0], x),
                )
        })
        .collect();
    let weights: Vec<f64> = closings
        .iter()
        .map(|r| (snap.floor + snap.peer_strength(r.node, y)) * delta.powi(r.hops() as i32 - 1))
        .collect();
    let back = &closings[weighted_choice(&weights, rng).map_err(|_| AgentFailure::Stuck(3))?];
    let v = back.node;
    let h_p = back.hops();

    let quality = snap.pair_quality(u, x)
        * snap.pair_quality(v, y)
        * MatchQuality::bridged(gamma, h_d)
        * MatchQuality::bridged(gamma, h_p);
    let interior = |nodes: &[usize]| nodes[1..nodes.len() - 1].to_vec();
    let mut pattern_nodes = back.nodes.clone();
    let mut pattern_path = back.edges.clone();
    pattern_nodes.reverse();
    pattern_path.reverse();
    Ok(CycleRecord {
        pattern_start: u,
        data_entry: x,
        data_nodes: walk.nodes.clone(),
        data_path: walk.edges.clone(),
        pattern_return: v,
        pattern_nodes,
        pattern_path,
        pairs: vec![(u, x), (v, y)],
        data_bridges: interior(&walk.nodes),
        pattern_bridges: interior(&back.nodes),
        quality: quality.value(),
        length: 2 + h_d + h_p,
    })
}

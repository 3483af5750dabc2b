//! One agent's loop through both graphs.

use std::collections::BTreeSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use thiserror::Error;

use crate::context::MatchContext;
use crate::extensions::{bridged_cycle, temporal_cycle, MatchQuality};
use crate::graph::{Direction, Label};
use crate::pheromone::{CycleRecord, PheromoneState};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("weighted choice over an empty option list")]
pub struct EmptyChoice;

/// Draw an index with probability proportional to its weight.
///
/// All-zero weights fall back to a uniform draw.
pub fn weighted_choice<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<usize, EmptyChoice> {
    if weights.is_empty() {
        return Err(EmptyChoice);
    }
    match WeightedIndex::new(weights) {
        Ok(dist) => Ok(dist.sample(rng)),
        Err(_) => Ok(rng.gen_range(0..weights.len())),
    }
}

/// Why an agent's loop did not close.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AgentFailure {
    #[error("start node has no peers")]
    Unpeered,
    /// No candidate at the given step. Steps count arrows: 1 jump into the
    /// data graph, 2 data walk (2 and 3 for the second temporal edge), then
    /// the jump back.
    #[error("no candidate at step {0}")]
    Stuck(u8),
}

/// Frozen view an agent reads during a wave.
#[derive(Clone, Copy)]
pub struct Snapshot<'a> {
    pub ctx: &'a MatchContext,
    pub state: &'a PheromoneState,
    /// Exploration floor added to every movement weight.
    pub floor: f64,
}

impl<'a> Snapshot<'a> {
    pub fn new(ctx: &'a MatchContext, state: &'a PheromoneState) -> Self {
        let floor = ctx.params.initial_node_pheromone * ctx.params.anneal(state.wave);
        Self { ctx, state, floor }
    }

    /// Arrow 1: jump from pattern node `u` to one of its data peers.
    pub(crate) fn enter<R: Rng + ?Sized>(&self, u: usize, rng: &mut R) -> Result<usize, AgentFailure> {
        let peers = self.ctx.peers.peers(u);
        if peers.is_empty() {
            return Err(AgentFailure::Unpeered);
        }
        let weights: Vec<f64> = peers
            .iter()
            .map(|p| self.floor + self.state.data.node[p.data])
            .collect();
        let pick = weighted_choice(&weights, rng).map_err(|_| AgentFailure::Stuck(1))?;
        Ok(peers[pick].data)
    }

    /// How strongly the vicinity of data node `y` carries any wanted label.
    pub(crate) fn gradient(&self, y: usize, wanted: &BTreeSet<&Label>) -> f64 {
        let matcher = &self.ctx.matcher;
        self.state.data.labels[y]
            .iter()
            .map(|(label, strength)| {
                let best = wanted
                    .iter()
                    .map(|w| matcher.quality(w, label).value())
                    .fold(0.0, f64::max);
                strength * best
            })
            .sum()
    }

    /// Labels of the pattern nodes adjacent to `u`.
    pub(crate) fn wanted_labels(&self, u: usize) -> BTreeSet<&'a Label> {
        let pattern = &self.ctx.pattern;
        pattern
            .incident(u)
            .iter()
            .map(|inc| pattern.label(inc.neighbor))
            .collect()
    }

    pub(crate) fn pair_quality(&self, u: usize, x: usize) -> MatchQuality {
        self.ctx.peers.quality(u, x)
    }

    pub(crate) fn peer_strength(&self, u: usize, x: usize) -> f64 {
        self.ctx.peers.slot(u, x).map_or(0.0, |s| self.state.peer[s])
    }
}

/// Whether a pattern edge seen from its walker end can stand for a data edge
/// seen the same way. Undirected pattern edges accept either kind.
pub fn orientation_compatible(pattern: Direction, data: Direction) -> bool {
    match pattern {
        Direction::Undirected => true,
        directed => directed == data,
    }
}

/// Run one agent from pattern node `u`, dispatching on the active mode.
pub fn agent_cycle<R: Rng + ?Sized>(snap: &Snapshot<'_>, u: usize, rng: &mut R) -> Result<CycleRecord, AgentFailure> {
    let mode = snap.ctx.mode;
    if mode.temporal {
        temporal_cycle(snap, u, rng)
    } else if mode.missing {
        bridged_cycle(snap, u, rng)
    } else {
        basic_cycle(snap, u, rng)
    }
}

/// The four-arrow loop: jump in, walk one data edge, jump back to a pattern
/// neighbor of the start, walk the pattern edge home.
pub fn basic_cycle<R: Rng + ?Sized>(snap: &Snapshot<'_>, u: usize, rng: &mut R) -> Result<CycleRecord, AgentFailure> {
    let (pattern, data) = (&snap.ctx.pattern, &snap.ctx.data);
    let x = snap.enter(u, rng)?;

    let wanted = snap.wanted_labels(u);
    let steps: Vec<_> = data
        .incident(x)
        .iter()
        .filter(|inc| inc.direction.traversable())
        .collect();
    let weights: Vec<f64> = steps
        .iter()
        .map(|inc| (snap.floor + snap.state.data.edge[inc.edge]) * (1.0 + snap.gradient(inc.neighbor, &wanted)))
        .collect();
    let step = steps[weighted_choice(&weights, rng).map_err(|_| AgentFailure::Stuck(2))?];
    let y = step.neighbor;

    let closings: Vec<_> = pattern
        .incident(u)
        .iter()
        .filter(|inc| orientation_compatible(inc.direction, step.direction))
        .filter(|inc| snap.ctx.peers.slot(inc.neighbor, y).is_some())
        .collect();
    let weights: Vec<f64> = closings
        .iter()
        .map(|inc| snap.floor + snap.peer_strength(inc.neighbor, y))
        .collect();
    let back = closings[weighted_choice(&weights, rng).map_err(|_| AgentFailure::Stuck(3))?];
    let v = back.neighbor;

    let quality = snap.pair_quality(u, x) * snap.pair_quality(v, y);
    Ok(CycleRecord {
        pattern_start: u,
        data_entry: x,
        data_nodes: vec![x, y],
        data_path: vec![step.edge],
        pattern_return: v,
        pattern_nodes: vec![v, u],
        pattern_path: vec![back.edge],
        pairs: vec![(u, x), (v, y)],
        data_bridges: vec![],
        pattern_bridges: vec![],
        quality: quality.value(),
        length: 4,
    })
}

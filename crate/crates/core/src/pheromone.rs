//! Scalar fields over both graphs and the environment dynamics that act on
//! them: aggregation of agent deposits, evaporation, and propagation (of
//! labels at initialization, of quorum pheromone every wave).

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::MatchContext;
use crate::graph::{Label, LabeledGraph};

/// Entries below this are zeroed after evaporation.
pub const CLAMP: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
#[error("invalid parameter {field}: {reason}")]
pub struct ParamError {
    pub field: &'static str,
    pub reason: String,
}

/// Tuning knobs. Field names double as config-file and CLI keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    /// Fraction of every field entry lost per wave (ρ).
    pub evaporation_rate: f64,
    /// Deposit scale Q in `a = Q · quality / length`.
    pub deposit_constant: f64,
    /// Pheromone placed on every peered node at start, and the exploration
    /// floor added to movement weights (τ₀).
    pub initial_node_pheromone: f64,
    /// Per-hop attenuation of label and quorum propagation (δ).
    pub propagation_decay: f64,
    /// Hop radius of label propagation; raised to the missing radius when
    /// that extension is on.
    pub propagation_radius: usize,
    /// Convergence threshold on per-wave change of each graph's total (ε).
    pub termination_epsilon: f64,
    /// Agents launched per wave; `None` means 10 per peered pattern node.
    pub agents_per_wave: Option<usize>,
    pub max_waves: usize,
    /// Quality of a subsumption match (γ).
    pub imprecise_quality: f64,
    /// Extraction keeps nodes at or above this fraction of the graph's max (θ).
    pub extraction_threshold: f64,
    /// Synchronous relaxation sweeps for quorum pheromone.
    pub quorum_sweeps: usize,
    /// Bias agent start nodes by quorum pheromone.
    pub quorum_modulation: bool,
    /// Per-wave annealing factor applied to deposits and the exploration floor.
    /// 1.0 disables annealing.
    pub cooling: f64,
    /// Run the agents of a wave on the rayon pool (needs the `parallel` feature).
    pub parallel: bool,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            evaporation_rate: 0.1,
            deposit_constant: 1.0,
            initial_node_pheromone: 0.1,
            propagation_decay: 0.5,
            propagation_radius: 1,
            termination_epsilon: 1e-6,
            agents_per_wave: None,
            max_waves: 10_000,
            imprecise_quality: 0.5,
            extraction_threshold: 0.2,
            quorum_sweeps: 3,
            quorum_modulation: true,
            cooling: 0.95,
            parallel: true,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<(), ParamError> {
        fn fail(field: &'static str, reason: impl Into<String>) -> Result<(), ParamError> {
            Err(ParamError {
                field,
                reason: reason.into(),
            })
        }
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.evaporation_rate) {
            return fail("evaporation_rate", "must lie in (0, 1)");
        }
        if !(self.deposit_constant > 0.0 && self.deposit_constant.is_finite()) {
            return fail("deposit_constant", "must be positive");
        }
        if !(self.initial_node_pheromone > 0.0 && self.initial_node_pheromone.is_finite()) {
            return fail("initial_node_pheromone", "must be positive");
        }
        if !open_unit(self.propagation_decay) {
            return fail("propagation_decay", "must lie in (0, 1)");
        }
        if self.propagation_radius < 1 {
            return fail("propagation_radius", "must be at least 1");
        }
        if self.termination_epsilon.is_nan() || self.termination_epsilon <= 0.0 {
            return fail("termination_epsilon", "must be positive");
        }
        if self.termination_epsilon >= self.initial_node_pheromone {
            return fail("termination_epsilon", "must be below initial_node_pheromone");
        }
        if self.agents_per_wave == Some(0) {
            return fail("agents_per_wave", "must be positive");
        }
        if self.max_waves == 0 {
            return fail("max_waves", "must be positive");
        }
        if !open_unit(self.imprecise_quality) {
            return fail("imprecise_quality", "must lie in (0, 1)");
        }
        if !(self.extraction_threshold > 0.0 && self.extraction_threshold <= 1.0) {
            return fail("extraction_threshold", "must lie in (0, 1]");
        }
        if !(self.cooling > 1.0 - self.evaporation_rate && self.cooling <= 1.0) {
            return fail("cooling", "must lie in (1 - evaporation_rate, 1]");
        }
        Ok(())
    }

    /// Deposit and floor scale at `wave` (0-based).
    pub fn anneal(&self, wave: u64) -> f64 {
        self.cooling.powf(wave as f64)
    }
}

/// Label strength in a node's vicinity.
pub type LabelVector = BTreeMap<Label, f64>;

/// All fields attached to one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphField {
    pub node: Vec<f64>,
    pub edge: Vec<f64>,
    pub quorum: Vec<f64>,
    pub labels: Vec<LabelVector>,
}

impl GraphField {
    fn zeroed(g: &LabeledGraph, labels: Vec<LabelVector>) -> Self {
        Self {
            node: vec![0.0; g.node_count()],
            edge: vec![0.0; g.edge_count()],
            quorum: vec![0.0; g.node_count()],
            labels,
        }
    }

    /// Node plus edge pheromone.
    pub fn total(&self) -> f64 {
        self.node.iter().sum::<f64>() + self.edge.iter().sum::<f64>()
    }

    pub fn max_node(&self) -> f64 {
        self.node.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Totals {
    pub pattern: f64,
    pub data: f64,
}

impl Totals {
    /// Largest absolute change of either total.
    pub fn delta(&self, prev: &Totals) -> f64 {
        (self.pattern - prev.pattern)
            .abs()
            .max((self.data - prev.data).abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneState {
    pub pattern: GraphField,
    pub data: GraphField,
    /// Correspondence strength, one entry per peer-map slot.
    pub peer: Vec<f64>,
    pub wave: u64,
}

/// A completed agent loop: jump into the data graph, walk, jump back, walk home.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub pattern_start: usize,
    pub data_entry: usize,
    /// Data nodes in walk order, starting at the entry node.
    pub data_nodes: Vec<usize>,
    pub data_path: Vec<usize>,
    pub pattern_return: usize,
    /// Pattern nodes from the return node back to the start.
    pub pattern_nodes: Vec<usize>,
    pub pattern_path: Vec<usize>,
    /// Matched `(pattern, data)` correspondences; first is the entry jump.
    pub pairs: Vec<(usize, usize)>,
    /// Intermediate nodes of multi-hop bridges; logged, never reinforced.
    pub data_bridges: Vec<usize>,
    pub pattern_bridges: Vec<usize>,
    pub quality: f64,
    /// Hops in the loop: both jumps plus every edge walked.
    pub length: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CycleError {
    #[error("cycle pair ({0}, {1}) is not a peer pair")]
    NotPeers(usize, usize),
    #[error("cycle path is not connected in the {0} graph")]
    Disconnected(&'static str),
    #[error("pattern path does not close at the start node")]
    Open,
    #[error("cycle length {0} is inconsistent with its paths")]
    Length(usize),
    #[error("cycle quality outside (0, 1]")]
    Quality,
}

impl CycleRecord {
    pub fn validate(&self, ctx: &MatchContext) -> Result<(), CycleError> {
        let (pattern, data, peers) = (&ctx.pattern, &ctx.data, &ctx.peers);
        if !(self.quality > 0.0 && self.quality <= 1.0) {
            return Err(CycleError::Quality);
        }
        if self.length < 4 || self.length != 2 + self.data_path.len() + self.pattern_path.len() {
            return Err(CycleError::Length(self.length));
        }
        if self.data_nodes.first() != Some(&self.data_entry)
            || self.pattern_nodes.first() != Some(&self.pattern_return)
        {
            return Err(CycleError::Disconnected("either"));
        }
        if self.pattern_nodes.last() != Some(&self.pattern_start) {
            return Err(CycleError::Open);
        }
        let connected = |g: &LabeledGraph, nodes: &[usize], path: &[usize]| {
            nodes.len() == path.len() + 1
                && path.iter().zip(nodes.windows(2)).all(|(&e, w)| {
                    let edge = g.edge(e);
                    (edge.source == w[0] && edge.target == w[1]) || (edge.source == w[1] && edge.target == w[0])
                })
        };
        if !connected(data, &self.data_nodes, &self.data_path) {
            return Err(CycleError::Disconnected("data"));
        }
        if !connected(pattern, &self.pattern_nodes, &self.pattern_path) {
            return Err(CycleError::Disconnected("pattern"));
        }
        let last_data = *self.data_nodes.last().expect("non-empty");
        let required = [
            (self.pattern_start, self.data_entry),
            (self.pattern_return, last_data),
        ];
        for &(u, x) in required.iter().chain(&self.pairs) {
            if peers.slot(u, x).is_none() {
                return Err(CycleError::NotPeers(u, x));
            }
        }
        if self.pairs.first() != Some(&(self.pattern_start, self.data_entry)) {
            return Err(CycleError::NotPeers(self.pattern_start, self.data_entry));
        }
        Ok(())
    }

    /// Per-element deposit `Q · quality / length`.
    pub fn amount(&self, deposit_constant: f64) -> f64 {
        deposit_amount(deposit_constant, self.quality, self.length)
    }
}

pub fn deposit_amount(deposit_constant: f64, quality: f64, length: usize) -> f64 {
    deposit_constant * quality / length as f64
}

impl PheromoneState {
    /// Fields at the start of a run: τ₀ on every peered node, zero elsewhere.
    pub fn init(ctx: &MatchContext) -> Self {
        let radius = ctx.label_radius();
        let delta = ctx.params.propagation_decay;
        let tau0 = ctx.params.initial_node_pheromone;
        let mut pattern = GraphField::zeroed(&ctx.pattern, propagate_labels(&ctx.pattern, radius, delta));
        let mut data = GraphField::zeroed(&ctx.data, propagate_labels(&ctx.data, radius, delta));
        for u in ctx.peers.peered_pattern_nodes() {
            pattern.node[u] = tau0;
        }
        for x in 0..ctx.data.node_count() {
            if ctx.peers.is_data_peered(x) {
                data.node[x] = tau0;
            }
        }
        Self {
            pattern,
            data,
            peer: vec![0.0; ctx.peers.len()],
            wave: 0,
        }
    }

    pub fn totals(&self) -> Totals {
        Totals {
            pattern: self.pattern.total(),
            data: self.data.total(),
        }
    }

    /// Add `Q · quality / length` to every element the cycle touched.
    pub fn deposit(&mut self, cycle: &CycleRecord, ctx: &MatchContext) -> Result<(), CycleError> {
        self.deposit_scaled(cycle, ctx, 1.0)
    }

    pub(crate) fn deposit_scaled(&mut self, cycle: &CycleRecord, ctx: &MatchContext, scale: f64) -> Result<(), CycleError> {
        cycle.validate(ctx)?;
        let a = cycle.amount(ctx.params.deposit_constant) * scale;
        for &(u, x) in &cycle.pairs {
            self.pattern.node[u] += a;
            self.data.node[x] += a;
            let slot = ctx.peers.slot(u, x).expect("validated");
            self.peer[slot] += a;
        }
        for &e in &cycle.data_path {
            self.data.edge[e] += a;
        }
        for &e in &cycle.pattern_path {
            self.pattern.edge[e] += a;
        }
        Ok(())
    }

    /// Multiply every node, edge and peer entry by `1 - rho`; reset quorum.
    pub fn evaporate(&mut self, rho: f64) {
        let keep = 1.0 - rho;
        let decay = |v: &mut f64| {
            *v *= keep;
            if *v < CLAMP {
                *v = 0.0;
            }
        };
        for field in [&mut self.pattern, &mut self.data] {
            field.node.iter_mut().for_each(decay);
            field.edge.iter_mut().for_each(decay);
            field.quorum.iter_mut().for_each(|q| *q = 0.0);
        }
        self.peer.iter_mut().for_each(decay);
    }

    pub fn propagate_quorum(&mut self, ctx: &MatchContext) {
        let (delta, sweeps) = (ctx.params.propagation_decay, ctx.params.quorum_sweeps);
        self.pattern.quorum = quorum_field(&ctx.pattern, &self.pattern.node, &self.pattern.edge, delta, sweeps);
        self.data.quorum = quorum_field(&ctx.data, &self.data.node, &self.data.edge, delta, sweeps);
    }
}

/// Label vectors: for each node, `Σ δ^k` over nodes within `k ≤ radius` hops
/// carrying each label (own label counts 1). Edge labels count at the
/// distance of their nearer endpoint. Hops ignore edge direction.
pub fn propagate_labels(g: &LabeledGraph, radius: usize, delta: f64) -> Vec<LabelVector> {
    let n = g.node_count();
    let mut dist = vec![usize::MAX; n];
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();
    let mut out = Vec::with_capacity(n);
    for start in 0..n {
        let mut vector = LabelVector::new();
        dist[start] = 0;
        touched.push(start);
        queue.push_back(start);
        while let Some(m) = queue.pop_front() {
            let k = dist[m];
            *vector.entry(g.label(m).clone()).or_insert(0.0) += delta.powi(k as i32);
            if k == radius {
                continue;
            }
            for inc in g.incident(m) {
                if dist[inc.neighbor] == usize::MAX {
                    dist[inc.neighbor] = k + 1;
                    touched.push(inc.neighbor);
                    queue.push_back(inc.neighbor);
                }
            }
        }
        // each labeled edge once, at its nearer endpoint's distance
        for &m in &touched {
            for inc in g.incident(m) {
                let Some(label) = &g.edge(inc.edge).label else { continue };
                let (here, there) = (dist[m], dist[inc.neighbor]);
                if there < here || (there == here && inc.neighbor < m) {
                    continue;
                }
                *vector.entry(label.clone()).or_insert(0.0) += delta.powi(here as i32);
            }
        }
        for &m in &touched {
            dist[m] = usize::MAX;
        }
        touched.clear();
        out.push(vector);
    }
    out
}

/// Quorum pheromone by non-backtracking message passing along edges with
/// positive pheromone. The message from `m` to `n` carries `m`'s node
/// pheromone plus `δ` times what `m` heard from its other active neighbors;
/// a node's quorum is the sum of its incoming messages after `sweeps`
/// synchronous sweeps.
pub fn quorum_field(g: &LabeledGraph, node: &[f64], edge: &[f64], delta: f64, sweeps: usize) -> Vec<f64> {
    let active: Vec<usize> = (0..g.edge_count()).filter(|&e| edge[e] > 0.0).collect();
    let mut quorum = vec![0.0; g.node_count()];
    if active.is_empty() {
        return quorum;
    }
    // msg[2i] flows source -> target of active[i], msg[2i + 1] the reverse
    let mut msg = vec![0.0; active.len() * 2];
    let mut inbox = vec![0.0; g.node_count()];
    for _ in 0..sweeps {
        inbox.iter_mut().for_each(|v| *v = 0.0);
        for (i, &e) in active.iter().enumerate() {
            let ed = g.edge(e);
            inbox[ed.target] += msg[2 * i];
            inbox[ed.source] += msg[2 * i + 1];
        }
        for (i, &e) in active.iter().enumerate() {
            let ed = g.edge(e);
            let (fwd, back) = (msg[2 * i], msg[2 * i + 1]);
            // what the sender heard, minus the echo of the receiver's own message
            msg[2 * i] = node[ed.source] + delta * (inbox[ed.source] - back);
            msg[2 * i + 1] = node[ed.target] + delta * (inbox[ed.target] - fwd);
        }
    }
    for (i, &e) in active.iter().enumerate() {
        let ed = g.edge(e);
        quorum[ed.target] += msg[2 * i];
        quorum[ed.source] += msg[2 * i + 1];
    }
    quorum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphBuilder, GraphRole};

    fn path_abc() -> LabeledGraph {
        GraphBuilder::new()
            .node("a", "A")
            .node("b", "B")
            .node("c", "C")
            .edge("a", "b")
            .edge("b", "c")
            .build(GraphRole::Data)
            .unwrap()
    }

    fn vec_of(v: &LabelVector) -> Vec<(String, f64)> {
        v.iter().map(|(l, x)| (l.to_string(), *x)).collect()
    }

    #[test]
    fn label_vectors_radius_one() {
        let lv = propagate_labels(&path_abc(), 1, 0.5);
        assert_eq!(
            vec_of(&lv[1]),
            [("A".into(), 0.5), ("B".into(), 1.0), ("C".into(), 0.5)]
        );
    }

    #[test]
    fn label_vectors_radius_two() {
        let lv = propagate_labels(&path_abc(), 2, 0.5);
        assert_eq!(
            vec_of(&lv[0]),
            [("A".into(), 1.0), ("B".into(), 0.5), ("C".into(), 0.25)]
        );
    }

    #[test]
    fn isolated_node_vector() {
        let g = GraphBuilder::new().node("x", "X").build(GraphRole::Data).unwrap();
        assert_eq!(vec_of(&propagate_labels(&g, 1, 0.5)[0]), [("X".into(), 1.0)]);
    }

    #[test]
    fn edge_labels_count_once_at_near_endpoint() {
        let g = GraphBuilder::new()
            .node("a", "A")
            .node("b", "B")
            .labeled_edge("a", "b", "knows")
            .build(GraphRole::Data)
            .unwrap();
        let lv = propagate_labels(&g, 1, 0.5);
        assert_eq!(lv[0][&Label::from("knows")], 1.0);
        assert_eq!(lv[1][&Label::from("knows")], 1.0);
    }

    fn single_edge() -> LabeledGraph {
        GraphBuilder::new()
            .node("u", "A")
            .node("v", "B")
            .edge("u", "v")
            .build(GraphRole::Pattern)
            .unwrap()
    }

    #[test]
    fn quorum_single_edge_hand_evaluated() {
        let g = single_edge();
        let s = 0.7;
        // one sweep: each endpoint hears s from the other, and no echo comes back
        for sweeps in [1, 3, 5] {
            let q = quorum_field(&g, &[s, s], &[1.0], 0.5, sweeps);
            assert_eq!(q, vec![s, s]);
        }
    }

    #[test]
    fn quorum_triangle_beats_edge() {
        let tri = GraphBuilder::new()
            .node("a", "A")
            .node("b", "B")
            .node("c", "C")
            .edge("a", "b")
            .edge("b", "c")
            .edge("c", "a")
            .build(GraphRole::Pattern)
            .unwrap();
        let s = 1.0;
        let qt = quorum_field(&tri, &[s; 3], &[1.0; 3], 0.5, 3);
        let qe = quorum_field(&single_edge(), &[s; 2], &[1.0], 0.5, 3);
        // hand evaluation: messages go 0 -> s -> 1.5s -> 1.75s, two inbound each
        for q in &qt {
            assert!((q - 3.5 * s).abs() < 1e-12);
            assert!(*q > qe[0]);
        }
    }

    #[test]
    fn quorum_ignores_unreinforced_edges() {
        let q = quorum_field(&single_edge(), &[1.0, 1.0], &[0.0], 0.5, 3);
        assert_eq!(q, vec![0.0, 0.0]);
    }

    #[test]
    fn evaporation_examples() {
        let g = single_edge();
        let mut st = PheromoneState {
            pattern: GraphField::zeroed(&g, vec![]),
            data: GraphField::zeroed(&g, vec![]),
            peer: vec![],
            wave: 0,
        };
        st.pattern.node = vec![1.0, 0.0];
        st.pattern.quorum = vec![3.0, 3.0];
        st.evaporate(0.1);
        assert!((st.pattern.node[0] - 0.9).abs() < 1e-15);
        assert_eq!(st.pattern.node[1], 0.0);
        assert_eq!(st.pattern.quorum, vec![0.0, 0.0]);
        // geometric decay all the way to the clamp
        let mut k = 1;
        while st.pattern.node[0] > 0.0 {
            let expect = 0.9f64.powi(k);
            assert!((st.pattern.node[0] - expect).abs() <= expect * 1e-12);
            st.evaporate(0.1);
            k += 1;
        }
        assert!(0.9f64.powi(k - 1) < CLAMP * 1.2);
    }

    #[test]
    fn deposit_amount_formula() {
        assert_eq!(deposit_amount(1.0, 1.0, 4), 0.25);
        assert_eq!(deposit_amount(1.0, 0.5, 4), 0.125);
        assert!((deposit_amount(1.0, 1.0, 6) - 1.0 / 6.0).abs() < 1e-15);
        assert!(deposit_amount(1.0, 1.0, 4) > deposit_amount(1.0, 1.0, 6));
        assert!(deposit_amount(1.0, 1.0, 6) > deposit_amount(1.0, 0.5, 4) * 4.0 / 6.0);
    }

    #[test]
    fn params_validation_names_field() {
        assert!(Params::default().validate().is_ok());
        let bad = Params {
            evaporation_rate: 1.5,
            ..Params::default()
        };
        assert_eq!(bad.validate().unwrap_err().field, "evaporation_rate");
        let bad = Params {
            termination_epsilon: 0.5,
            ..Params::default()
        };
        assert_eq!(bad.validate().unwrap_err().field, "termination_epsilon");
        let bad = Params {
            cooling: 0.8,
            ..Params::default()
        };
        assert_eq!(bad.validate().unwrap_err().field, "cooling");
    }
}

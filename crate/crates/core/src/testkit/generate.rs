//! Planted-fragment graph pairs.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{build_graph, EdgeDoc, GraphDocument, GraphRole, LabeledGraph, NodeDoc, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Growth {
    /// Nodes added, each attached to a uniformly drawn existing node.
    pub extra_nodes: usize,
    /// Further edges between uniformly drawn non-adjacent node pairs.
    pub extra_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Noise {
    /// Chance that a surviving data-side seed node gets a random alphabet label.
    pub relabel: f64,
    /// Chance that a data-side seed node is dropped with its edges.
    pub delete_node: f64,
    /// Seed node ids always dropped from the data side.
    pub delete: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    pub seed_subgraph: GraphDocument,
    pub pattern_growth: Growth,
    pub data_growth: Growth,
    /// Labels for grown nodes and relabeling noise.
    pub alphabet: Vec<String>,
    pub noise: Noise,
    pub seed: u64,
}

/// A generated pair plus the seed nodes that survive on both sides.
#[derive(Debug, Clone)]
pub struct PlantedPair {
    pub pattern: LabeledGraph,
    pub data: LabeledGraph,
    pub planted: Vec<(NodeId, NodeId)>,
}

fn grow(doc: &mut GraphDocument, growth: Growth, alphabet: &[String], prefix: &str, rng: &mut ChaCha8Rng) {
    let mut adjacent: BTreeSet<(usize, usize)> = BTreeSet::new();
    let index = |doc: &GraphDocument, id: &str| doc.nodes.iter().position(|n| n.id == id).expect("known id");
    for e in &doc.edges {
        let (a, b) = (index(doc, &e.source), index(doc, &e.target));
        adjacent.insert((a.min(b), a.max(b)));
    }
    let add_edge = |doc: &mut GraphDocument, adjacent: &mut BTreeSet<(usize, usize)>, a: usize, b: usize| {
        adjacent.insert((a.min(b), a.max(b)));
        doc.edges.push(EdgeDoc {
            source: doc.nodes[a].id.clone(),
            target: doc.nodes[b].id.clone(),
            label: None,
            directed: None,
            t: None,
        });
    };
    for i in 0..growth.extra_nodes {
        let label = alphabet.choose(rng).expect("non-empty alphabet").clone();
        let anchor = (!doc.nodes.is_empty()).then(|| rng.gen_range(0..doc.nodes.len()));
        doc.nodes.push(NodeDoc {
            id: format!("{prefix}{i}"),
            label,
        });
        if let Some(anchor) = anchor {
            add_edge(doc, &mut adjacent, anchor, doc.nodes.len() - 1);
        }
    }
    let n = doc.nodes.len();
    let free = n * n.saturating_sub(1) / 2 - adjacent.len();
    for _ in 0..growth.extra_edges.min(free) {
        loop {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b && !adjacent.contains(&(a.min(b), a.max(b))) {
                add_edge(doc, &mut adjacent, a, b);
                break;
            }
        }
    }
}

/// Grow both graphs from the seed fragment, then apply data-side noise.
pub fn generate_pair(spec: &PlantSpec) -> PlantedPair {
    assert!(
        !spec.alphabet.is_empty()
            || (spec.pattern_growth.extra_nodes == 0 && spec.data_growth.extra_nodes == 0 && spec.noise.relabel == 0.0)
    );
    let mut rng_p = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rng_d = ChaCha8Rng::seed_from_u64(spec.seed);
    rng_d.set_stream(1);

    let mut pattern = spec.seed_subgraph.clone();
    grow(&mut pattern, spec.pattern_growth, &spec.alphabet, "p", &mut rng_p);

    let mut data = spec.seed_subgraph.clone();
    let mut dropped = BTreeSet::new();
    let mut relabeled = BTreeSet::new();
    for node in &mut data.nodes {
        if spec.noise.delete.contains(&node.id) || rng_d.gen_bool(spec.noise.delete_node) {
            dropped.insert(node.id.clone());
        } else if rng_d.gen_bool(spec.noise.relabel) {
            let label = spec.alphabet.choose(&mut rng_d).expect("non-empty alphabet").clone();
            if label != node.label {
                relabeled.insert(node.id.clone());
                node.label = label;
            }
        }
    }
    data.nodes.retain(|n| !dropped.contains(&n.id));
    data.edges
        .retain(|e| !dropped.contains(&e.source) && !dropped.contains(&e.target));
    grow(&mut data, spec.data_growth, &spec.alphabet, "d", &mut rng_d);

    let planted = spec
        .seed_subgraph
        .nodes
        .iter()
        .filter(|n| !dropped.contains(&n.id) && !relabeled.contains(&n.id))
        .map(|n| (NodeId::new(&n.id), NodeId::new(&n.id)))
        .collect();
    PlantedPair {
        pattern: build_graph(pattern, GraphRole::Pattern).expect("generated pattern is well formed"),
        data: build_graph(data, GraphRole::Data).expect("generated data is well formed"),
        planted,
    }
}

/// A random connected fragment: a uniform random tree on `nodes` vertices
/// plus up to `extra_edges` chords, labels drawn from `labels`.
pub fn random_fragment(nodes: usize, extra_edges: usize, labels: &[String], seed: u64) -> GraphDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut doc = GraphDocument {
        directed: false,
        nodes: (0..nodes)
            .map(|i| NodeDoc {
                id: format!("s{i}"),
                label: labels.choose(&mut rng).expect("non-empty labels").clone(),
            })
            .collect(),
        edges: Vec::new(),
    };
    let mut seen = BTreeSet::new();
    let mut push = |doc: &mut GraphDocument, a: usize, b: usize| {
        if a != b && seen.insert((a.min(b), a.max(b))) {
            doc.edges.push(EdgeDoc {
                source: format!("s{a}"),
                target: format!("s{b}"),
                label: None,
                directed: None,
                t: None,
            });
        }
    };
    for i in 1..nodes {
        let parent = rng.gen_range(0..i);
        push(&mut doc, parent, i);
    }
    for _ in 0..extra_edges {
        let (a, b) = (rng.gen_range(0..nodes), rng.gen_range(0..nodes));
        push(&mut doc, a, b);
    }
    doc
}

/// The A-B-C triangle used as a planting seed.
pub fn triangle_seed() -> GraphDocument {
    let node = |id: &str, label: &str| NodeDoc {
        id: id.into(),
        label: label.into(),
    };
    let edge = |a: &str, b: &str| EdgeDoc {
        source: a.into(),
        target: b.into(),
        label: None,
        directed: None,
        t: None,
    };
    GraphDocument {
        directed: false,
        nodes: vec![node("A", "A"), node("B", "B"), node("C", "C")],
        edges: vec![edge("A", "B"), edge("B", "C"), edge("C", "A")],
    }
}

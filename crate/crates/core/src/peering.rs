//! Peering: pairing pattern nodes with data nodes that carry the same label.
//!
//! The data side is indexed once into a sorted array of `(label, node id)`
//! entries, which plays the part of a balanced database index: each label
//! lookup is two binary searches over the `d` entries. Every label
//! comparison made while searching is counted so the per-node cost can be
//! measured against `log2 d`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::ops::Range;

use crate::extensions::{LabelMatcher, MatchQuality};
use crate::graph::{GraphRole, Label, LabeledGraph};

/// Data nodes grouped by label, keys in ascending order.
#[derive(Debug, Clone)]
pub struct LabelIndex {
    entries: Vec<(Label, usize)>,
    build_comparisons: u64,
}

impl LabelIndex {
    pub fn build(data: &LabeledGraph) -> Self {
        debug_assert_eq!(data.role(), GraphRole::Data);
        let mut entries: Vec<(Label, usize)> = (0..data.node_count())
            .map(|ix| (data.label(ix).clone(), ix))
            .collect();
        let mut build_comparisons = 0u64;
        entries.sort_by(|a, b| {
            build_comparisons += 1;
            a.0.cmp(&b.0).then_with(|| data.id(a.1).cmp(data.id(b.1)))
        });
        Self {
            entries,
            build_comparisons,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Comparisons spent sorting the index (the `O(d log d)` build cost).
    pub fn build_comparisons(&self) -> u64 {
        self.build_comparisons
    }

    /// Distinct labels with their node lists, in key order.
    pub fn groups(&self) -> impl Iterator<Item = (&Label, Vec<usize>)> {
        self.entries
            .chunk_by(|a, b| a.0 == b.0)
            .map(|chunk| (&chunk[0].0, chunk.iter().map(|e| e.1).collect()))
    }

    fn range_counted(&self, label: &Label, comparisons: &mut u64) -> Range<usize> {
        let mut probe = |pred: &dyn Fn(Ordering) -> bool, within: &[(Label, usize)]| {
            within.partition_point(|(l, _)| {
                *comparisons += 1;
                pred(l.cmp(label))
            })
        };
        let start = probe(&|o| o == Ordering::Less, &self.entries);
        let len = probe(&|o| o != Ordering::Greater, &self.entries[start..]);
        start..start + len
    }

    /// Data nodes carrying exactly `label`, sorted by node id.
    pub fn peers_of(&self, label: &Label) -> Vec<usize> {
        let mut ignored = 0;
        self.peers_of_counted(label, &mut ignored)
    }

    pub fn peers_of_counted(&self, label: &Label, comparisons: &mut u64) -> Vec<usize> {
        let range = self.range_counted(label, comparisons);
        self.entries[range].iter().map(|e| e.1).collect()
    }
}

/// One pattern/data correspondence candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeerPair {
    pub pattern: usize,
    pub data: usize,
    pub quality: MatchQuality,
}

/// Pattern node -> data peers, with the reverse view and a stable slot per pair.
///
/// Slots index the flat pair list; the pheromone engine keeps one
/// correspondence-strength value per slot.
#[derive(Debug, Clone)]
pub struct PeerMap {
    pairs: Vec<PeerPair>,
    by_pattern: Vec<Range<usize>>,
    reverse: Vec<Vec<usize>>,
    slots: HashMap<(usize, usize), usize>,
    comparisons: u64,
}

impl PeerMap {
    /// Peer every pattern node against the index.
    ///
    /// With an ontology in the matcher, labels comparable under subsumption
    /// are looked up too and tagged with the reduced quality.
    pub fn build(pattern: &LabeledGraph, data: &LabeledGraph, index: &LabelIndex, matcher: &LabelMatcher) -> Self {
        let mut comparisons = 0u64;
        let mut pairs = Vec::new();
        let mut by_pattern = Vec::with_capacity(pattern.node_count());
        for u in 0..pattern.node_count() {
            let start = pairs.len();
            let label = pattern.label(u);
            let mut found: Vec<PeerPair> = index
                .peers_of_counted(label, &mut comparisons)
                .into_iter()
                .map(|x| PeerPair {
                    pattern: u,
                    data: x,
                    quality: MatchQuality::EXACT,
                })
                .collect();
            if let Some(ontology) = matcher.ontology() {
                for other in ontology.related(label) {
                    let quality = matcher.quality(label, other);
                    found.extend(
                        index
                            .peers_of_counted(other, &mut comparisons)
                            .into_iter()
                            .map(|x| PeerPair {
                                pattern: u,
                                data: x,
                                quality,
                            }),
                    );
                }
            }
            found.sort_by(|a, b| data.id(a.data).cmp(data.id(b.data)));
            pairs.extend(found);
            by_pattern.push(start..pairs.len());
        }

        let mut reverse = vec![Vec::new(); data.node_count()];
        let mut slots = HashMap::with_capacity(pairs.len());
        for (slot, p) in pairs.iter().enumerate() {
            reverse[p.data].push(slot);
            slots.insert((p.pattern, p.data), slot);
        }
        Self {
            pairs,
            by_pattern,
            reverse,
            slots,
            comparisons,
        }
    }

    pub fn pairs(&self) -> &[PeerPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Label comparisons made while peering.
    pub fn comparisons(&self) -> u64 {
        self.comparisons
    }

    pub fn peers(&self, u: usize) -> &[PeerPair] {
        &self.pairs[self.by_pattern[u].clone()]
    }

    pub fn peer_slots(&self, u: usize) -> Range<usize> {
        self.by_pattern[u].clone()
    }

    /// Slots of pairs whose data side is `x`.
    pub fn reverse_slots(&self, x: usize) -> &[usize] {
        &self.reverse[x]
    }

    pub fn reverse(&self, x: usize) -> impl Iterator<Item = &PeerPair> {
        self.reverse[x].iter().map(|&s| &self.pairs[s])
    }

    pub fn slot(&self, u: usize, x: usize) -> Option<usize> {
        self.slots.get(&(u, x)).copied()
    }

    pub fn quality(&self, u: usize, x: usize) -> MatchQuality {
        self.slot(u, x)
            .map_or(MatchQuality::NONE, |s| self.pairs[s].quality)
    }

    pub fn is_peered(&self, u: usize) -> bool {
        !self.by_pattern[u].is_empty()
    }

    pub fn peered_pattern_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.by_pattern.len()).filter(|&u| self.is_peered(u))
    }

    /// Pattern nodes no data node shares a label with. They stay in the
    /// pattern; the missing-node extension can still match around them.
    pub fn unpeered(&self) -> Vec<usize> {
        (0..self.by_pattern.len()).filter(|&u| !self.is_peered(u)).collect()
    }

    pub fn is_data_peered(&self, x: usize) -> bool {
        !self.reverse[x].is_empty()
    }
}

pub fn build_label_index(data: &LabeledGraph) -> LabelIndex {
    LabelIndex::build(data)
}

pub fn peer_all(pattern: &LabeledGraph, data: &LabeledGraph, index: &LabelIndex, matcher: &LabelMatcher) -> PeerMap {
    PeerMap::build(pattern, data, index, matcher)
}

//! Everything fixed for the duration of one matching run.

use crate::extensions::{LabelMatcher, Mode, ModeError, Ontology};
use crate::graph::{GraphRole, LabeledGraph};
use crate::peering::{LabelIndex, PeerMap};
use crate::pheromone::Params;
use crate::Error;

/// Graphs, label index, peers and settings shared read-only by all agents.
#[derive(Debug, Clone)]
pub struct MatchContext {
    pub pattern: LabeledGraph,
    pub data: LabeledGraph,
    pub index: LabelIndex,
    pub peers: PeerMap,
    pub matcher: LabelMatcher,
    pub mode: Mode,
    pub params: Params,
}

impl MatchContext {
    /// Validate settings, index the data graph and peer the pattern.
    ///
    /// The ontology is consulted only when `mode.imprecise` is set.
    pub fn new(
        pattern: LabeledGraph,
        data: LabeledGraph,
        mode: Mode,
        ontology: Option<Ontology>,
        params: Params,
    ) -> Result<Self, Error> {
        params.validate()?;
        mode.validate(&pattern, &data)?;
        let matcher = match (mode.imprecise, ontology) {
            (true, Some(o)) => LabelMatcher::with_ontology(o, params.imprecise_quality),
            (true, None) => return Err(ModeError::NoOntology.into()),
            (false, _) => LabelMatcher::exact(),
        };
        let pattern = pattern.with_role(GraphRole::Pattern);
        let data = data.with_role(GraphRole::Data);
        let index = LabelIndex::build(&data);
        let peers = PeerMap::build(&pattern, &data, &index, &matcher);
        Ok(Self {
            pattern,
            data,
            index,
            peers,
            matcher,
            mode,
            params,
        })
    }

    /// Exact-label context with default parameters.
    pub fn exact(pattern: LabeledGraph, data: LabeledGraph) -> Result<Self, Error> {
        Self::new(pattern, data, Mode::exact(), None, Params::default())
    }

    pub fn label_radius(&self) -> usize {
        if self.mode.missing {
            self.params.propagation_radius.max(self.mode.missing_radius)
        } else {
            self.params.propagation_radius
        }
    }

    pub fn peered_pattern_count(&self) -> usize {
        self.peers.peered_pattern_nodes().count()
    }

    pub fn agents_per_wave(&self) -> usize {
        let peered = self.peered_pattern_count();
        if peered == 0 {
            return 0;
        }
        self.params.agents_per_wave.unwrap_or(10 * peered)
    }
}

//! Approximate labeled subgraph matching with stigmergic swarming agents.
//!
//! Agents loop between a pattern graph and a data graph: from a pattern
//! node they jump to a data node with the same label, walk one data edge,
//! jump back to a pattern neighbor of their start node and walk home. Every
//! closed loop certifies a matching edge pair and reinforces pheromone on
//! everything it touched. Evaporation removes what is not reinforced, so
//! after enough waves only the common subgraphs carry pheromone.
//!
//! ```
//! use assist::{GraphBuilder, GraphRole, MatchContext, run_until_converged, extract_matches};
//!
//! let pattern = GraphBuilder::new()
//!     .node("a", "A").node("b", "B").edge("a", "b")
//!     .build(GraphRole::Pattern).unwrap();
//! let data = GraphBuilder::new()
//!     .node("x", "A").node("y", "B").node("z", "C").edge("x", "y").edge("y", "z")
//!     .build(GraphRole::Data).unwrap();
//! let ctx = MatchContext::exact(pattern, data).unwrap();
//! let (state, report) = run_until_converged(&ctx, 7);
//! let result = extract_matches(&state, &ctx, &Default::default());
//! assert_eq!(result.pairs.len(), 2);
//! assert!(report.converged());
//! ```

pub mod context;
pub mod extensions;
pub mod extraction;
pub mod graph;
pub mod peering;
pub mod pheromone;
pub mod swarm;
pub mod testkit;

use thiserror::Error;

pub use context::MatchContext;
pub use extensions::{match_labels, LabelMatcher, MatchQuality, Mode, ModeError, Ontology, OntologyError};
pub use extraction::{extract_matches, validate_mapping, ExtractOptions, MatchResult, MappingReport};
pub use graph::{
    build_graph, load_graph, load_graph_file, GraphBuilder, GraphDocument, GraphError, GraphRole, GraphStats,
    Label, LabeledGraph, NodeId,
};
pub use peering::{build_label_index, peer_all, LabelIndex, PeerMap};
pub use pheromone::{CycleRecord, ParamError, Params, PheromoneState, Totals};
pub use swarm::{
    run_until_converged, run_until_converged_with, run_wave, weighted_choice, ConvergenceReport, Termination,
    WaveStats,
};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

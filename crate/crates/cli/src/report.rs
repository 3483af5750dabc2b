//! The JSON result document and the CSV trace rows.

use std::io::Write;

use assist::extraction::Subgraph;
use assist::{ConvergenceReport, LabeledGraph, MatchContext, MatchResult, Params, PheromoneState, Totals};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct PairDoc {
    pub pattern: String,
    pub data: String,
    pub score: f64,
}

#[derive(Debug, Serialize)]
pub struct SubgraphDoc {
    pub nodes: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

#[derive(Debug, Serialize)]
pub struct EdgeMatchDoc {
    pub pattern: [String; 2],
    pub data: [String; 2],
    pub score: f64,
}

#[derive(Debug, Serialize)]
pub struct ConvergenceDoc {
    pub waves: u64,
    pub terminated_by: assist::Termination,
    pub initial_totals: Totals,
    pub final_totals: Totals,
}

#[derive(Debug, Serialize)]
pub struct ResultDocument {
    pub mode: String,
    pub seed: u64,
    pub params: Params,
    pub convergence: ConvergenceDoc,
    pub pairs: Vec<PairDoc>,
    pub pattern_subgraph: SubgraphDoc,
    pub data_subgraph: SubgraphDoc,
    pub matched_edges: Vec<EdgeMatchDoc>,
    pub summary: assist::extraction::Summary,
    pub mapping: Vec<[String; 2]>,
    pub unpeered: Vec<String>,
}

fn id(g: &LabeledGraph, n: usize) -> String {
    g.id(n).to_string()
}

fn ends(g: &LabeledGraph, e: usize) -> [String; 2] {
    let edge = g.edge(e);
    [id(g, edge.source), id(g, edge.target)]
}

fn subgraph(g: &LabeledGraph, s: &Subgraph) -> SubgraphDoc {
    SubgraphDoc {
        nodes: s.nodes.iter().map(|&n| id(g, n)).collect(),
        edges: s.edges.iter().map(|&e| ends(g, e)).collect(),
    }
}

impl ResultDocument {
    pub fn new(ctx: &MatchContext, report: &ConvergenceReport, result: &MatchResult) -> Self {
        let (p, d) = (&ctx.pattern, &ctx.data);
        Self {
            mode: ctx.mode.to_string(),
            seed: report.seed,
            params: ctx.params.clone(),
            convergence: ConvergenceDoc {
                waves: report.waves,
                terminated_by: report.terminated_by,
                initial_totals: report.initial_totals,
                final_totals: report.final_totals,
            },
            pairs: result
                .pairs
                .iter()
                .map(|pair| PairDoc {
                    pattern: id(p, pair.pattern),
                    data: id(d, pair.data),
                    score: pair.score,
                })
                .collect(),
            pattern_subgraph: subgraph(p, &result.pattern_subgraph),
            data_subgraph: subgraph(d, &result.data_subgraph),
            matched_edges: result
                .matched_edges
                .iter()
                .map(|m| EdgeMatchDoc {
                    pattern: ends(p, m.pattern),
                    data: ends(d, m.data),
                    score: m.score,
                })
                .collect(),
            summary: result.summary,
            mapping: result
                .mapping
                .iter()
                .flatten()
                .map(|&(u, x)| [id(p, u), id(d, x)])
                .collect(),
            unpeered: ctx.peers.unpeered().into_iter().map(|u| id(p, u)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result document serializes") + "\n"
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub wave: u64,
    pub pattern_sum: f64,
    pub data_sum: f64,
    pub delta: f64,
    pub completed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeRow {
    pub wave: u64,
    pub graph: &'static str,
    pub node: String,
    pub label: String,
    pub node_field: f64,
    pub quorum: f64,
}

pub fn node_rows(ctx: &MatchContext, state: &PheromoneState) -> Vec<NodeRow> {
    let mut rows = Vec::new();
    for (graph, g, field) in [("pattern", &ctx.pattern, &state.pattern), ("data", &ctx.data, &state.data)] {
        for n in 0..g.node_count() {
            rows.push(NodeRow {
                wave: state.wave,
                graph,
                node: g.id(n).to_string(),
                label: g.label(n).to_string(),
                node_field: field.node[n],
                quorum: field.quorum[n],
            });
        }
    }
    rows
}

pub fn write_csv<W: Write, R: Serialize>(out: W, rows: &[R], header: &[&str]) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub const TRACE_HEADER: [&str; 6] = ["wave", "pattern_sum", "data_sum", "delta", "completed", "failed"];
pub const NODE_HEADER: [&str; 6] = ["wave", "graph", "node", "label", "node_field", "quorum"];

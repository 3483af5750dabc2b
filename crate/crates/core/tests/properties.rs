#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;

use assist::pheromone::{propagate_labels, quorum_field};
use assist::swarm::idle_wave;
use assist::testkit::{exact_mcs, generate_pair, random_fragment, Growth, Noise, PlantSpec};
use assist::{
    build_graph, extract_matches, load_graph, run_until_converged, run_until_converged_with, validate_mapping,
    weighted_choice, ExtractOptions, GraphDocument, GraphRole, LabeledGraph, MatchContext, Mode, Params,
    PheromoneState,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("L{i}")).collect()
}

/// Random undirected graph document with up to `max_nodes` nodes.
fn graph_doc(max_nodes: usize, alphabet: usize) -> impl Strategy<Value = GraphDocument> {
    (1..=max_nodes, any::<u64>(), 0..max_nodes).prop_map(move |(n, seed, chords)| random_fragment(n, chords, &labels(alphabet), seed))
}

fn planted(seed: u64, k: usize, extra: usize, alphabet: usize) -> (LabeledGraph, LabeledGraph) {
    let l = labels(alphabet);
    let g = Growth {
        extra_nodes: extra,
        extra_edges: extra / 2,
    };
    let pair = generate_pair(&PlantSpec {
        seed_subgraph: random_fragment(k, 1, &l, seed ^ 0x5eed),
        pattern_growth: g,
        data_growth: g,
        alphabet: l,
        noise: Noise::default(),
        seed,
    });
    (pair.pattern, pair.data)
}

/// All-pairs hop distances by Floyd-Warshall, ignoring direction.
fn distances(g: &LabeledGraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for e in g.edges() {
        d[e.source][e.target] = 1;
        d[e.target][e.source] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Quorum as a sum over non-backtracking walks of 1..=sweeps active edges
/// ending at each node, weighted by the start node's pheromone and δ^(len-1).
fn quorum_by_walks(g: &LabeledGraph, node: &[f64], edge: &[f64], delta: f64, sweeps: usize) -> Vec<f64> {
    let mut q = vec![0.0; g.node_count()];
    // (current node, edge arrived by, weight)
    let mut frontier: Vec<(usize, Option<usize>, f64)> = (0..g.node_count()).map(|n| (n, None, node[n])).collect();
    for len in 1..=sweeps {
        let mut next = Vec::new();
        for &(at, via, w) in &frontier {
            for inc in g.incident(at) {
                if edge[inc.edge] <= 0.0 || Some(inc.edge) == via {
                    continue;
                }
                let w2 = if len == 1 { w } else { w * delta };
                q[inc.neighbor] += w2;
                next.push((inc.neighbor, Some(inc.edge), w2));
            }
        }
        frontier = next;
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn document_round_trip(doc in graph_doc(12, 5)) {
        let g = build_graph(doc.clone(), GraphRole::Data).unwrap();
        let again = load_graph(&g.to_document().to_json(), GraphRole::Data).unwrap();
        prop_assert_eq!(g.to_document(), again.to_document());
        prop_assert_eq!(g.to_document(), doc);
    }

    #[test]
    fn undirected_adjacency_symmetric_and_degree_sum(doc in graph_doc(12, 5)) {
        let g = build_graph(doc, GraphRole::Data).unwrap();
        let degree_sum: usize = (0..g.node_count()).map(|n| g.degree(n)).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        for a in 0..g.node_count() {
            for inc in g.incident(a) {
                prop_assert!(g.incident(inc.neighbor).iter().any(|back| back.neighbor == a && back.edge == inc.edge));
            }
        }
    }

    #[test]
    fn label_vectors_match_distance_oracle(doc in graph_doc(10, 4), radius in 1usize..4) {
        let g = build_graph(doc, GraphRole::Data).unwrap();
        let delta = 0.5;
        let got = propagate_labels(&g, radius, delta);
        let d = distances(&g);
        for n in 0..g.node_count() {
            let mut want: BTreeMap<String, f64> = BTreeMap::new();
            for m in 0..g.node_count() {
                if d[n][m] <= radius {
                    *want.entry(g.label(m).to_string()).or_default() += delta.powi(d[n][m] as i32);
                }
            }
            prop_assert_eq!(got[n].len(), want.len());
            for (l, v) in &got[n] {
                prop_assert!((want[l.as_str()] - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quorum_matches_walk_oracle(doc in graph_doc(8, 3), fields in proptest::collection::vec(0.0f64..1.0, 32), sweeps in 1usize..5) {
        let g = build_graph(doc, GraphRole::Data).unwrap();
        let node: Vec<f64> = (0..g.node_count()).map(|i| fields[i]).collect();
        // roughly a third of the edges inactive
        let edge: Vec<f64> = (0..g.edge_count()).map(|i| if fields[16 + i % 16] < 0.33 { 0.0 } else { 1.0 }).collect();
        let got = quorum_field(&g, &node, &edge, 0.5, sweeps);
        let want = quorum_by_walks(&g, &node, &edge, 0.5, sweeps);
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-9, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn weighted_choice_never_picks_zero_weight(weights in proptest::collection::vec(prop_oneof![Just(0.0), 0.1f64..5.0], 1..8), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let any_positive = weights.iter().any(|&w| w > 0.0);
        for _ in 0..50 {
            let i = weighted_choice(&weights, &mut rng).unwrap();
            prop_assert!(i < weights.len());
            if any_positive {
                prop_assert!(weights[i] > 0.0);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn every_deposit_is_a_sound_cycle(seed in 0u64..1000, k in 2usize..5) {
        let (p, d) = planted(seed, k, 4, 6);
        let ctx = MatchContext::exact(p, d).unwrap();
        let mut bad = 0;
        run_until_converged_with(&ctx, seed, |_, _, cycles| {
            for c in cycles {
                if c.validate(&ctx).is_err() {
                    bad += 1;
                }
                // the walked data edge and pattern edge join label-equal endpoints
                let (de, pe) = (ctx.data.edge(c.data_path[0]), ctx.pattern.edge(c.pattern_path[0]));
                let mut dl = [ctx.data.label(de.source), ctx.data.label(de.target)];
                let mut pl = [ctx.pattern.label(pe.source), ctx.pattern.label(pe.target)];
                dl.sort();
                pl.sort();
                if dl != pl {
                    bad += 1;
                }
            }
        });
        prop_assert_eq!(bad, 0);
    }

    #[test]
    fn greedy_mapping_valid_and_below_oracle(seed in 0u64..1000, k in 2usize..6) {
        let (p, d) = planted(seed, k, 8 - k, 6);
        let ctx = MatchContext::exact(p, d).unwrap();
        let (state, _) = run_until_converged(&ctx, seed);
        let r = extract_matches(&state, &ctx, &ExtractOptions::default());
        let mapping = r.mapping.clone().unwrap();
        prop_assert!(validate_mapping(&ctx, &mapping).unwrap().valid);
        let oracle = exact_mcs(&ctx.pattern, &ctx.data, 12).unwrap();
        prop_assert!(oracle.size >= mapping.len());
        prop_assert!(validate_mapping(&ctx, &oracle.mapping).unwrap().valid);
    }

    #[test]
    fn raising_threshold_never_adds_nodes(seed in 0u64..1000, lo in 0.05f64..0.5, step in 0.0f64..0.5) {
        let (p, d) = planted(seed, 3, 6, 5);
        let ctx = MatchContext::exact(p, d).unwrap();
        let (state, _) = run_until_converged(&ctx, seed);
        let at = |t: f64| extract_matches(&state, &ctx, &ExtractOptions { greedy: false, threshold: Some(t) });
        let (a, b) = (at(lo), at(lo + step));
        prop_assert!(b.pattern_subgraph.nodes.iter().all(|n| a.pattern_subgraph.contains(*n)));
        prop_assert!(b.data_subgraph.nodes.iter().all(|n| a.data_subgraph.contains(*n)));
        if let Some(top) = a.pairs.first() {
            prop_assert!((top.score - 1.0).abs() < 1e-12);
        }
        prop_assert!(a.pairs.windows(2).all(|w| w[0].score >= w[1].score));
    }

    #[test]
    fn evaporation_law(seed in 0u64..1000, k in 1usize..60) {
        let (p, d) = planted(seed, 3, 5, 4);
        let ctx = MatchContext::exact(p, d).unwrap();
        let mut state = PheromoneState::init(&ctx);
        for _ in 0..10 {
            assist::run_wave(&ctx, &mut state, seed);
        }
        let start = state.totals();
        for _ in 0..k {
            idle_wave(&ctx, &mut state);
        }
        let expect = 0.9f64.powi(k as i32);
        let now = state.totals();
        prop_assert!((now.pattern - start.pattern * expect).abs() <= 1e-9 * start.pattern * expect);
        prop_assert!((now.data - start.data * expect).abs() <= 1e-9 * start.data * expect);
    }
}

#[test]
fn parallel_and_sequential_runs_agree() {
    for seed in 0..4 {
        let (p, d) = planted(seed, 4, 10, 5);
        let run = |parallel| {
            let params = Params {
                parallel,
                ..Params::default()
            };
            let ctx = MatchContext::new(p.clone(), d.clone(), Mode::exact(), None, params).unwrap();
            run_until_converged(&ctx, seed)
        };
        let (a, ra) = run(true);
        let (b, rb) = run(false);
        assert_eq!(a, b);
        assert_eq!(ra.history, rb.history);
    }
}

#[test]
fn different_seeds_explore_differently() {
    let (p, d) = planted(1, 4, 10, 5);
    let ctx = MatchContext::exact(p, d).unwrap();
    let (a, _) = run_until_converged(&ctx, 1);
    let (b, _) = run_until_converged(&ctx, 2);
    assert_ne!(a.peer, b.peer);
}

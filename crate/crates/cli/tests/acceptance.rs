//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::path::PathBuf;
use std::time::Instant;

use assist::extensions::precedes;
use assist::pheromone::{deposit_amount, quorum_field};
use assist::swarm::idle_wave;
use assist::testkit::{
    compare_to_oracle, connected_shapes, exact_mcs, generate_pair, planted_recall, random_fragment, triangle_seed,
    Growth, Noise, PlantSpec, DEFAULT_NODE_BUDGET,
};
use assist::{
    extract_matches, run_until_converged, run_until_converged_with, validate_mapping, ExtractOptions, LabeledGraph,
    MatchContext, Mode, NodeId, Params, PheromoneState, Termination,
};
use assist_cli::config::RunConfig;
use assist_cli::{execute, load_context};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(fixtures_dir())
        .expect("fixtures directory")
        .filter_map(|e| e.ok())
        .filter(|e| e.path().join("run.conf").is_file())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

fn fixture_config(name: &str) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.apply_file(&fixtures_dir().join(name).join("run.conf"))
        .expect("fixture config parses");
    cfg
}

fn letters(range: std::ops::RangeInclusive<char>) -> Vec<String> {
    range.map(String::from).collect()
}

fn planted_triangle() -> Outcome {
    let start = Instant::now();
    let (mut recovered, mut valid) = (0, 0);
    for seed in 0..20u64 {
        let growth = Growth {
            extra_nodes: 12,
            extra_edges: 0,
        };
        let pair = generate_pair(&PlantSpec {
            seed_subgraph: triangle_seed(),
            pattern_growth: growth,
            data_growth: growth,
            alphabet: letters('D'..='K'),
            noise: Noise::default(),
            seed,
        });
        let ctx = MatchContext::exact(pair.pattern, pair.data).expect("generated graphs are valid");
        let (state, _) = run_until_converged(&ctx, seed);
        let r = extract_matches(&state, &ctx, &ExtractOptions::default());
        let all_three = ["A", "B", "C"]
            .iter()
            .all(|id| ctx.pattern.index_of(&NodeId::new(*id)).is_some_and(|u| r.pattern_subgraph.contains(u)));
        recovered += all_three as usize;
        let mapping = r.mapping.unwrap_or_default();
        valid += validate_mapping(&ctx, &mapping).is_ok_and(|m| m.valid) as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        recovered >= 18 && valid == 20 && secs < 10.0,
        format!("triangle kept {recovered}/20, valid {valid}/20, {secs:.2}s"),
    )
}

fn oracle_quality() -> Outcome {
    let start = Instant::now();
    let labels = letters('A'..='Z');
    let (mut valid, mut good) = (0, 0);
    for seed in 0..20u64 {
        let k = 2 + (seed as usize % 4);
        let growth = Growth {
            extra_nodes: 10 - k,
            extra_edges: 2,
        };
        let pair = generate_pair(&PlantSpec {
            seed_subgraph: random_fragment(k, 1, &labels, seed + 1000),
            pattern_growth: growth,
            data_growth: growth,
            alphabet: labels.clone(),
            noise: Noise::default(),
            seed,
        });
        let ctx = MatchContext::exact(pair.pattern, pair.data).expect("generated graphs are valid");
        let (state, _) = run_until_converged(&ctx, seed);
        let r = extract_matches(&state, &ctx, &ExtractOptions::default());
        let oracle = exact_mcs(&ctx.pattern, &ctx.data, DEFAULT_NODE_BUDGET).expect("10 nodes fit the budget");
        let cmp = compare_to_oracle(&ctx, &r, &oracle, Some(&pair.planted));
        valid += cmp.valid as usize;
        good += (cmp.size_ratio >= 0.8) as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        valid == 20 && good >= 16 && secs < 60.0,
        format!("valid {valid}/20, ratio>=0.8 in {good}/20, {secs:.2}s"),
    )
}

fn peering_cost() -> Outcome {
    let p = 20;
    let alphabet: Vec<String> = (0..16).map(|i| format!("L{i}")).collect();
    let mut cells = Vec::new();
    for exp in [8u32, 10, 12, 14, 16] {
        let d = 1usize << exp;
        let pair = generate_pair(&PlantSpec {
            seed_subgraph: random_fragment(p, p / 4, &alphabet, exp as u64),
            pattern_growth: Growth::default(),
            data_growth: Growth {
                extra_nodes: d - p,
                extra_edges: (d - p) / 2,
            },
            alphabet: alphabet.clone(),
            noise: Noise::default(),
            seed: exp as u64,
        });
        let ctx = MatchContext::exact(pair.pattern, pair.data).expect("generated graphs are valid");
        let per_node = ctx.peers.comparisons() as f64 / p as f64;
        cells.push((d as f64, per_node));
    }
    // least squares through the origin on log2(d)
    let (sxy, sxx) = cells
        .iter()
        .fold((0.0, 0.0), |(sxy, sxx), &(d, c)| (sxy + d.log2() * c, sxx + d.log2() * d.log2()));
    let a = sxy / sxx;
    let slopes: Vec<f64> = cells
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0.log2() - w[0].0.log2()))
        .collect();
    let slopes_ok = slopes.iter().all(|s| (s - a).abs() <= 0.25 * a);
    let bound_ok = cells.iter().all(|&(d, c)| c <= 3.0 * (d + 1.0).log2());
    let shown: Vec<String> = cells.iter().map(|(d, c)| format!("{d}:{c:.2}")).collect();
    let slopes: Vec<String> = slopes.iter().map(|s| format!("{s:.2}")).collect();
    outcome(
        slopes_ok && bound_ok,
        format!("a={a:.3}, local slopes [{}], per node [{}]", slopes.join(" "), shown.join(" ")),
    )
}

fn termination() -> Outcome {
    let mut failures = Vec::new();
    let mut no_peer_waves = None;
    for name in fixture_names() {
        let mut cfg = fixture_config(&name);
        cfg.params.termination_epsilon = 1e-6;
        cfg.params.max_waves = 10_000;
        match execute(&cfg) {
            Ok(exec) => {
                if exec.report.terminated_by != Termination::Epsilon || exec.report.waves >= 10_000 {
                    failures.push(format!("{name}:{:?}", exec.report.terminated_by));
                }
                if name == "no-peer" {
                    no_peer_waves = Some(exec.report.waves);
                }
            }
            Err(e) => failures.push(format!("{name}:{e}")),
        }
    }
    outcome(
        failures.is_empty() && no_peer_waves == Some(1),
        format!(
            "{} fixtures, failures {failures:?}, no-peer halted at wave {no_peer_waves:?}",
            fixture_names().len()
        ),
    )
}

fn evaporation_law() -> Outcome {
    let ctx = load_context(&fixture_config("planted-triangle")).expect("planted-triangle loads");
    let mut state = PheromoneState::init(&ctx);
    let start = state.totals();
    let mut worst: f64 = 0.0;
    for k in 1..=100 {
        idle_wave(&ctx, &mut state);
        let expect = 0.9f64.powi(k);
        let now = state.totals();
        for (got, init) in [(now.pattern, start.pattern), (now.data, start.data)] {
            worst = worst.max((got - init * expect).abs() / (init * expect));
        }
    }
    outcome(worst <= 1e-9, format!("worst relative error {worst:.2e} over k=1..=100"))
}

fn deposit_ordering() -> Outcome {
    let (q, gamma) = (1.0, Params::default().imprecise_quality);
    let exact4 = deposit_amount(q, 1.0, 4);
    let exact6 = deposit_amount(q, 1.0, 6);
    let imprecise4 = deposit_amount(q, gamma, 4);
    let formula = exact4 == q / 4.0 && exact6 == q / 6.0 && imprecise4 == q * gamma / 4.0;
    let ordered = exact4 > exact6 && exact6 > imprecise4 * 4.0 / 6.0;

    let ctx = load_context(&fixture_config("ontology")).expect("ontology fixture loads");
    let mut log = Vec::new();
    run_until_converged_with(&ctx, 2, |_, _, c| log.extend_from_slice(c));
    let amounts = |pred: fn(f64) -> bool| -> Vec<(usize, f64)> {
        log.iter()
            .filter(|c| pred(c.quality))
            .map(|c| (c.length, c.amount(ctx.params.deposit_constant)))
            .collect()
    };
    let exact = amounts(|q| q == 1.0);
    let imprecise = amounts(|q| q < 1.0);
    // compare loops of equal length only
    let below = !imprecise.is_empty()
        && imprecise
            .iter()
            .all(|&(l, a)| exact.iter().filter(|e| e.0 == l).all(|&(_, b)| a < b));
    outcome(
        formula && ordered && below,
        format!(
            "L4 {exact4:.4} > L6 {exact6:.4} > L4q {:.4}; fixture {} exact / {} imprecise loops",
            imprecise4 * 4.0 / 6.0,
            exact.len(),
            imprecise.len()
        ),
    )
}

fn planted_edges(ctx: &MatchContext) -> Vec<usize> {
    let d = &ctx.data;
    let ix = |id: &str| d.index_of(&NodeId::new(id)).expect("fixture id");
    [("w", "x"), ("x", "y"), ("y", "z")]
        .iter()
        .map(|&(a, b)| d.edge_between(ix(a), ix(b)).expect("fixture edge"))
        .collect()
}

fn temporal_soundness() -> Outcome {
    let run = |name: &str| {
        let ctx = load_context(&fixture_config(name)).expect("temporal fixture loads");
        let mut log = Vec::new();
        let (state, _) = run_until_converged_with(&ctx, 3, |_, _, c| log.extend_from_slice(c));
        let violations = log
            .iter()
            .filter(|c| {
                !(precedes(&ctx.data, c.data_path[0], c.data_path[1])
                    && precedes(&ctx.pattern, c.pattern_path[1], c.pattern_path[0]))
            })
            .count();
        let fields: Vec<f64> = planted_edges(&ctx).iter().map(|&e| state.data.edge[e]).collect();
        (fields, log.len(), violations)
    };
    let (agree, agree_loops, agree_bad) = run("temporal");
    let (reversed, reversed_loops, reversed_bad) = run("temporal-reversed");
    let pass = agree.iter().all(|&f| f > 0.0) && agree_bad == 0 && reversed.iter().all(|&f| f == 0.0) && reversed_bad == 0;
    outcome(
        pass,
        format!(
            "agreeing: {agree_loops} loops, min path field {:.3e}; reversed: {reversed_loops} loops, {reversed_bad} order violations, path fields {reversed:?}",
            agree.iter().copied().fold(f64::INFINITY, f64::min)
        ),
    )
}

fn missing_robustness() -> Outcome {
    let cfg = fixture_config("missing");
    let surviving: Vec<(NodeId, NodeId)> = ["a", "c", "d", "e"].iter().map(|id| (NodeId::new(*id), NodeId::new(*id))).collect();
    let recall = |mode: Mode| -> Vec<f64> {
        let mut cfg = cfg.clone();
        cfg.mode = mode;
        let ctx = load_context(&cfg).expect("missing fixture loads");
        (0..10u64)
            .map(|seed| {
                let (state, _) = run_until_converged(&ctx, seed);
                let r = extract_matches(&state, &ctx, &ExtractOptions::default());
                planted_recall(&ctx, &r.mapping.unwrap_or_default(), &surviving)
            })
            .collect()
    };
    let bridged = recall(Mode::missing());
    let base = recall(Mode::exact());
    let hits = bridged.iter().filter(|&&r| r >= 2.0 / 3.0).count();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    outcome(
        hits >= 8 && mean(&base) < mean(&bridged),
        format!(
            "missing mode recall>=2/3 in {hits}/10, mean {:.3}; base mean {:.3}",
            mean(&bridged),
            mean(&base)
        ),
    )
}

fn determinism() -> Outcome {
    let mut differing = Vec::new();
    let names = fixture_names();
    for name in &names {
        let conf = fixtures_dir().join(name).join("run.conf");
        let once = || {
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let args = ["assist", "run", "--config", conf.to_str().expect("utf-8 path")];
            let code = assist_cli::run(args, &mut out, &mut err);
            (code, out)
        };
        let (a, b) = (once(), once());
        if a != b || a.1.is_empty() {
            differing.push(name.clone());
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} fixtures run twice, differing {differing:?}", names.len()),
    )
}

fn uniform_quorum(g: &LabeledGraph) -> Vec<f64> {
    let p = Params::default();
    quorum_field(
        g,
        &vec![1.0; g.node_count()],
        &vec![1.0; g.edge_count()],
        p.propagation_decay,
        p.quorum_sweeps,
    )
}

fn quorum_monotone() -> Outcome {
    let shapes = connected_shapes(5);
    let (mut pairs, mut drops) = (0, 0);
    for shape in &shapes {
        let before = uniform_quorum(&shape.graph());
        for bigger in shape.enlargements(5) {
            let after = uniform_quorum(&bigger.graph());
            pairs += 1;
            drops += (0..shape.nodes).filter(|&n| after[n] + 1e-12 < before[n]).count();
        }
    }
    outcome(
        drops == 0,
        format!("{} shapes, {pairs} enlargements, {drops} decreases", shapes.len()),
    )
}

type Check = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("planted triangle recovery", planted_triangle),
        ("oracle quality", oracle_quality),
        ("peering comparisons", peering_cost),
        ("termination", termination),
        ("evaporation law", evaporation_law),
        ("deposit ordering", deposit_ordering),
        ("temporal soundness", temporal_soundness),
        ("missing-node robustness", missing_robustness),
        ("determinism", determinism),
        ("quorum monotonicity", quorum_monotone),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!("criterion {}: {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as usize;
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

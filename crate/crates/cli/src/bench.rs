//! Size sweeps over generated planted pairs.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use assist::testkit::{generate_pair, planted_recall, random_fragment, Growth, Noise, PlantSpec};
use assist::{extract_matches, run_until_converged, ExtractOptions, MatchContext, Mode, Params};
use clap::Args;
use serde::Serialize;

use crate::{report, CliError, EXIT_MATCH};

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Data graph sizes.
    #[arg(long = "d", value_delimiter = ',', num_args = 0.., default_values_t = [256, 1024, 4096])]
    pub data_sizes: Vec<usize>,
    /// Pattern graph sizes.
    #[arg(long = "p", value_delimiter = ',', num_args = 0.., default_values_t = [20])]
    pub pattern_sizes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Distinct labels in generated graphs.
    #[arg(long, default_value_t = 16)]
    pub labels: usize,
    /// CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub d: usize,
    pub p: usize,
    pub rep: usize,
    pub seed: u64,
    pub comparisons: u64,
    pub comparisons_per_node: f64,
    pub waves: u64,
    pub terminated_by: assist::Termination,
    pub wall_ms: f64,
    pub recall: f64,
}

pub const BENCH_HEADER: [&str; 10] = [
    "d",
    "p",
    "rep",
    "seed",
    "comparisons",
    "comparisons_per_node",
    "waves",
    "terminated_by",
    "wall_ms",
    "recall",
];

/// One cell: a `p`-node fragment planted in a `d`-node data graph.
pub fn bench_cell(d: usize, p: usize, labels: usize, seed: u64, parallel: bool) -> Result<BenchRow, CliError> {
    if d == 0 || p == 0 || labels == 0 {
        return Err(CliError::InvalidValue {
            key: "sweep".into(),
            value: format!("d={d} p={p} labels={labels}"),
        });
    }
    let alphabet: Vec<String> = (0..labels).map(|i| format!("L{i}")).collect();
    let p = p.min(d);
    let pair = generate_pair(&PlantSpec {
        seed_subgraph: random_fragment(p, p / 4, &alphabet, seed),
        pattern_growth: Growth::default(),
        data_growth: Growth {
            extra_nodes: d - p,
            extra_edges: (d - p) / 2,
        },
        alphabet,
        noise: Noise::default(),
        seed,
    });
    let params = Params {
        parallel,
        ..Params::default()
    };
    let start = Instant::now();
    let ctx = MatchContext::new(pair.pattern, pair.data, Mode::exact(), None, params)?;
    let (state, report) = run_until_converged(&ctx, seed);
    let result = extract_matches(&state, &ctx, &ExtractOptions::default());
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let mapping = result.mapping.unwrap_or_default();
    Ok(BenchRow {
        d,
        p,
        rep: 0,
        seed,
        comparisons: ctx.peers.comparisons(),
        comparisons_per_node: ctx.peers.comparisons() as f64 / p as f64,
        waves: report.waves,
        terminated_by: report.terminated_by,
        wall_ms,
        recall: planted_recall(&ctx, &mapping, &pair.planted),
    })
}

pub fn cmd_bench(args: &BenchArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let mut rows = Vec::new();
    for &d in &args.data_sizes {
        for &p in &args.pattern_sizes {
            for rep in 0..args.reps {
                let seed = args.seed.wrapping_add(rep as u64);
                let mut row = bench_cell(d, p, args.labels, seed, !args.sequential)?;
                row.rep = rep;
                rows.push(row);
            }
        }
    }
    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            report::write_csv(file, &rows, &BENCH_HEADER)?;
        }
        None => report::write_csv(stdout, &rows, &BENCH_HEADER)?,
    }
    Ok(EXIT_MATCH)
}

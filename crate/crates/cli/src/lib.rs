//! Command-line front end: `run`, `trace` and `bench`.

pub mod bench;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use assist::{
    extract_matches, load_graph_file, run_until_converged_with, ConvergenceReport, ExtractOptions, GraphRole,
    MatchContext, MatchResult, Ontology, PheromoneState,
};
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{RunConfig, TraceLevel};
use report::{NodeRow, ResultDocument, TraceRow};

pub const EXIT_MATCH: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_EMPTY: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Graph {
        path: PathBuf,
        source: assist::GraphError,
    },
    #[error("{path}: {source}")]
    Ontology {
        path: PathBuf,
        source: assist::OntologyError,
    },
    #[error(transparent)]
    Core(#[from] assist::Error),
    #[error(transparent)]
    Mode(#[from] assist::ModeError),
    #[error("config line {line}: expected `key = value`, found {text:?}")]
    ConfigSyntax { line: usize, text: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}")]
    InvalidValue { key: String, value: String },
    #[error("missing required setting {0}")]
    Missing(&'static str),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("writing output: {0}")]
    Write(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "assist", version, about = "Approximate labeled subgraph matching with swarming agents")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Match a pattern graph against a data graph and write the result document.
    Run(RunArgs),
    /// Run a match and write the per-wave field totals as CSV.
    Trace(RunArgs),
    /// Sweep generated graph sizes and tabulate cost and recall.
    Bench(bench::BenchArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// `parent > child` subsumption file for imprecise mode.
    #[arg(long)]
    pub ontology: Option<PathBuf>,
    /// Comma list of imprecise, temporal, missing.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub tau0: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub agents: Option<usize>,
    #[arg(long)]
    pub max_waves: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Falls back to the config file, then ASSIST_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Result document path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Trace CSV path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub trace_level: Option<TraceLevel>,
    /// Waves between per-node trace samples.
    #[arg(long)]
    pub sample_every: Option<usize>,
    /// Run agents on one thread.
    #[arg(long)]
    pub sequential: bool,
}

impl RunArgs {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = RunConfig::default();
        if let Some(path) = &self.config {
            c.apply_file(path)?;
        }
        let here = Path::new("");
        let mut set = |key: &str, value: Option<String>| match value {
            Some(v) => c.set(key, &v, here),
            None => Ok(()),
        };
        set("pattern", self.pattern.as_ref().map(|p| p.display().to_string()))?;
        set("data", self.data.as_ref().map(|p| p.display().to_string()))?;
        set("ontology", self.ontology.as_ref().map(|p| p.display().to_string()))?;
        set("out", self.out.as_ref().map(|p| p.display().to_string()))?;
        set("trace", self.trace.as_ref().map(|p| p.display().to_string()))?;
        set("mode", self.mode.clone())?;
        set("rho", self.rho.map(|v| v.to_string()))?;
        set("q", self.q.map(|v| v.to_string()))?;
        set("tau0", self.tau0.map(|v| v.to_string()))?;
        set("delta", self.delta.map(|v| v.to_string()))?;
        set("radius", self.radius.map(|v| v.to_string()))?;
        set("epsilon", self.epsilon.map(|v| v.to_string()))?;
        set("agents", self.agents.map(|v| v.to_string()))?;
        set("max_waves", self.max_waves.map(|v| v.to_string()))?;
        set("gamma", self.gamma.map(|v| v.to_string()))?;
        set("theta", self.theta.map(|v| v.to_string()))?;
        set("seed", self.seed.map(|v| v.to_string()))?;
        set("trace_level", self.trace_level.map(|v| v.to_string()))?;
        set("sample_every", self.sample_every.map(|v| v.to_string()))?;
        if self.sequential {
            c.params.parallel = false;
        }
        Ok(c)
    }
}

/// Everything produced by one configured run.
pub struct Execution {
    pub ctx: MatchContext,
    pub state: PheromoneState,
    pub report: ConvergenceReport,
    pub result: MatchResult,
    pub trace: Vec<TraceRow>,
    pub nodes: Vec<NodeRow>,
}

impl Execution {
    pub fn document(&self) -> ResultDocument {
        ResultDocument::new(&self.ctx, &self.report, &self.result)
    }
}

pub fn load_context(cfg: &RunConfig) -> Result<MatchContext, CliError> {
    let load = |path: &Option<PathBuf>, name, role| {
        let path = path.as_ref().ok_or(CliError::Missing(name))?;
        load_graph_file(path, role).map_err(|source| CliError::Graph {
            path: path.clone(),
            source,
        })
    };
    let pattern = load(&cfg.pattern, "pattern", GraphRole::Pattern)?;
    let data = load(&cfg.data, "data", GraphRole::Data)?;
    let ontology = match &cfg.ontology {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Some(Ontology::parse(&text).map_err(|source| CliError::Ontology {
                path: path.clone(),
                source,
            })?)
        }
        None => None,
    };
    Ok(MatchContext::new(pattern, data, cfg.effective_mode(), ontology, cfg.params.clone())?)
}

/// Load, run to convergence and extract, collecting trace rows on the way.
pub fn execute(cfg: &RunConfig) -> Result<Execution, CliError> {
    let ctx = load_context(cfg)?;
    let seed = cfg.resolved_seed()?;
    let per_node = cfg.trace_level == TraceLevel::PerNode;
    let every = cfg.sample_every.max(1) as u64;
    let mut trace = Vec::new();
    let mut nodes = Vec::new();
    let (state, report) = run_until_converged_with(&ctx, seed, |stats, state, _| {
        trace.push(TraceRow {
            wave: stats.wave,
            pattern_sum: stats.totals.pattern,
            data_sum: stats.totals.data,
            delta: stats.delta,
            completed: stats.completed,
            failed: stats.failed,
        });
        if per_node && stats.wave % every == 0 {
            nodes.extend(report::node_rows(&ctx, state));
        }
    });
    if per_node && state.wave % every != 0 {
        nodes.extend(report::node_rows(&ctx, &state));
    }
    if cfg.trace_level == TraceLevel::Summary {
        trace = trace.pop().into_iter().collect();
    }
    let result = extract_matches(&state, &ctx, &ExtractOptions::default());
    Ok(Execution {
        ctx,
        state,
        report,
        result,
        trace,
        nodes,
    })
}

fn create(path: &Path) -> Result<std::fs::File, CliError> {
    std::fs::File::create(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// `trace.csv` becomes `trace.nodes.csv`.
pub fn node_trace_path(trace: &Path) -> PathBuf {
    let stem = trace.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    trace.with_file_name(format!("{stem}.nodes.csv"))
}

fn write_trace(exec: &Execution, path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(path) => {
            report::write_csv(create(path)?, &exec.trace, &report::TRACE_HEADER)?;
            if !exec.nodes.is_empty() {
                report::write_csv(create(&node_trace_path(path))?, &exec.nodes, &report::NODE_HEADER)?;
            }
        }
        None => report::write_csv(&mut *stdout, &exec.trace, &report::TRACE_HEADER)?,
    }
    Ok(())
}

fn write_document(exec: &Execution, path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let json = exec.document().to_json();
    match path {
        Some(path) => create(path)?.write_all(json.as_bytes())?,
        None => stdout.write_all(json.as_bytes())?,
    }
    Ok(())
}

fn check_trace_target(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.trace_level == TraceLevel::PerNode && cfg.trace.is_none() {
        return Err(CliError::InvalidValue {
            key: "trace_level".into(),
            value: "per-node needs a --trace path".into(),
        });
    }
    Ok(())
}

/// Exit 0 on a non-empty match, 3 on an empty one.
pub fn cmd_run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    if cfg.trace.is_some() {
        check_trace_target(cfg)?;
    }
    let exec = execute(cfg)?;
    write_document(&exec, cfg.out.as_deref(), stdout)?;
    if let Some(path) = &cfg.trace {
        write_trace(&exec, Some(path), stdout)?;
    }
    Ok(if exec.result.is_empty() { EXIT_EMPTY } else { EXIT_MATCH })
}

/// Trace CSV to `--trace` or stdout; the result document only with `--out`.
pub fn cmd_trace(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    check_trace_target(cfg)?;
    let exec = execute(cfg)?;
    write_trace(&exec, cfg.trace.as_deref(), stdout)?;
    if let Some(out) = &cfg.out {
        write_document(&exec, Some(out), stdout)?;
    }
    Ok(EXIT_MATCH)
}

/// Parse arguments and dispatch. Never returns a code other than 0, 1 or 3.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_MATCH };
        }
    };
    let outcome = match &cli.command {
        Command::Run(a) => a.resolve().and_then(|c| cmd_run(&c, stdout)),
        Command::Trace(a) => a.resolve().and_then(|c| cmd_trace(&c, stdout)),
        Command::Bench(a) => bench::cmd_bench(a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}

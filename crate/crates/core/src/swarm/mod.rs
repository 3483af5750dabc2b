//! Synchronous waves of agents and the run loop.
//!
//! Agents in a wave read one frozen snapshot of the fields, so they are
//! independent and run in parallel when the `parallel` feature is on. Their
//! deposits are folded in agent order at the barrier, which keeps results
//! identical between the parallel and sequential paths.

mod agent;
mod exec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::MatchContext;
use crate::pheromone::{CycleRecord, PheromoneState, Totals};

pub use agent::{agent_cycle, basic_cycle, orientation_compatible, weighted_choice, AgentFailure, EmptyChoice, Snapshot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveStats {
    /// 1-based index of the wave just finished.
    pub wave: u64,
    pub launched: usize,
    pub completed: usize,
    pub failed: usize,
    pub totals: Totals,
    /// Largest change of either graph's total over this wave.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Epsilon,
    MaxWaves,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub waves: u64,
    pub terminated_by: Termination,
    pub initial_totals: Totals,
    pub final_totals: Totals,
    pub seed: u64,
    pub history: Vec<WaveStats>,
}

impl ConvergenceReport {
    pub fn converged(&self) -> bool {
        self.terminated_by == Termination::Epsilon
    }
}

/// Random stream of one agent: the run seed, split by wave and agent index.
pub fn agent_rng(seed: u64, wave: u64, agent: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((wave << 32) | agent as u64);
    rng
}

fn launch(snap: &Snapshot<'_>, starts: &[usize], weights: &[f64], seed: u64, agent: usize) -> Result<CycleRecord, AgentFailure> {
    let mut rng = agent_rng(seed, snap.state.wave, agent);
    let pick = weighted_choice(weights, &mut rng).map_err(|_| AgentFailure::Unpeered)?;
    agent_cycle(snap, starts[pick], &mut rng)
}

/// One wave: launch agents on the current fields, fold their deposits in
/// agent order, evaporate, then recompute quorum pheromone.
///
/// Returns the wave's statistics and every completed cycle, in agent order.
pub fn run_wave(ctx: &MatchContext, state: &mut PheromoneState, seed: u64) -> (WaveStats, Vec<CycleRecord>) {
    let before = state.totals();
    let agents = ctx.agents_per_wave();
    let results = {
        let snap = Snapshot::new(ctx, state);
        let starts: Vec<usize> = ctx.peers.peered_pattern_nodes().collect();
        let weights: Vec<f64> = starts
            .iter()
            .map(|&u| {
                let quorum = if ctx.params.quorum_modulation { state.pattern.quorum[u] } else { 0.0 };
                snap.floor + state.pattern.node[u] + quorum
            })
            .collect();
        exec::map_agents(agents, ctx.params.parallel, |i| launch(&snap, &starts, &weights, seed, i))
    };

    let scale = ctx.params.anneal(state.wave);
    let mut cycles = Vec::new();
    for cycle in results.into_iter().flatten() {
        state
            .deposit_scaled(&cycle, ctx, scale)
            .expect("agents only emit valid cycles");
        cycles.push(cycle);
    }
    let stats = finish_wave(ctx, state, before, agents, cycles.len());
    (stats, cycles)
}

/// A wave with no agents: evaporation and quorum only.
pub fn idle_wave(ctx: &MatchContext, state: &mut PheromoneState) -> WaveStats {
    let before = state.totals();
    finish_wave(ctx, state, before, 0, 0)
}

fn finish_wave(ctx: &MatchContext, state: &mut PheromoneState, before: Totals, launched: usize, completed: usize) -> WaveStats {
    state.evaporate(ctx.params.evaporation_rate);
    state.propagate_quorum(ctx);
    state.wave += 1;
    let totals = state.totals();
    WaveStats {
        wave: state.wave,
        launched,
        completed,
        failed: launched - completed,
        totals,
        delta: totals.delta(&before),
    }
}

/// Run waves until both totals change by less than ε in one wave, or the
/// wave budget is spent.
pub fn run_until_converged(ctx: &MatchContext, seed: u64) -> (PheromoneState, ConvergenceReport) {
    run_until_converged_with(ctx, seed, |_, _, _| {})
}

/// As [`run_until_converged`], calling `observe` after every wave.
pub fn run_until_converged_with<F>(ctx: &MatchContext, seed: u64, mut observe: F) -> (PheromoneState, ConvergenceReport)
where
    F: FnMut(&WaveStats, &PheromoneState, &[CycleRecord]),
{
    let mut state = PheromoneState::init(ctx);
    let initial_totals = state.totals();
    let mut history = Vec::new();
    let mut terminated_by = Termination::MaxWaves;
    while (state.wave as usize) < ctx.params.max_waves {
        let (stats, cycles) = run_wave(ctx, &mut state, seed);
        observe(&stats, &state, &cycles);
        let done = stats.delta < ctx.params.termination_epsilon;
        history.push(stats);
        if done {
            terminated_by = Termination::Epsilon;
            break;
        }
    }
    let report = ConvergenceReport {
        waves: state.wave,
        terminated_by,
        initial_totals,
        final_totals: state.totals(),
        seed,
        history,
    };
    (state, report)
}

//! Run configuration: defaults, then a flat `key = value` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use assist::{Mode, Params};
use clap::ValueEnum;

use crate::CliError;

/// Environment variable consulted for the seed when no flag or config sets it.
pub const SEED_ENV: &str = "ASSIST_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum TraceLevel {
    /// Only the final wave.
    Summary,
    /// One row per wave.
    #[default]
    PerWave,
    /// Per-wave rows plus sampled per-node rows in a sibling file.
    PerNode,
}

impl FromStr for TraceLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

impl fmt::Display for TraceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pattern: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub ontology: Option<PathBuf>,
    pub mode: Mode,
    pub params: Params,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub trace_level: TraceLevel,
    /// Per-node trace rows are written every this many waves.
    pub sample_every: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            pattern: None,
            data: None,
            ontology: None,
            mode: Mode::default(),
            params: Params::default(),
            seed: None,
            out: None,
            trace: None,
            trace_level: TraceLevel::default(),
            sample_every: 10,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| CliError::InvalidValue {
        key: key.to_owned(),
        value: value.to_owned(),
    })
}

impl RunConfig {
    /// Apply one setting. Keys are `Params` field names, their flag aliases,
    /// or run settings. Relative paths resolve against `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<(), CliError> {
        let path = || base.join(value);
        let p = &mut self.params;
        match key {
            "pattern" => self.pattern = Some(path()),
            "data" => self.data = Some(path()),
            "ontology" => self.ontology = Some(path()),
            "out" => self.out = Some(path()),
            "trace" => self.trace = Some(path()),
            "mode" => {
                let radius = self.mode.missing_radius;
                self.mode = value.parse()?;
                self.mode.missing_radius = radius;
            }
            "missing_radius" => self.mode.missing_radius = parse(key, value)?,
            "seed" => self.seed = Some(parse(key, value)?),
            "trace_level" => self.trace_level = parse(key, value)?,
            "sample_every" => self.sample_every = parse(key, value)?,
            "evaporation_rate" | "rho" => p.evaporation_rate = parse(key, value)?,
            "deposit_constant" | "q" => p.deposit_constant = parse(key, value)?,
            "initial_node_pheromone" | "tau0" => p.initial_node_pheromone = parse(key, value)?,
            "propagation_decay" | "delta" => p.propagation_decay = parse(key, value)?,
            "propagation_radius" | "radius" => p.propagation_radius = parse(key, value)?,
            "termination_epsilon" | "epsilon" => p.termination_epsilon = parse(key, value)?,
            "agents_per_wave" | "agents" => p.agents_per_wave = Some(parse(key, value)?),
            "max_waves" => p.max_waves = parse(key, value)?,
            "imprecise_quality" | "gamma" => p.imprecise_quality = parse(key, value)?,
            "extraction_threshold" | "theta" => p.extraction_threshold = parse(key, value)?,
            "quorum_sweeps" => p.quorum_sweeps = parse(key, value)?,
            "quorum_modulation" => p.quorum_modulation = parse(key, value)?,
            "cooling" => p.cooling = parse(key, value)?,
            "parallel" => p.parallel = parse(key, value)?,
            other => return Err(CliError::UnknownKey(other.to_owned())),
        }
        Ok(())
    }

    /// Apply every `key = value` line of a config document.
    pub fn apply_text(&mut self, text: &str, base: &Path) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::ConfigSyntax {
                line: n + 1,
                text: raw.to_owned(),
            })?;
            self.set(key.trim(), value.trim(), base)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        self.apply_text(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Seed from config or flags, else `ASSIST_SEED`, else 0.
    pub fn resolved_seed(&self) -> Result<u64, CliError> {
        if let Some(seed) = self.seed {
            return Ok(seed);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => parse(SEED_ENV, v.trim()),
            Err(_) => Ok(0),
        }
    }

    /// Missing mode senses at least as far as the propagation radius.
    pub fn effective_mode(&self) -> Mode {
        let mut mode = self.mode;
        if mode.missing {
            mode.missing_radius = mode.missing_radius.max(self.params.propagation_radius);
        }
        mode
    }
}

//! Imprecise, temporal and missing-node matching.

mod missing;
mod ontology;
mod temporal;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Label, LabeledGraph};

pub use missing::{bridged_cycle, multi_hop_sense, SensedNode};
pub use ontology::{Ontology, OntologyError};
pub use temporal::{precedes, temporal_cycle};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModeError {
    #[error("unknown mode flag {0:?} (expected imprecise, temporal or missing)")]
    UnknownFlag(String),
    #[error("temporal mode needs timestamped or directed {0} graph")]
    NotTemporal(&'static str),
    #[error("missing radius must be at least 2, got {0}")]
    Radius(usize),
    #[error("temporal and missing modes cannot be combined")]
    TemporalWithMissing,
    #[error("imprecise mode needs an ontology")]
    NoOntology,
}

/// Strength of a correspondence: 1 exact, γ subsumed, γ^h bridged, 0 none.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatchQuality(f64);

impl MatchQuality {
    pub const EXACT: Self = Self(1.0);
    pub const NONE: Self = Self(0.0);

    /// Panics if `value` is outside `[0, 1]`.
    pub fn new(value: f64) -> Self {
        assert!((0.0..=1.0).contains(&value), "match quality {value} outside [0, 1]");
        Self(value)
    }

    /// Quality of an `hops`-edge bridge standing in for a single edge.
    pub fn bridged(gamma: f64, hops: usize) -> Self {
        if hops <= 1 {
            Self::EXACT
        } else {
            Self::new(gamma.powi(hops as i32))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_match(self) -> bool {
        self.0 > 0.0
    }

    pub fn is_exact(self) -> bool {
        self.0 == 1.0
    }
}

impl std::ops::Mul for MatchQuality {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

/// Which extensions are active for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mode {
    pub imprecise: bool,
    pub temporal: bool,
    pub missing: bool,
    pub missing_radius: usize,
}

impl Default for Mode {
    fn default() -> Self {
        Self {
            imprecise: false,
            temporal: false,
            missing: false,
            missing_radius: 2,
        }
    }
}

impl Mode {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn imprecise() -> Self {
        Self {
            imprecise: true,
            ..Self::default()
        }
    }

    pub fn temporal() -> Self {
        Self {
            temporal: true,
            ..Self::default()
        }
    }

    pub fn missing() -> Self {
        Self {
            missing: true,
            ..Self::default()
        }
    }

    pub fn validate(&self, pattern: &LabeledGraph, data: &LabeledGraph) -> Result<(), ModeError> {
        if self.missing && self.missing_radius < 2 {
            return Err(ModeError::Radius(self.missing_radius));
        }
        if self.temporal && self.missing {
            return Err(ModeError::TemporalWithMissing);
        }
        if self.temporal {
            for (g, name) in [(pattern, "pattern"), (data, "data")] {
                if !(g.is_temporal() || g.has_directed_edges()) {
                    return Err(ModeError::NotTemporal(name));
                }
            }
        }
        Ok(())
    }
}

impl FromStr for Mode {
    type Err = ModeError;

    /// Comma list of `imprecise`, `temporal`, `missing`; empty or `exact` is the base mode.
    fn from_str(s: &str) -> Result<Self, ModeError> {
        let mut mode = Mode::default();
        for flag in s.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            match flag {
                "imprecise" => mode.imprecise = true,
                "temporal" => mode.temporal = true,
                "missing" => mode.missing = true,
                "exact" => {}
                other => return Err(ModeError::UnknownFlag(other.to_owned())),
            }
        }
        Ok(mode)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flags: Vec<&str> = [
            (self.imprecise, "imprecise"),
            (self.temporal, "temporal"),
            (self.missing, "missing"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect();
        if flags.is_empty() {
            f.write_str("exact")
        } else {
            f.write_str(&flags.join(","))
        }
    }
}

/// Compare two labels, consulting the ontology on mismatch.
pub fn match_labels(a: &Label, b: &Label, ontology: Option<&Ontology>, gamma: f64) -> MatchQuality {
    if a == b {
        return MatchQuality::EXACT;
    }
    match ontology {
        Some(o) if o.subsumes(a, b) || o.subsumes(b, a) => MatchQuality::new(gamma),
        _ => MatchQuality::NONE,
    }
}

/// Label comparison policy for one run.
#[derive(Debug, Clone, Default)]
pub struct LabelMatcher {
    ontology: Option<Ontology>,
    gamma: f64,
}

impl LabelMatcher {
    pub fn exact() -> Self {
        Self {
            ontology: None,
            gamma: 0.5,
        }
    }

    pub fn with_ontology(ontology: Ontology, gamma: f64) -> Self {
        Self {
            ontology: Some(ontology),
            gamma,
        }
    }

    pub fn ontology(&self) -> Option<&Ontology> {
        self.ontology.as_ref()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn quality(&self, a: &Label, b: &Label) -> MatchQuality {
        match_labels(a, b, self.ontology.as_ref(), self.gamma)
    }
}

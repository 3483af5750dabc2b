//! Label subsumption ontology for imprecise matching.
//!
//! Documents are plain text, one `parent > child` pair per line. Blank lines
//! and `#` comments are ignored.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::Label;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OntologyError {
    #[error("line {line}: expected `parent > child`, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("subsumption cycle through {0:?}")]
    Cycle(String),
}

/// A DAG of `parent ⊒ child` relations with a cached transitive closure.
#[derive(Debug, Clone, Default)]
pub struct Ontology {
    children: BTreeMap<Label, BTreeSet<Label>>,
    // label -> every label it subsumes, excluding itself
    descendants: BTreeMap<Label, BTreeSet<Label>>,
    ancestors: BTreeMap<Label, BTreeSet<Label>>,
}

impl Ontology {
    pub fn parse(text: &str) -> Result<Self, OntologyError> {
        let mut pairs = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = || OntologyError::Syntax {
                line: n + 1,
                text: raw.to_owned(),
            };
            let (parent, child) = line.split_once('>').ok_or_else(syntax)?;
            let (parent, child) = (parent.trim(), child.trim());
            if parent.is_empty() || child.is_empty() || child.contains('>') {
                return Err(syntax());
            }
            pairs.push((Label::from(parent), Label::from(child)));
        }
        Self::from_pairs(pairs)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Label, Label)>) -> Result<Self, OntologyError> {
        let mut children: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
        for (parent, child) in pairs {
            if parent == child {
                return Err(OntologyError::Cycle(parent.to_string()));
            }
            children.entry(parent).or_default().insert(child);
        }
        detect_cycle(&children)?;

        let mut descendants = BTreeMap::new();
        for root in children.keys() {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<&Label> = children[root].iter().collect();
            while let Some(l) = stack.pop() {
                if seen.insert(l.clone()) {
                    if let Some(next) = children.get(l) {
                        stack.extend(next.iter());
                    }
                }
            }
            descendants.insert(root.clone(), seen);
        }
        let mut ancestors: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
        for (parent, below) in &descendants {
            for d in below {
                ancestors.entry(d.clone()).or_default().insert(parent.clone());
            }
        }
        Ok(Self {
            children,
            descendants,
            ancestors,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn children(&self, parent: &Label) -> impl Iterator<Item = &Label> {
        self.children.get(parent).into_iter().flatten()
    }

    /// Reflexive, transitive subsumption: `general ⊒ specific`.
    pub fn subsumes(&self, general: &Label, specific: &Label) -> bool {
        general == specific
            || self
                .descendants
                .get(general)
                .is_some_and(|d| d.contains(specific))
    }

    /// Labels comparable with `label` in either direction, excluding itself.
    pub fn related(&self, label: &Label) -> impl Iterator<Item = &Label> {
        let down = self.descendants.get(label).into_iter().flatten();
        let up = self.ancestors.get(label).into_iter().flatten();
        down.chain(up)
    }
}

fn detect_cycle(children: &BTreeMap<Label, BTreeSet<Label>>) -> Result<(), OntologyError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let mut marks: BTreeMap<&Label, Mark> = BTreeMap::new();
    for root in children.keys() {
        if marks.contains_key(root) {
            continue;
        }
        // iterative DFS: (node, next child position)
        let mut stack: Vec<(&Label, Vec<&Label>)> = vec![(root, children[root].iter().collect())];
        marks.insert(root, Mark::Active);
        while let Some((node, pending)) = stack.last_mut() {
            match pending.pop() {
                Some(next) => match marks.get(next) {
                    Some(Mark::Active) => return Err(OntologyError::Cycle(next.to_string())),
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(next, Mark::Active);
                        let below = children.get(next).map(|c| c.iter().collect()).unwrap_or_default();
                        stack.push((next, below));
                    }
                },
                None => {
                    marks.insert(node, Mark::Done);
                    stack.pop();
                }
            }
        }
    }
    Ok(())
}

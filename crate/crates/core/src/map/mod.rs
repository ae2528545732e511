//! Intentional maps: intentions linked by strategies into sections, with
//! unique start and stop intentions.

mod encode;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

pub use encode::{map_from_rdf, map_ids_in, map_to_rdf, section_iri};
pub use validate::{enumerate_paths, structural_diagnostics, validate_map};

use crate::diagnostic::Diagnostic;
use crate::rdf::Iri;

/// Intentions compare by value: two ordinary intentions with the same verb
/// and object are the same node of the map.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Intention {
    Start,
    Stop,
    Ordinary { verb: Iri, object: Iri },
}

impl Intention {
    pub fn ordinary(verb: Iri, object: Iri) -> Self {
        Intention::Ordinary { verb, object }
    }

    pub fn verb(&self) -> Option<&Iri> {
        match self {
            Intention::Ordinary { verb, .. } => Some(verb),
            _ => None,
        }
    }

    pub fn object(&self) -> Option<&Iri> {
        match self {
            Intention::Ordinary { object, .. } => Some(object),
            _ => None,
        }
    }

    pub fn is_ordinary(&self) -> bool {
        matches!(self, Intention::Ordinary { .. })
    }
}

impl fmt::Display for Intention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Intention::Start => f.write_str("start"),
            Intention::Stop => f.write_str("stop"),
            Intention::Ordinary { verb, object } => write!(f, "{} {}", verb.local_name(), object.local_name()),
        }
    }
}

/// A strategy with neither label nor IRI is the anonymous strategy.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Strategy {
    pub label: Option<String>,
    pub iri: Option<Iri>,
}

impl Strategy {
    pub fn anonymous() -> Self {
        Strategy::default()
    }

    pub fn is_anonymous(&self) -> bool {
        self.label.is_none() && self.iri.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Section {
    pub id: String,
    pub source: Intention,
    pub strategy: Strategy,
    pub target: Intention,
}

impl Section {
    pub fn new(id: impl Into<String>, source: Intention, strategy: Strategy, target: Intention) -> Self {
        Section { id: id.into(), source, strategy, target }
    }
}

/// A map. Sections are kept sorted by id so that structurally equal maps
/// compare equal regardless of authoring order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Map {
    id: Iri,
    sections: Vec<Section>,
    refinements: BTreeMap<String, Iri>,
}

impl Map {
    pub fn new(id: Iri, mut sections: Vec<Section>, refinements: BTreeMap<String, Iri>) -> Self {
        sections.sort();
        Map { id, sections, refinements }
    }

    pub fn id(&self) -> &Iri {
        &self.id
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn section(&self, id: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.id == id)
    }

    /// Section id to the id of the map refining it.
    pub fn refinements(&self) -> &BTreeMap<String, Iri> {
        &self.refinements
    }

    /// Distinct ordinary intentions in order of first appearance.
    pub fn ordinary_intentions(&self) -> Vec<&Intention> {
        let mut out: Vec<&Intention> = Vec::new();
        for s in &self.sections {
            for i in [&s.source, &s.target] {
                if i.is_ordinary() && !out.contains(&i) {
                    out.push(i);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("invalid map {map}: {}", join(.diagnostics))]
    Invalid { map: Iri, diagnostics: Vec<Diagnostic> },
    #[error("no-such-map: {0}")]
    NoSuchMap(Iri),
    #[error("{node}: missing property {property}")]
    MissingProperty { node: String, property: String },
    #[error("{node}: ambiguous property {property} ({count} values)")]
    Ambiguous { node: String, property: String, count: usize },
    #[error("{node}: {message}")]
    Malformed { node: String, message: String },
}

fn join(diagnostics: &[Diagnostic]) -> String {
    diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

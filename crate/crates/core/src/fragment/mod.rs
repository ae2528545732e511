//! Fragments: a section signature plus either a service query (operational)
//! or a detailed map (intentional), compiled into CONSTRUCT rules.

mod compile;
mod manifest;

use std::fmt;

pub use compile::{compile_fragment, signature_of, Rule, RuleBase, RuleKind};
pub use manifest::{fragment_from_manifest, parse_manifest, FragmentManifest};

use crate::diagnostic::Diagnostic;
use crate::map::{validate_map, Intention, Map};
use crate::rdf::{vocab, Graph, Iri, Term};
use crate::syntax::{TriplePattern, Variable};

/// The section a fragment promises to achieve. Absent source or strategy
/// slots place no constraint on the goal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SectionSignature {
    pub target_verb: Iri,
    pub target_object: Iri,
    /// `Intention::Start` or an ordinary intention; never `Stop`.
    pub source: Option<Intention>,
    pub strategy: Option<Iri>,
}

impl SectionSignature {
    pub fn target(target_verb: Iri, target_object: Iri) -> Self {
        SectionSignature { target_verb, target_object, source: None, strategy: None }
    }
}

impl fmt::Display for SectionSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(src) = &self.source {
            write!(f, "{src} -> ")?;
        }
        write!(f, "{} {}", self.target_verb.local_name(), self.target_object.local_name())?;
        if let Some(st) = &self.strategy {
            write!(f, " by {}", st.local_name())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FragmentBody {
    /// A WHERE pattern over the registry graph and the variables in it that
    /// bind services.
    Query { patterns: Vec<TriplePattern>, service_variables: Vec<Variable> },
    Map(Map),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub id: Iri,
    pub signature: SectionSignature,
    pub body: FragmentBody,
    pub note: Option<String>,
}

impl Fragment {
    pub fn is_operational(&self) -> bool {
        matches!(self.body, FragmentBody::Query { .. })
    }
}

fn check_intention(i: &Intention, ontology: &Graph, out: &mut Vec<Diagnostic>) {
    let ty = vocab::rdf_type();
    if let Intention::Ordinary { verb, object } = i {
        if !ontology.contains_terms(&Term::from(verb), &ty, &vocab::term(vocab::MAP, "Verb")) {
            out.push(Diagnostic::new(
                "unresolved-verb",
                verb.as_str(),
                format!("{verb} is not declared as a map:Verb in the ontology"),
            ));
        }
        if !ontology.contains_terms(&Term::from(object), &ty, &vocab::term(vocab::MAP, "Object")) {
            out.push(Diagnostic::new(
                "unresolved-object",
                object.as_str(),
                format!("{object} is not declared as a map:Object in the ontology"),
            ));
        }
    }
}

/// Checks a fragment against a closed ontology.
pub fn validate_fragment(f: &Fragment, ontology: &Graph) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let sig = &f.signature;
    check_intention(&Intention::ordinary(sig.target_verb.clone(), sig.target_object.clone()), ontology, &mut out);
    match &sig.source {
        Some(Intention::Stop) => {
            out.push(Diagnostic::new("signature-source-stop", f.id.as_str(), "a signature cannot start from the stop intention"))
        }
        Some(i) => check_intention(i, ontology, &mut out),
        None => {}
    }
    if let Some(st) = &sig.strategy {
        if ontology.pattern(Some(&Term::from(st)), None, None).next().is_none() {
            out.push(Diagnostic::new(
                "unresolved-strategy",
                st.as_str(),
                format!("strategy {st} is not described in the ontology"),
            ));
        }
    }
    match &f.body {
        FragmentBody::Query { patterns, service_variables } => {
            if patterns.is_empty() {
                out.push(Diagnostic::new("empty-query-body", f.id.as_str(), "the query body has no triple patterns"));
            }
            if service_variables.is_empty() {
                out.push(Diagnostic::new("no-service-variable", f.id.as_str(), "the query body declares no service variable"));
            }
            for v in service_variables {
                if !patterns.iter().any(|p| p.variables().any(|pv| pv == v)) {
                    out.push(Diagnostic::new(
                        "unused-service-variable",
                        format!("{} {v}", f.id.as_str()),
                        format!("service variable {v} does not occur in the query body"),
                    ));
                }
            }
            let io = [vocab::term(vocab::OWLS, "hasInput"), vocab::term(vocab::OWLS, "hasOutput")];
            let mentions_io = patterns.iter().any(|p| p.predicate.as_term().is_some_and(|t| io.contains(t)));
            if !patterns.is_empty() && !mentions_io {
                out.push(Diagnostic::new(
                    "no-io-pattern",
                    f.id.as_str(),
                    "the query body must constrain owls:hasInput or owls:hasOutput",
                ));
            }
        }
        FragmentBody::Map(m) => out.extend(validate_map(m, ontology)),
    }
    out
}

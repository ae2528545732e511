//! In-memory RDF: terms, indexed graphs, isomorphism and RDFS closure.

mod entail;
mod graph;
mod iso;
mod term;
pub mod vocab;

pub use entail::{is_subsumed_by, rdfs_closure};
pub use graph::Graph;
pub use iso::is_isomorphic;
pub use term::{BlankNode, Iri, Literal, Term, Triple};
pub(crate) use term::escape_literal;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RdfError {
    #[error("not an absolute IRI: {0:?}")]
    InvalidIri(String),
    #[error("literal {0} cannot be the subject of a triple")]
    LiteralSubject(String),
    #[error("predicate {0} is not an IRI")]
    NonIriPredicate(String),
}

//! Intentional service composition over RDF: a small triple store with RDFS
//! entailment, Turtle and SPARQL readers, intentional maps, a service
//! registry, fragment rules and a backward-chaining resolver.

pub mod rdf;
pub mod syntax;
pub mod query;
pub mod diagnostic;
pub mod map;
pub mod registry;
pub mod fragment;
pub mod memory;
pub mod resolver;

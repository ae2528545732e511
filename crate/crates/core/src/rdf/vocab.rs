//! Namespace constants and the built-in vocabularies.

use super::{Iri, Term};

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
/// Intentional map vocabulary.
pub const MAP: &str = "http://satis.example/map#";
/// Flattened service-profile vocabulary.
pub const OWLS: &str = "http://satis.example/owls#";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const RDFS_SUBPROPERTY_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

pub fn iri(ns: &str, local: &str) -> Iri {
    Iri::constant(&format!("{ns}{local}"))
}

pub fn term(ns: &str, local: &str) -> Term {
    Term::Iri(iri(ns, local))
}

pub fn rdf_type() -> Term {
    Term::Iri(Iri::constant(RDF_TYPE))
}

pub fn subclass_of() -> Term {
    Term::Iri(Iri::constant(RDFS_SUBCLASS_OF))
}

pub fn subproperty_of() -> Term {
    Term::Iri(Iri::constant(RDFS_SUBPROPERTY_OF))
}

pub fn rdfs_label() -> Term {
    Term::Iri(Iri::constant(RDFS_LABEL))
}

/// Prefixes every memory knows about without declaring them.
pub fn standard_prefixes() -> [(&'static str, &'static str); 5] {
    [("rdf", RDF), ("rdfs", RDFS), ("xsd", XSD), ("map", MAP), ("owls", OWLS)]
}

/// Turtle source of the map vocabulary.
pub const MAP_VOCABULARY_TTL: &str = r#"@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix map: <http://satis.example/map#> .

map:Map a rdfs:Class ; rdfs:label "Map" .
map:Section a rdfs:Class ; rdfs:label "Section" .
map:Intention a rdfs:Class ; rdfs:label "Intention" .
map:Strategy a rdfs:Class ; rdfs:label "Strategy" .
map:Verb a rdfs:Class ; rdfs:label "Verb" .
map:Object a rdfs:Class ; rdfs:label "Object" .
map:Start a rdfs:Class ; rdfs:subClassOf map:Intention ; rdfs:label "Start intention" .
map:Stop a rdfs:Class ; rdfs:subClassOf map:Intention ; rdfs:label "Stop intention" .

map:hasSection a rdf:Property ; rdfs:label "has section" .
map:hasSource a rdf:Property ; rdfs:label "has source intention" .
map:hasTarget a rdf:Property ; rdfs:label "has target intention" .
map:hasStrategy a rdf:Property ; rdfs:label "has strategy" .
map:hasVerb a rdf:Property ; rdfs:label "has verb" .
map:hasObject a rdf:Property ; rdfs:label "has object" .
map:refinedBy a rdf:Property ; rdfs:label "refined by" .
map:operationalisedBy a rdf:Property ; rdfs:label "operationalised by" .
"#;

/// Turtle source of the service-profile vocabulary.
pub const OWLS_VOCABULARY_TTL: &str = r#"@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix owls: <http://satis.example/owls#> .

owls:Service a rdfs:Class ; rdfs:label "Service" .
owls:name a rdf:Property ; rdfs:label "name" .
owls:hasInput a rdf:Property ; rdfs:label "has input" .
owls:hasOutput a rdf:Property ; rdfs:label "has output" .
owls:grounding a rdf:Property ; rdfs:label "grounding" .
"#;

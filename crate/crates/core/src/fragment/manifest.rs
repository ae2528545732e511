//! The JSON authoring format for fragments.
//!
//! ```json
//! {
//!   "id": "frag:debiasing",
//!   "kind": "operational",
//!   "signature": { "target": { "verb": "dom:Debiasing", "object": "dom:Image" } },
//!   "body": {
//!     "sparqlWhere": "?service owls:hasInput dom:Image . ?service owls:hasOutput dom:DebiasedImage",
//!     "serviceVariables": ["service"]
//!   }
//! }
//! ```
//!
//! Intentional fragments carry `"body": { "map": { "sections": [...] } }`
//! where each section has an `id`, a `source` ("start" or a verb/object
//! pair), a `target` ("stop" or a verb/object pair) and an optional
//! `strategy` with `label` and/or `iri`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Fragment, FragmentBody, SectionSignature};
use crate::map::{Intention, Map, Section, Strategy};
use crate::rdf::Iri;
use crate::syntax::{expand_curie, parse_sparql, SyntaxError, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FragmentManifest {
    pub id: String,
    pub kind: FragmentKind,
    pub signature: SignatureSpec,
    pub body: BodySpec,
    /// Extra prefixes for this manifest only.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub prefixes: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FragmentKind {
    Operational,
    Intentional,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntentionSpec {
    pub verb: String,
    pub object: String,
}

/// `"start"`, `"stop"` or a verb/object pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EndpointSpec {
    Keyword(String),
    Intention(IntentionSpec),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureSpec {
    pub target: IntentionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<EndpointSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BodySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparql_where: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub service_variables: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub sections: Vec<SectionSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub refinements: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    pub id: String,
    pub source: EndpointSpec,
    pub target: EndpointSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategySpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iri: Option<String>,
}

/// A manifest problem. `line`/`col` refer to the JSON document when known.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct ManifestError {
    pub line: Option<usize>,
    pub col: Option<usize>,
    pub message: String,
}

impl ManifestError {
    fn new(message: impl Into<String>) -> Self {
        ManifestError { line: None, col: None, message: message.into() }
    }
}

pub fn parse_manifest(text: &str) -> Result<FragmentManifest, ManifestError> {
    serde_json::from_str(text).map_err(|e| ManifestError {
        line: Some(e.line()),
        col: Some(e.column()),
        message: e.to_string(),
    })
}

fn endpoint(spec: &EndpointSpec, prefixes: &BTreeMap<String, String>) -> Result<Intention, ManifestError> {
    match spec {
        EndpointSpec::Keyword(k) if k.eq_ignore_ascii_case("start") => Ok(Intention::Start),
        EndpointSpec::Keyword(k) if k.eq_ignore_ascii_case("stop") => Ok(Intention::Stop),
        EndpointSpec::Keyword(k) => Err(ManifestError::new(format!("expected \"start\", \"stop\" or a verb/object pair, found {k:?}"))),
        EndpointSpec::Intention(i) => intention(i, prefixes),
    }
}

fn intention(spec: &IntentionSpec, prefixes: &BTreeMap<String, String>) -> Result<Intention, ManifestError> {
    Ok(Intention::Ordinary { verb: curie(&spec.verb, prefixes)?, object: curie(&spec.object, prefixes)? })
}

fn curie(text: &str, prefixes: &BTreeMap<String, String>) -> Result<Iri, ManifestError> {
    expand_curie(text, prefixes).map_err(ManifestError::new)
}

/// Builds a fragment from a manifest. `prefixes` is the memory's prefix
/// table; the manifest's own prefixes take precedence.
pub fn fragment_from_manifest(
    m: &FragmentManifest,
    prefixes: &BTreeMap<String, String>,
) -> Result<Fragment, ManifestError> {
    let mut prefixes = prefixes.clone();
    prefixes.extend(m.prefixes.clone());
    let id = curie(&m.id, &prefixes)?;
    let target = intention(&m.signature.target, &prefixes)?;
    let Intention::Ordinary { verb: target_verb, object: target_object } = target else { unreachable!() };
    let source = m.signature.source.as_ref().map(|s| endpoint(s, &prefixes)).transpose()?;
    let strategy = m.signature.strategy.as_deref().map(|s| curie(s, &prefixes)).transpose()?;
    let signature = SectionSignature { target_verb, target_object, source, strategy };

    let body = match (m.kind, &m.body) {
        (FragmentKind::Operational, BodySpec { sparql_where: Some(text), map: None, service_variables }) => {
            let patterns = parse_where(text, &prefixes)?;
            let names = service_variables.clone().unwrap_or_else(|| vec!["service".to_string()]);
            let service_variables = names.iter().map(|n| Variable::new(n.trim_start_matches(['?', '$']))).collect();
            FragmentBody::Query { patterns, service_variables }
        }
        (FragmentKind::Intentional, BodySpec { sparql_where: None, service_variables: None, map: Some(spec) }) => {
            FragmentBody::Map(map_from_spec(spec, &id, &prefixes)?)
        }
        (FragmentKind::Operational, _) => {
            return Err(ManifestError::new("an operational fragment needs a body with \"sparqlWhere\" and no \"map\""))
        }
        (FragmentKind::Intentional, _) => {
            return Err(ManifestError::new("an intentional fragment needs a body with \"map\" and no query fields"))
        }
    };
    Ok(Fragment { id, signature, body, note: m.note.clone() })
}

fn parse_where(text: &str, prefixes: &BTreeMap<String, String>) -> Result<Vec<crate::syntax::TriplePattern>, ManifestError> {
    let mut body = text.trim();
    if let Some(inner) = body.strip_prefix('{').and_then(|b| b.strip_suffix('}')) {
        body = inner;
    }
    let mut query = String::new();
    for (label, ns) in prefixes {
        query.push_str(&format!("PREFIX {label}: <{ns}>\n"));
    }
    query.push_str("SELECT * WHERE {\n");
    query.push_str(body);
    query.push_str("\n}");
    let header_lines = prefixes.len() + 1;
    parse_sparql(&query).map(|q| q.where_patterns).map_err(|e| {
        let (line, col) = e.position();
        let detail = match &e {
            SyntaxError::Syntax { message, .. } => message.clone(),
            SyntaxError::Unsupported { feature, .. } => format!("unsupported feature: {feature}"),
            SyntaxError::UndeclaredPrefix { prefix, .. } => format!("undeclared prefix {prefix:?}"),
            SyntaxError::RelativeIri { iri, .. } => format!("relative IRI <{iri}>"),
        };
        ManifestError::new(format!(
            "sparqlWhere line {}, column {col}: {detail}",
            line.saturating_sub(header_lines).max(1)
        ))
    })
}

fn map_from_spec(spec: &MapSpec, fragment_id: &Iri, prefixes: &BTreeMap<String, String>) -> Result<Map, ManifestError> {
    let id = match &spec.id {
        Some(text) => curie(text, prefixes)?,
        None => Iri::new(format!("{}/map", fragment_id.as_str())).map_err(|e| ManifestError::new(e.to_string()))?,
    };
    let mut sections = Vec::new();
    for s in &spec.sections {
        let strategy = match &s.strategy {
            Some(st) => Strategy {
                label: st.label.clone(),
                iri: st.iri.as_deref().map(|i| curie(i, prefixes)).transpose()?,
            },
            None => Strategy::anonymous(),
        };
        sections.push(Section::new(s.id.clone(), endpoint(&s.source, prefixes)?, strategy, endpoint(&s.target, prefixes)?));
    }
    let refinements = spec
        .refinements
        .iter()
        .map(|(sid, target)| Ok((sid.clone(), curie(target, prefixes)?)))
        .collect::<Result<_, ManifestError>>()?;
    Ok(Map::new(id, sections, refinements))
}

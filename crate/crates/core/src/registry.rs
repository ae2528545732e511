//! Service descriptions and the registry they are published into.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::rdf::{vocab, Graph, Iri, Literal, Term, Triple};
use crate::syntax::serialize_turtle;

/// A profile-level service description: name, input and output concepts,
/// and an opaque grounding reference that is never dereferenced.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ServiceDescription {
    pub id: Iri,
    pub name: String,
    pub inputs: BTreeSet<Iri>,
    pub outputs: BTreeSet<Iri>,
    pub grounding: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("duplicate-id: service {0} is already published")]
    DuplicateId(Iri),
    #[error("unknown-id: no service {0} is published")]
    UnknownId(Iri),
    #[error("unresolved-concept: {concept} (used by service {service}) is not described in the ontology")]
    UnresolvedConcept { service: Iri, concept: Iri },
    #[error("service {0} must have at least one input and one output")]
    EmptyInterface(Iri),
    #[error("{node}: {message}")]
    Decode { node: String, message: String },
}

/// A registry value. Mutations return a new registry and leave the original
/// untouched; `generation` grows with every mutation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    services: BTreeMap<Iri, ServiceDescription>,
    generation: u64,
}

fn owls(local: &str) -> Term {
    vocab::term(vocab::OWLS, local)
}

/// Checks a description against the ontology: non-empty interface and
/// every concept present as the subject of some ontology triple.
pub fn check_description(d: &ServiceDescription, ontology: &Graph) -> Result<(), RegistryError> {
    if d.inputs.is_empty() || d.outputs.is_empty() {
        return Err(RegistryError::EmptyInterface(d.id.clone()));
    }
    for c in d.inputs.iter().chain(&d.outputs) {
        if ontology.pattern(Some(&Term::from(c)), None, None).next().is_none() {
            return Err(RegistryError::UnresolvedConcept { service: d.id.clone(), concept: c.clone() });
        }
    }
    Ok(())
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn len(&self) -> usize {
        self.services.len()
    }

    pub fn is_empty(&self) -> bool {
        self.services.is_empty()
    }

    pub fn get(&self, id: &Iri) -> Option<&ServiceDescription> {
        self.services.get(id)
    }

    /// Services in id order.
    pub fn services(&self) -> impl Iterator<Item = &ServiceDescription> + '_ {
        self.services.values()
    }

    pub fn publish(&self, d: ServiceDescription, ontology: &Graph) -> Result<Registry, RegistryError> {
        if self.services.contains_key(&d.id) {
            return Err(RegistryError::DuplicateId(d.id));
        }
        check_description(&d, ontology)?;
        let mut next = self.clone();
        next.services.insert(d.id.clone(), d);
        next.generation += 1;
        Ok(next)
    }

    pub fn retire(&self, id: &Iri) -> Result<Registry, RegistryError> {
        if !self.services.contains_key(id) {
            return Err(RegistryError::UnknownId(id.clone()));
        }
        let mut next = self.clone();
        next.services.remove(id);
        next.generation += 1;
        Ok(next)
    }
}

fn service_triples(d: &ServiceDescription) -> Vec<Triple> {
    let s = Term::from(&d.id);
    let mut out = vec![
        Triple::new(s.clone(), vocab::rdf_type(), owls("Service")),
        Triple::new(s.clone(), owls("name"), Literal::plain(d.name.clone())),
        Triple::new(s.clone(), owls("grounding"), Literal::plain(d.grounding.clone())),
    ];
    out.extend(d.inputs.iter().map(|c| Triple::new(s.clone(), owls("hasInput"), c)));
    out.extend(d.outputs.iter().map(|c| Triple::new(s.clone(), owls("hasOutput"), c)));
    out.into_iter().map(|t| t.expect("service encoding produces well-formed triples")).collect()
}

/// The annotation graph that concrete rules match against.
pub fn registry_graph(reg: &Registry) -> Graph {
    let mut g = Graph::new();
    g.set_prefix("owls", vocab::OWLS);
    for d in reg.services() {
        g.extend(service_triples(d));
    }
    g
}

/// Decodes every `owls:Service` in `g`.
pub fn services_from_rdf(g: &Graph) -> Result<Vec<ServiceDescription>, RegistryError> {
    let ty = vocab::rdf_type();
    let class = owls("Service");
    let subjects: Vec<Term> = g.subjects(&ty, &class).cloned().collect();
    subjects.iter().map(|s| decode_service(g, s)).collect()
}

fn decode_service(g: &Graph, s: &Term) -> Result<ServiceDescription, RegistryError> {
    let err = |message: String| RegistryError::Decode { node: s.to_string(), message };
    let id = s.as_iri().cloned().ok_or_else(|| err("a service must be identified by an IRI".into()))?;
    let single_literal = |local: &str| -> Result<String, RegistryError> {
        let p = owls(local);
        let vals: Vec<&Term> = g.objects(s, &p).collect();
        match vals.as_slice() {
            [Term::Literal(l)] => Ok(l.value().to_string()),
            [] => Err(err(format!("missing property owls:{local}"))),
            [_] => Err(err(format!("owls:{local} must be a literal"))),
            _ => Err(err(format!("ambiguous property owls:{local}"))),
        }
    };
    let concepts = |local: &str| -> Result<BTreeSet<Iri>, RegistryError> {
        let p = owls(local);
        g.objects(s, &p)
            .map(|t| t.as_iri().cloned().ok_or_else(|| err(format!("owls:{local} values must be IRIs, found {t}"))))
            .collect()
    };
    Ok(ServiceDescription {
        name: single_literal("name")?,
        grounding: single_literal("grounding")?,
        inputs: concepts("hasInput")?,
        outputs: concepts("hasOutput")?,
        id,
    })
}

/// Rebuilds a registry from its graph. The generation counts one publish
/// per service.
pub fn registry_from_rdf(g: &Graph) -> Result<Registry, RegistryError> {
    let mut reg = Registry::new();
    for d in services_from_rdf(g)? {
        if reg.services.insert(d.id.clone(), d.clone()).is_some() {
            return Err(RegistryError::DuplicateId(d.id));
        }
        reg.generation += 1;
    }
    Ok(reg)
}

/// Reads the single service described by one `services/*.ttl` document.
pub fn service_from_document(g: &Graph) -> Result<ServiceDescription, RegistryError> {
    let mut all = services_from_rdf(g)?;
    match all.len() {
        1 => Ok(all.remove(0)),
        0 => Err(RegistryError::Decode { node: "document".into(), message: "no owls:Service is described".into() }),
        n => Err(RegistryError::Decode {
            node: "document".into(),
            message: format!("{n} services described; one file per service is required"),
        }),
    }
}

/// Writes one Turtle file per service into `dir`, named after the local name
/// of the service id. Returns the written paths.
pub fn save_services(reg: &Registry, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for d in reg.services() {
        let mut g: Graph = service_triples(d).into_iter().collect();
        g.set_prefix("owls", vocab::OWLS);
        let path = dir.join(format!("{}.ttl", d.id.local_name()));
        fs::write(&path, serialize_turtle(&g))?;
        written.push(path);
    }
    Ok(written)
}

//! The community memory: ontology, registry, rule base and maps, loaded
//! from a directory laid out as
//!
//! ```text
//! ontology/*.ttl   domain ontology (the built-in vocabularies are added)
//! services/*.ttl   one service description per file
//! fragments/*.json fragment manifests
//! maps/*.ttl       elicited maps, validated but not compiled
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::diagnostic::Diagnostic;
use crate::fragment::{compile_fragment, fragment_from_manifest, parse_manifest, Fragment, FragmentBody, Rule, RuleBase};
use crate::map::{map_from_rdf, map_ids_in, validate_map, Map};
use crate::rdf::{rdfs_closure, vocab, Graph, Iri};
use crate::registry::{registry_graph, service_from_document, Registry, RegistryError, ServiceDescription};
use crate::syntax::parse_turtle;

/// A problem found while loading, located in a file when possible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoadDiagnostic {
    pub file: Option<PathBuf>,
    pub line: Option<usize>,
    pub col: Option<usize>,
    pub code: String,
    pub message: String,
}

impl LoadDiagnostic {
    fn at(file: Option<&Path>, line: Option<usize>, col: Option<usize>, code: &str, message: impl Into<String>) -> Self {
        LoadDiagnostic { file: file.map(Path::to_path_buf), line, col, code: code.to_string(), message: message.into() }
    }

    fn from_diagnostic(file: Option<&Path>, d: Diagnostic) -> Self {
        Self::at(file, None, None, d.code, format!("{} ({})", d.message, d.element))
    }
}

impl fmt::Display for LoadDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{}", file.display())?;
            if let Some(line) = self.line {
                write!(f, ":{line}")?;
                if let Some(col) = self.col {
                    write!(f, ":{col}")?;
                }
            }
            write!(f, ": ")?;
        }
        write!(f, "{}: {}", self.code, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {}: {message}", .path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<LoadDiagnostic>),
}

/// An immutable snapshot of the memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Memory {
    /// Domain ontology plus built-in vocabularies, closed under RDFS.
    pub ontology: Graph,
    /// The same graph before closure.
    pub asserted: Graph,
    pub registry: Registry,
    pub rulebase: RuleBase,
    pub fragments: Vec<Fragment>,
    pub maps: Vec<Map>,
    pub prefixes: BTreeMap<String, String>,
}

/// The `map:` and `owls:` vocabularies.
pub fn builtin_vocabulary() -> Graph {
    let map = parse_turtle(vocab::MAP_VOCABULARY_TTL, None).expect("built-in map vocabulary parses");
    let owls = parse_turtle(vocab::OWLS_VOCABULARY_TTL, None).expect("built-in service vocabulary parses");
    map.merge(&owls)
}

type Origin = Option<PathBuf>;

struct Parts {
    ontology: Graph,
    services: Vec<(Origin, ServiceDescription)>,
    fragments: Vec<(Origin, Fragment)>,
    maps: Vec<(Origin, Map)>,
    prefixes: BTreeMap<String, String>,
}

impl Memory {
    /// Builds a memory from values rather than files. The ontology is
    /// merged with the built-in vocabularies and closed.
    pub fn from_parts(
        ontology: &Graph,
        services: Vec<ServiceDescription>,
        fragments: Vec<Fragment>,
        maps: Vec<Map>,
    ) -> Result<Memory, LoadError> {
        let mut prefixes = standard_prefixes();
        prefixes.extend(ontology.prefixes().clone());
        let parts = Parts {
            ontology: ontology.clone(),
            services: services.into_iter().map(|s| (None, s)).collect(),
            fragments: fragments.into_iter().map(|f| (None, f)).collect(),
            maps: maps.into_iter().map(|m| (None, m)).collect(),
            prefixes,
        };
        assemble(parts, Vec::new())
    }

    pub fn with_registry(&self, registry: Registry) -> Memory {
        Memory { registry, ..self.clone() }
    }

    pub fn publish(&self, d: ServiceDescription) -> Result<Memory, RegistryError> {
        Ok(self.with_registry(self.registry.publish(d, &self.ontology)?))
    }

    pub fn retire(&self, id: &Iri) -> Result<Memory, RegistryError> {
        Ok(self.with_registry(self.registry.retire(id)?))
    }

    /// The graph concrete rules are evaluated against: the ontology merged
    /// with the registry annotations, closed when `entail` is set.
    pub fn dataset(&self, entail: bool) -> Graph {
        if entail {
            rdfs_closure(&self.ontology.merge(&registry_graph(&self.registry)))
        } else {
            self.asserted.merge(&registry_graph(&self.registry))
        }
    }

    pub fn fragment(&self, id: &Iri) -> Option<&Fragment> {
        self.fragments.iter().find(|f| &f.id == id)
    }
}

fn standard_prefixes() -> BTreeMap<String, String> {
    vocab::standard_prefixes().iter().map(|(l, n)| (l.to_string(), n.to_string())).collect()
}

fn assemble(parts: Parts, mut diags: Vec<LoadDiagnostic>) -> Result<Memory, LoadError> {
    let asserted = builtin_vocabulary().merge(&parts.ontology);
    let ontology = rdfs_closure(&asserted);

    let mut registry = Registry::new();
    for (origin, d) in parts.services {
        match registry.publish(d, &ontology) {
            Ok(r) => registry = r,
            Err(e) => diags.push(LoadDiagnostic::at(origin.as_deref(), None, None, "invalid-service", e.to_string())),
        }
    }

    let mut known_maps: BTreeSet<Iri> = BTreeSet::new();
    let mut all_maps: Vec<(Origin, &Map)> = Vec::new();
    for (origin, m) in &parts.maps {
        all_maps.push((origin.clone(), m));
    }
    for (origin, f) in &parts.fragments {
        if let FragmentBody::Map(m) = &f.body {
            all_maps.push((origin.clone(), m));
        }
    }
    for (origin, m) in &all_maps {
        if !known_maps.insert(m.id().clone()) {
            diags.push(LoadDiagnostic::at(origin.as_deref(), None, None, "duplicate-map-id", format!("map {} is defined twice", m.id())));
        }
    }
    for (origin, m) in &all_maps {
        for (sid, target) in m.refinements() {
            if !known_maps.contains(target) {
                diags.push(LoadDiagnostic::at(
                    origin.as_deref(),
                    None,
                    None,
                    "dangling-refinement",
                    format!("section {sid} of {} is refined by unknown map {target}", m.id()),
                ));
            }
        }
    }
    for (origin, m) in &parts.maps {
        diags.extend(validate_map(m, &ontology).into_iter().map(|d| LoadDiagnostic::from_diagnostic(origin.as_deref(), d)));
    }

    let mut rules: Vec<Rule> = Vec::new();
    let mut seen_fragments = BTreeSet::new();
    for (origin, f) in &parts.fragments {
        if !seen_fragments.insert(f.id.clone()) {
            diags.push(LoadDiagnostic::at(origin.as_deref(), None, None, "duplicate-fragment-id", format!("fragment {} is defined twice", f.id)));
            continue;
        }
        match compile_fragment(f, &ontology) {
            Ok(rs) => rules.extend(rs),
            Err(e) => diags.extend(e.diagnostics.into_iter().map(|d| LoadDiagnostic::from_diagnostic(origin.as_deref(), d))),
        }
    }

    if !diags.is_empty() {
        return Err(LoadError::Invalid(diags));
    }
    let rulebase = RuleBase::new(rules).map_err(|id| {
        LoadError::Invalid(vec![LoadDiagnostic::at(None, None, None, "duplicate-rule-id", format!("rule {id} is defined twice"))])
    })?;
    let mut fragments: Vec<Fragment> = parts.fragments.into_iter().map(|(_, f)| f).collect();
    fragments.sort_by(|a, b| a.id.cmp(&b.id));
    let mut maps: Vec<Map> = parts.maps.into_iter().map(|(_, m)| m).collect();
    maps.sort_by(|a, b| a.id().cmp(b.id()));
    Ok(Memory { ontology, asserted, registry, rulebase, fragments, maps, prefixes: parts.prefixes })
}

/// Files with the given extension directly inside `dir`, sorted by name.
/// A missing directory counts as empty.
fn list(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, LoadError> {
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let io = |e: std::io::Error| LoadError::Io { path: dir.to_path_buf(), message: e.to_string() };
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == ext) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|e| LoadError::Io { path: path.to_path_buf(), message: e.to_string() })
}

/// Loads a memory directory. Every file is checked; all problems found are
/// reported together.
pub fn load_memory(dir: &Path) -> Result<Memory, LoadError> {
    if !dir.is_dir() {
        return Err(LoadError::Io { path: dir.to_path_buf(), message: "not a directory".into() });
    }
    let rel = |p: &Path| p.strip_prefix(dir).unwrap_or(p).to_path_buf();
    let mut diags = Vec::new();
    let mut prefixes = standard_prefixes();

    let mut parse_all = |sub: &str, diags: &mut Vec<LoadDiagnostic>| -> Result<Vec<(PathBuf, Graph)>, LoadError> {
        let mut out = Vec::new();
        for path in list(&dir.join(sub), "ttl")? {
            let text = read(&path)?;
            match parse_turtle(&text, None) {
                Ok(g) => {
                    for (label, ns) in g.prefixes() {
                        prefixes.entry(label.clone()).or_insert_with(|| ns.clone());
                    }
                    out.push((rel(&path), g));
                }
                Err(e) => {
                    let (line, col) = e.position();
                    diags.push(LoadDiagnostic::at(Some(&rel(&path)), Some(line), Some(col), "syntax", e.to_string()));
                }
            }
        }
        Ok(out)
    };
    let ontology_docs = parse_all("ontology", &mut diags)?;
    let service_docs = parse_all("services", &mut diags)?;
    let map_docs = parse_all("maps", &mut diags)?;

    let mut ontology = Graph::new();
    for (n, (_, g)) in ontology_docs.iter().enumerate() {
        ontology = ontology.merge(&g.scope_blanks(&format!("d{n}_")));
    }

    let mut services = Vec::new();
    for (path, g) in service_docs {
        match service_from_document(&g) {
            Ok(d) => services.push((Some(path), d)),
            Err(e) => diags.push(LoadDiagnostic::at(Some(&path), None, None, "invalid-service", e.to_string())),
        }
    }

    let mut maps = Vec::new();
    for (path, g) in map_docs {
        for id in map_ids_in(&g) {
            match map_from_rdf(&g, &id) {
                Ok(m) => maps.push((Some(path.clone()), m)),
                Err(e) => diags.push(LoadDiagnostic::at(Some(&path), None, None, "invalid-map", e.to_string())),
            }
        }
    }

    let mut fragments = Vec::new();
    for path in list(&dir.join("fragments"), "json")? {
        let text = read(&path)?;
        let file = rel(&path);
        let manifest = match parse_manifest(&text) {
            Ok(m) => m,
            Err(e) => {
                diags.push(LoadDiagnostic::at(Some(&file), e.line, e.col, "manifest", e.message));
                continue;
            }
        };
        match fragment_from_manifest(&manifest, &prefixes) {
            Ok(f) => fragments.push((Some(file), f)),
            Err(e) => {
                let line = e.line.or_else(|| locate_query_line(&text, &e.message));
                diags.push(LoadDiagnostic::at(Some(&file), line, e.col, "manifest", e.message));
            }
        }
    }

    assemble(Parts { ontology, services, fragments, maps, prefixes }, diags)
}

/// Line of the `sparqlWhere` key, for errors inside the embedded query.
fn locate_query_line(text: &str, message: &str) -> Option<usize> {
    if !message.starts_with("sparqlWhere") {
        return None;
    }
    text.lines().position(|l| l.contains("\"sparqlWhere\"")).map(|i| i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_directory_is_an_empty_memory() {
        let dir = tempfile::tempdir().unwrap();
        let mem = load_memory(dir.path()).unwrap();
        assert!(mem.registry.is_empty());
        assert!(mem.rulebase.is_empty());
        assert!(mem.maps.is_empty());
        assert_eq!(mem.prefixes["map"], vocab::MAP);
    }

    #[test]
    fn missing_directory_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_memory(&dir.path().join("nope")), Err(LoadError::Io { .. })));
    }

    #[test]
    fn syntax_errors_carry_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("ontology")).unwrap();
        fs::write(dir.path().join("ontology/bad.ttl"), "@prefix ex: <http://e/> .\nex:a ex:p .\n").unwrap();
        let Err(LoadError::Invalid(d)) = load_memory(dir.path()) else { panic!("expected diagnostics") };
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].to_string().split(": ").next(), Some("ontology/bad.ttl:2:11"));
    }
}

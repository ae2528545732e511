use std::collections::{BTreeMap, BTreeSet};

use super::{Intention, Map, MapError, Section};
use crate::diagnostic::Diagnostic;
use crate::rdf::{vocab, Graph, Iri, Term};

type Adjacency<'a> = BTreeMap<&'a Intention, Vec<&'a Section>>;

fn adjacency(m: &Map) -> Adjacency<'_> {
    let mut adj: Adjacency = BTreeMap::new();
    for s in m.sections() {
        adj.entry(&s.source).or_default().push(s);
        adj.entry(&s.target).or_default();
    }
    adj
}

fn reachable<'a>(from: &'a Intention, next: &BTreeMap<&'a Intention, Vec<&'a Intention>>) -> BTreeSet<&'a Intention> {
    let mut seen = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(n) = stack.pop() {
        for &m in next.get(n).into_iter().flatten() {
            if seen.insert(m) {
                stack.push(m);
            }
        }
    }
    seen
}

fn is_valid_section_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Diagnostics that do not depend on an ontology: ids, start/stop, the DAG
/// restriction and path coverage.
pub fn structural_diagnostics(m: &Map) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for s in m.sections() {
        if !is_valid_section_id(&s.id) {
            out.push(Diagnostic::new(
                "invalid-section-id",
                &s.id,
                "section ids may only contain ASCII letters, digits, '_' and '-'",
            ));
        }
        if !ids.insert(s.id.as_str()) {
            out.push(Diagnostic::new("duplicate-section-id", &s.id, "section id used more than once"));
        }
        if s.target == Intention::Start {
            out.push(Diagnostic::new("section-targets-start", &s.id, "a section cannot lead to the start intention"));
        }
        if s.source == Intention::Stop {
            out.push(Diagnostic::new("section-leaves-stop", &s.id, "a section cannot leave the stop intention"));
        }
    }
    for sid in m.refinements().keys() {
        if !ids.contains(sid.as_str()) {
            out.push(Diagnostic::new("dangling-refinement", sid, "refinement names a section that does not exist"));
        }
    }

    let has_start = m.sections().iter().any(|s| s.source == Intention::Start);
    let has_stop = m.sections().iter().any(|s| s.target == Intention::Stop);
    let map_id = m.id().as_str();
    if !has_start {
        out.push(Diagnostic::new("no-start-intention", map_id, "no section leaves the start intention"));
    }
    if !has_stop {
        out.push(Diagnostic::new("no-stop-intention", map_id, "no section reaches the stop intention"));
    }

    let adj = adjacency(m);
    if let Some(node) = find_cycle(&adj) {
        out.push(Diagnostic::new("cyclic-sections", node.to_string(), "the section graph contains a cycle"));
    }

    if has_start && has_stop {
        let mut fwd: BTreeMap<&Intention, Vec<&Intention>> = BTreeMap::new();
        let mut back: BTreeMap<&Intention, Vec<&Intention>> = BTreeMap::new();
        for s in m.sections() {
            fwd.entry(&s.source).or_default().push(&s.target);
            back.entry(&s.target).or_default().push(&s.source);
        }
        let from_start = reachable(&Intention::Start, &fwd);
        let to_stop = reachable(&Intention::Stop, &back);
        if !from_start.contains(&Intention::Stop) {
            out.push(Diagnostic::new("no-path", map_id, "the stop intention is not reachable from the start intention"));
        }
        for i in m.ordinary_intentions() {
            if !(from_start.contains(i) && to_stop.contains(i)) {
                out.push(Diagnostic::new(
                    "unreachable-intention",
                    i.to_string(),
                    "intention does not lie on any start-to-stop path",
                ));
            }
        }
    }
    out
}

/// Some node on a cycle, if there is one.
fn find_cycle<'a>(adj: &Adjacency<'a>) -> Option<&'a Intention> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn visit<'a>(n: &'a Intention, adj: &Adjacency<'a>, marks: &mut BTreeMap<&'a Intention, Mark>) -> Option<&'a Intention> {
        match marks.get(n) {
            Some(Mark::Open) => return Some(n),
            Some(Mark::Done) => return None,
            None => {}
        }
        marks.insert(n, Mark::Open);
        for s in adj.get(n).into_iter().flatten() {
            if let Some(c) = visit(&s.target, adj, marks) {
                return Some(c);
            }
        }
        marks.insert(n, Mark::Done);
        None
    }
    let mut marks = BTreeMap::new();
    adj.keys().find_map(|n| visit(n, adj, &mut marks))
}

/// All structural diagnostics plus resolution of verbs, objects and
/// strategies against a closed ontology. Verbs must be typed `map:Verb`,
/// objects `map:Object`; strategy IRIs must be described in the ontology.
pub fn validate_map(m: &Map, ontology: &Graph) -> Vec<Diagnostic> {
    let mut out = structural_diagnostics(m);
    let rdf_type = vocab::rdf_type();
    let verb_class = vocab::term(vocab::MAP, "Verb");
    let object_class = vocab::term(vocab::MAP, "Object");
    let typed = |iri: &Iri, class: &Term| ontology.contains_terms(&Term::from(iri), &rdf_type, class);
    let mut seen = BTreeSet::new();
    for s in m.sections() {
        for i in [&s.source, &s.target] {
            if let Intention::Ordinary { verb, object } = i {
                if !typed(verb, &verb_class) && seen.insert(("v", verb.clone())) {
                    out.push(Diagnostic::new(
                        "unresolved-verb",
                        verb.as_str(),
                        format!("{verb} is not declared as a map:Verb in the ontology"),
                    ));
                }
                if !typed(object, &object_class) && seen.insert(("o", object.clone())) {
                    out.push(Diagnostic::new(
                        "unresolved-object",
                        object.as_str(),
                        format!("{object} is not declared as a map:Object in the ontology"),
                    ));
                }
            }
        }
        if let Some(st) = &s.strategy.iri {
            let known = ontology.pattern(Some(&Term::from(st)), None, None).next().is_some();
            if !known && seen.insert(("s", st.clone())) {
                out.push(Diagnostic::new(
                    "unresolved-strategy",
                    st.as_str(),
                    format!("strategy {st} is not described in the ontology"),
                ));
            }
        }
    }
    out
}

/// Every start-to-stop path, as the sections traversed. Paths come out in
/// lexicographic order of their section ids.
pub fn enumerate_paths(m: &Map) -> Result<Vec<Vec<Section>>, MapError> {
    let diagnostics = structural_diagnostics(m);
    if !diagnostics.is_empty() {
        return Err(MapError::Invalid { map: m.id().clone(), diagnostics });
    }
    let adj = adjacency(m);
    let mut out = Vec::new();
    let mut path: Vec<&Section> = Vec::new();
    fn walk<'a>(at: &'a Intention, adj: &Adjacency<'a>, path: &mut Vec<&'a Section>, out: &mut Vec<Vec<Section>>) {
        if *at == Intention::Stop {
            out.push(path.iter().map(|s| (*s).clone()).collect());
            return;
        }
        for s in adj.get(at).into_iter().flatten() {
            path.push(s);
            walk(&s.target, adj, path, out);
            path.pop();
        }
    }
    walk(&Intention::Start, &adj, &mut path, &mut out);
    Ok(out)
}

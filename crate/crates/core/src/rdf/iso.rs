use std::collections::{BTreeMap, BTreeSet};

use super::{Graph, Term, Triple};

/// Tests whether two graphs are equal up to a bijective renaming of blank
/// nodes. Backtracking search; fine for the graph sizes this crate handles.
pub fn is_isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let (ground_a, blank_a): (Vec<&Triple>, Vec<&Triple>) = a.iter().partition(|t| !has_blank(t));
    let (ground_b, blank_b): (Vec<&Triple>, Vec<&Triple>) = b.iter().partition(|t| !has_blank(t));
    if ground_a != ground_b || blank_a.len() != blank_b.len() {
        return false;
    }
    let nodes_a = blank_nodes(&blank_a);
    let nodes_b = blank_nodes(&blank_b);
    if nodes_a.len() != nodes_b.len() {
        return false;
    }
    let sig_a = signatures(&blank_a);
    let sig_b = signatures(&blank_b);
    let target: BTreeSet<&Triple> = blank_b.iter().copied().collect();
    let mut mapping = BTreeMap::new();
    let mut used = BTreeSet::new();
    search(&nodes_a, 0, &nodes_b, &sig_a, &sig_b, &blank_a, &target, &mut mapping, &mut used)
}

fn has_blank(t: &Triple) -> bool {
    t.subject().is_blank() || t.object().is_blank()
}

fn blank_nodes(triples: &[&Triple]) -> Vec<Term> {
    let mut set = BTreeSet::new();
    for t in triples {
        for term in [t.subject(), t.object()] {
            if term.is_blank() {
                set.insert(term.clone());
            }
        }
    }
    set.into_iter().collect()
}

/// Per blank node: sorted list of (position, predicate, other ground end).
fn signatures(triples: &[&Triple]) -> BTreeMap<Term, Vec<String>> {
    let mut out: BTreeMap<Term, Vec<String>> = BTreeMap::new();
    for t in triples {
        let other = |x: &Term| if x.is_blank() { "_".to_string() } else { x.to_string() };
        if t.subject().is_blank() {
            out.entry(t.subject().clone())
                .or_default()
                .push(format!("s {} {}", t.predicate(), other(t.object())));
        }
        if t.object().is_blank() {
            out.entry(t.object().clone())
                .or_default()
                .push(format!("o {} {}", t.predicate(), other(t.subject())));
        }
    }
    for v in out.values_mut() {
        v.sort();
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn search(
    nodes_a: &[Term],
    idx: usize,
    nodes_b: &[Term],
    sig_a: &BTreeMap<Term, Vec<String>>,
    sig_b: &BTreeMap<Term, Vec<String>>,
    triples_a: &[&Triple],
    target: &BTreeSet<&Triple>,
    mapping: &mut BTreeMap<Term, Term>,
    used: &mut BTreeSet<Term>,
) -> bool {
    if idx == nodes_a.len() {
        return triples_a.iter().all(|t| target.contains(&map_triple(t, mapping)));
    }
    let node = &nodes_a[idx];
    for candidate in nodes_b {
        if used.contains(candidate) || sig_a.get(node) != sig_b.get(candidate) {
            continue;
        }
        mapping.insert(node.clone(), candidate.clone());
        used.insert(candidate.clone());
        let consistent = triples_a.iter().all(|t| {
            let mapped_ok = |x: &Term| !x.is_blank() || mapping.contains_key(x);
            if mapped_ok(t.subject()) && mapped_ok(t.object()) {
                target.contains(&map_triple(t, mapping))
            } else {
                true
            }
        });
        if consistent && search(nodes_a, idx + 1, nodes_b, sig_a, sig_b, triples_a, target, mapping, used) {
            return true;
        }
        mapping.remove(node);
        used.remove(candidate);
    }
    false
}

fn map_triple(t: &Triple, mapping: &BTreeMap<Term, Term>) -> Triple {
    let m = |x: &Term| mapping.get(x).cloned().unwrap_or_else(|| x.clone());
    Triple::new(m(t.subject()), t.predicate().clone(), m(t.object())).expect("blank renaming keeps triples valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Iri;

    fn ex(l: &str) -> Term {
        Term::Iri(Iri::constant(&format!("http://e/{l}")))
    }

    #[test]
    fn relabelled_graphs_are_isomorphic() {
        let mut a = Graph::new();
        a.add(Term::blank("x"), ex("p"), Term::blank("y")).unwrap();
        a.add(Term::blank("y"), ex("q"), ex("c")).unwrap();
        let mut b = Graph::new();
        b.add(Term::blank("m"), ex("p"), Term::blank("n")).unwrap();
        b.add(Term::blank("n"), ex("q"), ex("c")).unwrap();
        assert!(is_isomorphic(&a, &b));
        assert!(is_isomorphic(&a, &a.scope_blanks("z")));
    }

    #[test]
    fn structure_differences_are_detected() {
        let mut a = Graph::new();
        a.add(Term::blank("x"), ex("p"), Term::blank("y")).unwrap();
        a.add(Term::blank("y"), ex("p"), Term::blank("x")).unwrap();
        let mut b = Graph::new();
        b.add(Term::blank("x"), ex("p"), Term::blank("y")).unwrap();
        b.add(Term::blank("y"), ex("p"), Term::blank("z")).unwrap();
        assert!(!is_isomorphic(&a, &b));
        let mut c = Graph::new();
        c.add(ex("a"), ex("p"), ex("b")).unwrap();
        assert!(!is_isomorphic(&c, &Graph::new()));
    }
}

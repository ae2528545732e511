//! The fixed RDFS entailment closure used for subsumption-aware matching.
//!
//! Exactly four rules are applied until nothing new is derived:
//!
//! | rule | premises                                  | conclusion          |
//! |------|-------------------------------------------|---------------------|
//! | R1   | `A subClassOf B`, `B subClassOf C`        | `A subClassOf C`    |
//! | R2   | `p subPropertyOf q`, `q subPropertyOf r`  | `p subPropertyOf r` |
//! | R3   | `x type C`, `C subClassOf D`              | `x type D`          |
//! | R4   | `s p o`, `p subPropertyOf q`              | `s q o`             |
//!
//! Domain/range typing and reflexive subclass statements are not produced.

use std::collections::{BTreeMap, BTreeSet};

use super::{vocab, Graph, Term, Triple};

pub fn rdfs_closure(graph: &Graph) -> Graph {
    let mut out = graph.clone();
    let sub_class = vocab::subclass_of();
    let sub_prop = vocab::subproperty_of();
    let rdf_type = vocab::rdf_type();
    loop {
        let mut derived: Vec<Triple> = Vec::new();

        // R1 and R2 in one pass each: full transitive closure of the relation.
        for rel in [&sub_class, &sub_prop] {
            for (a, c) in transitive_pairs(&out, rel) {
                if let Ok(t) = Triple::new(a, rel.clone(), c) {
                    if !out.contains(&t) {
                        derived.push(t);
                    }
                }
            }
        }

        // R3
        for (x, _, c) in out.pattern(None, Some(&rdf_type), None) {
            for d in out.objects(c, &sub_class) {
                let t = Triple::new(x.clone(), rdf_type.clone(), d.clone()).expect("subject of a stored triple");
                if !out.contains(&t) {
                    derived.push(t);
                }
            }
        }

        // R4
        for (p, _, q) in out.pattern(None, Some(&sub_prop), None) {
            if !q.is_iri() {
                continue;
            }
            for (s, _, o) in out.pattern(None, Some(p), None) {
                let t = Triple::new(s.clone(), q.clone(), o.clone()).expect("q is an IRI");
                if !out.contains(&t) {
                    derived.push(t);
                }
            }
        }

        if derived.is_empty() {
            return out;
        }
        out.extend(derived);
    }
}

/// All `(a, c)` with `a rel+ c`, restricted to pairs usable as triples.
fn transitive_pairs(graph: &Graph, rel: &Term) -> Vec<(Term, Term)> {
    let mut succ: BTreeMap<&Term, BTreeSet<&Term>> = BTreeMap::new();
    for (s, _, o) in graph.pattern(None, Some(rel), None) {
        succ.entry(s).or_default().insert(o);
    }
    let mut out = Vec::new();
    for &start in succ.keys() {
        let mut seen: BTreeSet<&Term> = BTreeSet::new();
        let mut stack: Vec<&Term> = succ[start].iter().copied().collect();
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            if let Some(next) = succ.get(n) {
                stack.extend(next.iter().copied());
            }
        }
        out.extend(seen.into_iter().map(|c| (start.clone(), c.clone())));
    }
    out
}

/// `specific` is `general` or a (transitive) subclass of it in a closed graph.
pub fn is_subsumed_by(closed: &Graph, specific: &Term, general: &Term) -> bool {
    specific == general || closed.contains_terms(specific, &vocab::subclass_of(), general)
}

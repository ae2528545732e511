//! Small random graphs and basic graph patterns, with brute-force reference
//! implementations of matching and of the RDFS closure.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use satis_core::query::Solution;
use satis_core::rdf::{vocab, Graph, Term, Triple};
use satis_core::syntax::{PatternTerm, TriplePattern, Variable};

const EX: &str = "http://example.org/t#";

fn ex(local: &str) -> Term {
    Term::iri(format!("{EX}{local}")).unwrap()
}

pub fn classes() -> Vec<Term> {
    (0..4).map(|i| ex(&format!("C{i}"))).collect()
}

pub fn properties() -> Vec<Term> {
    (0..3).map(|i| ex(&format!("p{i}"))).collect()
}

pub fn individuals() -> Vec<Term> {
    let mut v: Vec<Term> = (0..4).map(|i| ex(&format!("a{i}"))).collect();
    v.push(Term::blank("b0"));
    v.push(Term::blank("b1"));
    v
}

fn literals() -> Vec<Term> {
    vec![Term::literal("l0"), Term::literal("l1")]
}

/// Every term a generated graph or pattern may mention.
pub fn vocabulary() -> Vec<Term> {
    let mut v = classes();
    v.extend(properties());
    v.extend(individuals());
    v.extend(literals());
    v.extend([vocab::rdf_type(), vocab::subclass_of(), vocab::subproperty_of()]);
    v
}

fn pick<R: Rng>(rng: &mut R, v: &[Term]) -> Term {
    v.choose(rng).unwrap().clone()
}

pub fn random_triple<R: Rng>(rng: &mut R) -> Triple {
    let (s, p, o) = match rng.gen_range(0..5) {
        0 => (pick(rng, &individuals()), vocab::rdf_type(), pick(rng, &classes())),
        1 => (pick(rng, &classes()), vocab::subclass_of(), pick(rng, &classes())),
        2 => (pick(rng, &properties()), vocab::subproperty_of(), pick(rng, &properties())),
        3 => {
            let mut objects = individuals();
            objects.extend(literals());
            (pick(rng, &individuals()), pick(rng, &properties()), pick(rng, &objects))
        }
        _ => (pick(rng, &classes()), pick(rng, &properties()), pick(rng, &individuals())),
    };
    Triple::new(s, p, o).unwrap()
}

pub fn random_graph<R: Rng>(rng: &mut R, max_triples: usize) -> Graph {
    let n = rng.gen_range(0..=max_triples);
    (0..n).map(|_| random_triple(rng)).collect()
}

/// A pattern of 1..=3 triple patterns over at most `max_vars` variables.
pub fn random_bgp<R: Rng>(rng: &mut R, max_vars: usize) -> Vec<TriplePattern> {
    let vars: Vec<Variable> = (0..max_vars.max(1)).map(|i| Variable::new(format!("x{i}"))).collect();
    let position = |rng: &mut R, allowed: &[Term]| -> PatternTerm {
        if rng.gen_bool(0.55) {
            PatternTerm::Var(vars.choose(rng).unwrap().clone())
        } else {
            PatternTerm::Term(pick(rng, allowed))
        }
    };
    let mut predicates = properties();
    predicates.extend([vocab::rdf_type(), vocab::subclass_of(), vocab::subproperty_of()]);
    let all = vocabulary();
    (0..rng.gen_range(1..=3))
        .map(|_| {
            let s = position(rng, &all);
            let p = position(rng, &predicates);
            let o = position(rng, &all);
            TriplePattern::new(s, p, o)
        })
        .collect()
}

/// Tries every assignment of graph terms to the pattern variables.
pub fn brute_force_bgp(graph: &Graph, patterns: &[TriplePattern]) -> Vec<Solution> {
    let mut vars: Vec<String> = patterns.iter().flat_map(|p| p.variables().map(|v| v.name().to_string())).collect();
    vars.sort();
    vars.dedup();
    let terms: Vec<Term> = graph.terms().into_iter().collect();
    let mut out = Vec::new();
    let mut assignment: BTreeMap<String, Term> = BTreeMap::new();
    fn go(
        i: usize,
        vars: &[String],
        terms: &[Term],
        assignment: &mut BTreeMap<String, Term>,
        graph: &Graph,
        patterns: &[TriplePattern],
        out: &mut Vec<Solution>,
    ) {
        if i == vars.len() {
            let ground = |pt: &PatternTerm| match pt {
                PatternTerm::Var(v) => assignment[v.name()].clone(),
                PatternTerm::Term(t) => t.clone(),
            };
            let ok = patterns.iter().all(|p| {
                Triple::new(ground(&p.subject), ground(&p.predicate), ground(&p.object))
                    .map(|t| graph.contains(&t))
                    .unwrap_or(false)
            });
            if ok {
                out.push(assignment.iter().map(|(k, v)| (k.clone(), v.clone())).collect());
            }
            return;
        }
        for t in terms {
            assignment.insert(vars[i].clone(), t.clone());
            go(i + 1, vars, terms, assignment, graph, patterns, out);
        }
        assignment.remove(&vars[i]);
    }
    go(0, &vars, &terms, &mut assignment, graph, patterns, &mut out);
    out.sort();
    out
}

/// The four closure rules applied pairwise over all triples until a fixpoint.
pub fn naive_closure(graph: &Graph) -> Graph {
    let sc = vocab::subclass_of();
    let sp = vocab::subproperty_of();
    let ty = vocab::rdf_type();
    let mut g = graph.clone();
    loop {
        let triples: Vec<Triple> = g.iter().cloned().collect();
        let mut new = Vec::new();
        for a in &triples {
            for b in &triples {
                let (s1, p1, o1) = (a.subject(), a.predicate(), a.object());
                let (s2, p2, o2) = (b.subject(), b.predicate(), b.object());
                let derived = if p1 == &sc && p2 == &sc && o1 == s2 {
                    Triple::new(s1.clone(), sc.clone(), o2.clone()).ok()
                } else if p1 == &sp && p2 == &sp && o1 == s2 {
                    Triple::new(s1.clone(), sp.clone(), o2.clone()).ok()
                } else if p1 == &ty && p2 == &sc && o1 == s2 {
                    Triple::new(s1.clone(), ty.clone(), o2.clone()).ok()
                } else if p2 == &sp && p1 == s2 {
                    Triple::new(s1.clone(), o2.clone(), o1.clone()).ok()
                } else {
                    None
                };
                if let Some(t) = derived {
                    if !g.contains(&t) {
                        new.push(t);
                    }
                }
            }
        }
        if new.is_empty() {
            return g;
        }
        g.extend(new);
    }
}

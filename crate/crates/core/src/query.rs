//! Evaluation of the SPARQL subset: basic graph patterns, SELECT and
//! CONSTRUCT.

use std::collections::{BTreeMap, BTreeSet};

use crate::rdf::{rdfs_closure, Graph, Term, Triple};
use crate::syntax::{PatternTerm, Projection, QueryForm, SparqlQuery, TriplePattern, Variable};

/// One assignment of terms to variable names. The derived ordering compares
/// the sorted (variable, term) pairs lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Solution(BTreeMap<String, Term>);

impl Solution {
    pub fn new() -> Self {
        Solution::default()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.0.get(var)
    }

    pub fn insert(&mut self, var: impl Into<String>, term: Term) {
        self.0.insert(var.into(), term);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> + '_ {
        self.0.iter()
    }

    pub fn project(&self, vars: &[Variable]) -> Solution {
        Solution(vars.iter().filter_map(|v| self.0.get(v.name()).map(|t| (v.name().to_string(), t.clone()))).collect())
    }

    /// The term for a pattern position, if it is ground or bound.
    pub fn resolve(&self, p: &PatternTerm) -> Option<Term> {
        match p {
            PatternTerm::Term(t) => Some(t.clone()),
            PatternTerm::Var(v) => self.0.get(v.name()).cloned(),
        }
    }
}

impl FromIterator<(String, Term)> for Solution {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        Solution(iter.into_iter().collect())
    }
}

pub type SolutionSeq = Vec<Solution>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("projection variable ?{0} does not occur in the WHERE clause")]
    UnboundProjection(String),
    #[error("expected a {expected} query")]
    WrongForm { expected: &'static str },
}

/// Solutions of a basic graph pattern. With `entail`, the graph is closed
/// under the RDFS rules first.
pub fn eval_bgp(graph: &Graph, patterns: &[TriplePattern], entail: bool) -> SolutionSeq {
    if entail {
        match_bgp(&rdfs_closure(graph), patterns)
    } else {
        match_bgp(graph, patterns)
    }
}

/// Solutions of a basic graph pattern against `graph` as given, sorted.
pub fn match_bgp(graph: &Graph, patterns: &[TriplePattern]) -> SolutionSeq {
    let order = join_order(patterns);
    let mut out = Vec::new();
    extend(graph, &order, Solution::new(), &mut out);
    out.sort();
    out
}

/// Greedy static order: repeatedly pick the pattern with the fewest variables
/// not bound by the patterns already chosen. Ties keep the written order.
fn join_order(patterns: &[TriplePattern]) -> Vec<&TriplePattern> {
    let mut remaining: Vec<&TriplePattern> = patterns.iter().collect();
    let mut bound: BTreeSet<&str> = BTreeSet::new();
    let mut order = Vec::with_capacity(patterns.len());
    while !remaining.is_empty() {
        let unbound = |p: &TriplePattern| p.variables().filter(|v| !bound.contains(v.name())).count();
        let (idx, _) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(i, p)| (unbound(p), *i))
            .expect("remaining is non-empty");
        let chosen = remaining.remove(idx);
        bound.extend(chosen.variables().map(|v| v.name()));
        order.push(chosen);
    }
    order
}

fn extend(graph: &Graph, patterns: &[&TriplePattern], sol: Solution, out: &mut SolutionSeq) {
    let Some((first, rest)) = patterns.split_first() else {
        out.push(sol);
        return;
    };
    let [s, p, o] = [&first.subject, &first.predicate, &first.object].map(|pt| sol.resolve(pt));
    for (ts, tp, to) in graph.pattern(s.as_ref(), p.as_ref(), o.as_ref()) {
        let mut next = sol.clone();
        if bind(&mut next, &first.subject, ts) && bind(&mut next, &first.predicate, tp) && bind(&mut next, &first.object, to)
        {
            extend(graph, rest, next, out);
        }
    }
}

/// Binds a variable position, failing if it is already bound differently
/// (which happens when a variable repeats inside one pattern).
fn bind(sol: &mut Solution, pt: &PatternTerm, term: &Term) -> bool {
    match pt {
        PatternTerm::Term(t) => t == term,
        PatternTerm::Var(v) => match sol.get(v.name()) {
            Some(existing) => existing == term,
            None => {
                sol.insert(v.name(), term.clone());
                true
            }
        },
    }
}

pub fn eval_select(graph: &Graph, q: &SparqlQuery, entail: bool) -> Result<SolutionSeq, QueryError> {
    if q.form != QueryForm::Select {
        return Err(QueryError::WrongForm { expected: "SELECT" });
    }
    let in_where = q.where_variables();
    if let Projection::Vars(vars) = &q.projection {
        if let Some(v) = vars.iter().find(|v| !in_where.contains(v)) {
            return Err(QueryError::UnboundProjection(v.name().to_string()));
        }
    }
    let solutions = eval_bgp(graph, &q.where_patterns, entail);
    Ok(match &q.projection {
        Projection::All => solutions,
        Projection::Vars(vars) => {
            let mut projected: SolutionSeq = solutions.iter().map(|s| s.project(vars)).collect();
            projected.sort();
            projected
        }
    })
}

pub fn eval_construct(graph: &Graph, q: &SparqlQuery, entail: bool) -> Result<Graph, QueryError> {
    if q.form != QueryForm::Construct {
        return Err(QueryError::WrongForm { expected: "CONSTRUCT" });
    }
    let solutions = eval_bgp(graph, &q.where_patterns, entail);
    let mut out = instantiate(&q.template, &solutions, &graph.blank_labels());
    out.absorb_prefixes(&q.prefixes);
    Ok(out)
}

/// Instantiates a template once per solution. Blank nodes in the template get
/// fresh labels per solution, avoiding `taken`. Triples with an unbound
/// variable, or that would be ill-formed after substitution, are skipped.
pub fn instantiate(template: &[TriplePattern], solutions: &[Solution], taken: &BTreeSet<String>) -> Graph {
    let mut out = Graph::new();
    let mut counter = 0usize;
    let mut fresh = || loop {
        counter += 1;
        let label = format!("c{counter}");
        if !taken.contains(&label) {
            return label;
        }
    };
    for sol in solutions {
        let mut blanks: BTreeMap<String, Term> = BTreeMap::new();
        let mut term = |pt: &PatternTerm| -> Option<Term> {
            match pt {
                PatternTerm::Term(Term::Blank(b)) => {
                    Some(blanks.entry(b.label().to_string()).or_insert_with(|| Term::blank(fresh())).clone())
                }
                other => sol.resolve(other),
            }
        };
        for tp in template {
            let (Some(s), Some(p), Some(o)) = (term(&tp.subject), term(&tp.predicate), term(&tp.object)) else {
                continue;
            };
            if let Ok(t) = Triple::new(s, p, o) {
                out.insert(t);
            }
        }
    }
    out
}

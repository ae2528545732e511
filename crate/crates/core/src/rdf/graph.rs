use std::collections::{BTreeMap, BTreeSet};
use std::ops::Bound;

use super::{RdfError, Term, Triple};

type Key = (Term, Term, Term);

/// A set of triples with SPO, POS and OSP indexes plus a prefix table.
///
/// Iteration always follows the canonical SPO order, so two walks over the
/// same graph produce the same sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    spo: BTreeSet<Triple>,
    pos: BTreeSet<Key>,
    osp: BTreeSet<Key>,
    prefixes: BTreeMap<String, String>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a triple, returning `true` if it was not already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.spo.contains(&triple) {
            return false;
        }
        let (s, p, o) = (triple.subject().clone(), triple.predicate().clone(), triple.object().clone());
        self.pos.insert((p.clone(), o.clone(), s.clone()));
        self.osp.insert((o, s, p));
        self.spo.insert(triple);
        true
    }

    /// Builds and inserts a triple in one step.
    pub fn add(&mut self, s: impl Into<Term>, p: impl Into<Term>, o: impl Into<Term>) -> Result<bool, RdfError> {
        Ok(self.insert(Triple::new(s, p, o)?))
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        if !self.spo.remove(triple) {
            return false;
        }
        let (s, p, o) = (triple.subject().clone(), triple.predicate().clone(), triple.object().clone());
        self.pos.remove(&(p.clone(), o.clone(), s.clone()));
        self.osp.remove(&(o, s, p));
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.spo.contains(triple)
    }

    pub fn contains_terms(&self, s: &Term, p: &Term, o: &Term) -> bool {
        self.pos.contains(&(p.clone(), o.clone(), s.clone()))
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.spo.iter()
    }

    pub fn prefixes(&self) -> &BTreeMap<String, String> {
        &self.prefixes
    }

    pub fn set_prefix(&mut self, label: impl Into<String>, namespace: impl Into<String>) {
        self.prefixes.insert(label.into(), namespace.into());
    }

    /// Adds prefixes from `other` whose labels are not yet bound here.
    pub fn absorb_prefixes(&mut self, other: &BTreeMap<String, String>) {
        for (label, ns) in other {
            self.prefixes.entry(label.clone()).or_insert_with(|| ns.clone());
        }
    }

    /// Every triple matching the given bound positions, in `(s, p, o)` form.
    /// The index used depends on which positions are bound.
    pub fn pattern<'a>(
        &'a self,
        s: Option<&'a Term>,
        p: Option<&'a Term>,
        o: Option<&'a Term>,
    ) -> Box<dyn Iterator<Item = (&'a Term, &'a Term, &'a Term)> + 'a> {
        match (s, p, o) {
            (Some(s), Some(p), Some(o)) => {
                if self.contains_terms(s, p, o) {
                    Box::new(std::iter::once((s, p, o)))
                } else {
                    Box::new(std::iter::empty())
                }
            }
            (Some(s), p, o) => Box::new(
                self.spo
                    .range((Bound::Included(Triple::lower_bound(s)), Bound::Unbounded))
                    .take_while(move |t| t.subject() == s)
                    .filter(move |t| p.is_none_or(|p| t.predicate() == p) && o.is_none_or(|o| t.object() == o))
                    .map(|t| (t.subject(), t.predicate(), t.object())),
            ),
            (None, Some(p), o) => Box::new(
                range_prefix(&self.pos, p)
                    .filter(move |(_, ko, _)| o.is_none_or(|o| ko == o))
                    .map(|(kp, ko, ks)| (ks, kp, ko)),
            ),
            (None, None, Some(o)) => Box::new(range_prefix(&self.osp, o).map(|(ko, ks, kp)| (ks, kp, ko))),
            (None, None, None) => Box::new(self.spo.iter().map(|t| (t.subject(), t.predicate(), t.object()))),
        }
    }

    /// Distinct terms occurring anywhere in the graph, in canonical order.
    pub fn terms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        for t in &self.spo {
            out.insert(t.subject().clone());
            out.insert(t.predicate().clone());
            out.insert(t.object().clone());
        }
        out
    }

    pub fn blank_labels(&self) -> BTreeSet<String> {
        self.terms()
            .into_iter()
            .filter_map(|t| t.as_blank().map(|b| b.label().to_owned()))
            .collect()
    }

    /// Objects of `(subject, predicate, ?)`.
    pub fn objects<'a>(&'a self, subject: &'a Term, predicate: &'a Term) -> impl Iterator<Item = &'a Term> + 'a {
        self.pattern(Some(subject), Some(predicate), None).map(|(_, _, o)| o)
    }

    /// Subjects of `(?, predicate, object)`.
    pub fn subjects<'a>(&'a self, predicate: &'a Term, object: &'a Term) -> impl Iterator<Item = &'a Term> + 'a {
        self.pattern(None, Some(predicate), Some(object)).map(|(s, _, _)| s)
    }

    /// Set union. Prefix labels bound in `self` win over those in `other`.
    /// Blank nodes are compared by label, so graphs coming from different
    /// documents should be scoped with [`Graph::scope_blanks`] first.
    pub fn merge(&self, other: &Graph) -> Graph {
        let mut out = self.clone();
        out.extend(other.iter().cloned());
        out.absorb_prefixes(&other.prefixes);
        out
    }

    /// Renames every blank node `_:b` to `_:{scope}{b}`.
    pub fn scope_blanks(&self, scope: &str) -> Graph {
        let rename = |t: &Term| match t {
            Term::Blank(b) => Term::blank(format!("{scope}{}", b.label())),
            other => other.clone(),
        };
        let mut out = Graph::new();
        out.prefixes = self.prefixes.clone();
        for t in &self.spo {
            let triple = Triple::new(rename(t.subject()), t.predicate().clone(), rename(t.object()))
                .expect("renaming blank nodes preserves triple validity");
            out.insert(triple);
        }
        out
    }

    pub fn is_subset_of(&self, other: &Graph) -> bool {
        self.spo.iter().all(|t| other.contains(t))
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}

fn range_prefix<'a>(set: &'a BTreeSet<Key>, first: &'a Term) -> impl Iterator<Item = &'a (Term, Term, Term)> + 'a {
    set.range((Bound::Included((first.clone(), Term::min_value(), Term::min_value())), Bound::Unbounded))
        .take_while(move |k| &k.0 == first)
}

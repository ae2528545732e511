//! Backward chaining from a goal section down to concrete rules.
//!
//! Each goal becomes a node whose alternatives are the applicable rules. A
//! concrete rule is evaluated against the service annotations and yields a
//! candidate set. An abstract rule contributes one alternative per
//! start-to-stop path of its body map, each with one subgoal per section on
//! the path that reaches an ordinary intention.

mod goal;
mod plans;
mod report;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

pub use goal::{parse_goal, Goal, GoalError};
pub use plans::{enumerate_plans, Choice, Leaf, Plan};
pub use report::{explain, to_dot, Report};

use crate::fragment::{Rule, RuleBase, RuleKind, SectionSignature};
use crate::map::{enumerate_paths, Intention, Section};
use crate::memory::Memory;
use crate::query::match_bgp;
use crate::rdf::{vocab, Graph, Iri, Term};

pub const DEFAULT_MAX_DEPTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Deepest goal expanded; the root is at depth 1.
    pub max_depth: usize,
    /// Use the RDFS closure for service matching and subsumption.
    pub entail: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_depth: DEFAULT_MAX_DEPTH, entail: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Solved,
    Failed,
    PrunedCycle,
    PrunedDepth,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::Failed => "failed",
            Status::PrunedCycle => "pruned-cycle",
            Status::PrunedDepth => "pruned-depth",
        }
    }

    /// Status of something that needs one of `statuses` to be solved.
    /// Failure dominates pruning, and cycle pruning dominates depth.
    fn unsolved(statuses: impl IntoIterator<Item = Status>) -> Status {
        statuses.into_iter().filter(|s| *s != Status::Solved).min().unwrap_or(Status::Failed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlternativeKind {
    Concrete { candidates: BTreeSet<Iri> },
    Abstract {
        /// Index of the followed path among the body map's paths.
        path_index: usize,
        /// Section ids along the path.
        path: Vec<String>,
        children: Vec<ResolutionNode>,
    },
    /// The rule could not be expanded, e.g. its body map does not decode.
    Broken { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alternative {
    pub rule: Iri,
    pub kind: AlternativeKind,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionNode {
    pub goal: Goal,
    pub depth: usize,
    pub alternatives: Vec<Alternative>,
    pub status: Status,
}

impl ResolutionNode {
    pub fn is_solved(&self) -> bool {
        self.status == Status::Solved
    }
}

fn superclasses(ontology: &Graph, entail: bool, iri: &Iri) -> Vec<Iri> {
    let mut out = vec![iri.clone()];
    if entail {
        let sub = vocab::subclass_of();
        let t = Term::from(iri);
        out.extend(ontology.objects(&t, &sub).filter_map(|o| o.as_iri().cloned()));
    }
    out.sort();
    out.dedup();
    out
}

fn subsumed(ontology: &Graph, entail: bool, specific: &Iri, general: &Iri) -> bool {
    specific == general
        || (entail && ontology.contains_terms(&Term::from(specific), &vocab::subclass_of(), &Term::from(general)))
}

/// Whether a rule signature applies to a goal. Target slots match when the
/// signature's are equal to or subsume the goal's; absent signature slots
/// match anything; present ones need a matching goal slot.
pub fn signature_matches(sig: &SectionSignature, g: &Goal, ontology: &Graph, entail: bool) -> bool {
    let sub = |a: &Iri, b: &Iri| subsumed(ontology, entail, a, b);
    if !sub(&g.target_verb, &sig.target_verb) || !sub(&g.target_object, &sig.target_object) {
        return false;
    }
    let source_ok = match (&sig.source, &g.source) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(Intention::Ordinary { verb: sv, object: so }), Some(Intention::Ordinary { verb: gv, object: go })) => {
            sub(gv, sv) && sub(go, so)
        }
        (Some(a), Some(b)) => a == b,
    };
    let strategy_ok = match (&sig.strategy, &g.strategy) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(s), Some(gs)) => sub(gs, s),
    };
    source_ok && strategy_ok
}

fn applicable<'a>(g: &Goal, rb: &'a RuleBase, ontology: &Graph, entail: bool) -> Vec<&'a Rule> {
    let mut ids: Vec<&Iri> = Vec::new();
    for v in superclasses(ontology, entail, &g.target_verb) {
        for o in superclasses(ontology, entail, &g.target_object) {
            ids.extend(rb.by_target(&v, &o));
        }
    }
    ids.sort();
    ids.dedup();
    ids.into_iter()
        .filter(|id| rb.signature(id).is_some_and(|sig| signature_matches(sig, g, ontology, entail)))
        .filter_map(|id| rb.get(id))
        .collect()
}

/// Concrete and abstract rules whose conclusion matches the goal, in rule
/// id order. `ontology` must be closed.
pub fn applicable_rules<'a>(g: &Goal, rb: &'a RuleBase, ontology: &Graph) -> Vec<&'a Rule> {
    applicable(g, rb, ontology, true)
}

/// Replaces every IRI by the smallest IRI of its subclass-equivalence class,
/// so that goals equal up to equivalent classes compare equal.
fn normalize(g: &Goal, ontology: &Graph, entail: bool) -> Goal {
    let canon = |i: &Iri| -> Iri {
        if !entail {
            return i.clone();
        }
        let sub = vocab::subclass_of();
        let t = Term::from(i);
        ontology
            .objects(&t, &sub)
            .filter(|o| ontology.contains_terms(o, &sub, &t))
            .filter_map(|o| o.as_iri())
            .chain(std::iter::once(i))
            .min()
            .expect("chain is non-empty")
            .clone()
    };
    Goal {
        target_verb: canon(&g.target_verb),
        target_object: canon(&g.target_object),
        source: g.source.as_ref().map(|s| match s {
            Intention::Ordinary { verb, object } => Intention::Ordinary { verb: canon(verb), object: canon(object) },
            other => other.clone(),
        }),
        strategy: g.strategy.as_ref().map(canon),
    }
}

struct Resolver<'a> {
    memory: &'a Memory,
    dataset: Graph,
    limits: Limits,
    body_maps: BTreeMap<Iri, Result<Vec<Vec<Section>>, String>>,
    candidates: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl Resolver<'_> {
    fn node(&mut self, goal: Goal, depth: usize, ancestors: &mut Vec<Goal>) -> ResolutionNode {
        let key = normalize(&goal, &self.memory.ontology, self.limits.entail);
        if ancestors.contains(&key) {
            return ResolutionNode { goal, depth, alternatives: Vec::new(), status: Status::PrunedCycle };
        }
        if depth > self.limits.max_depth {
            return ResolutionNode { goal, depth, alternatives: Vec::new(), status: Status::PrunedDepth };
        }
        ancestors.push(key);
        let rules: Vec<Rule> = applicable(&goal, &self.memory.rulebase, &self.memory.ontology, self.limits.entail)
            .into_iter()
            .cloned()
            .collect();
        let mut alternatives = Vec::new();
        for rule in &rules {
            match rule.kind {
                RuleKind::Concrete => {
                    let candidates = self.concrete_candidates(rule);
                    let status = if candidates.is_empty() { Status::Failed } else { Status::Solved };
                    alternatives.push(Alternative {
                        rule: rule.id.clone(),
                        kind: AlternativeKind::Concrete { candidates },
                        status,
                    });
                }
                RuleKind::Abstract => alternatives.extend(self.abstract_alternatives(rule, depth, ancestors)),
                RuleKind::MapBuilder => {}
            }
        }
        ancestors.pop();
        let status = if alternatives.iter().any(|a| a.status == Status::Solved) {
            Status::Solved
        } else {
            Status::unsolved(alternatives.iter().map(|a| a.status))
        };
        ResolutionNode { goal, depth, alternatives, status }
    }

    fn concrete_candidates(&mut self, rule: &Rule) -> BTreeSet<Iri> {
        if let Some(c) = self.candidates.get(&rule.id) {
            return c.clone();
        }
        let found: BTreeSet<Iri> = match_bgp(&self.dataset, rule.premise())
            .iter()
            .flat_map(|sol| rule.service_variables.iter().filter_map(|v| sol.get(v.name())))
            .filter_map(|t| t.as_iri().cloned())
            .collect();
        self.candidates.insert(rule.id.clone(), found.clone());
        found
    }

    fn abstract_alternatives(&mut self, rule: &Rule, depth: usize, ancestors: &mut Vec<Goal>) -> Vec<Alternative> {
        let rb = &self.memory.rulebase;
        let decoded = self
            .body_maps
            .entry(rule.id.clone())
            .or_insert_with(|| {
                let map = rb.body_map(&rule.id).map_err(|e| e.to_string())?;
                enumerate_paths(&map).map_err(|e| e.to_string())
            })
            .clone();
        let paths = match decoded {
            Ok(paths) => paths,
            Err(reason) => {
                return vec![Alternative {
                    rule: rule.id.clone(),
                    kind: AlternativeKind::Broken { reason },
                    status: Status::Failed,
                }]
            }
        };
        let mut out = Vec::new();
        for (path_index, path) in paths.iter().enumerate() {
            let children: Vec<ResolutionNode> = path
                .iter()
                .filter_map(Goal::from_section)
                .map(|g| self.node(g, depth + 1, ancestors))
                .collect();
            let status = if children.iter().all(ResolutionNode::is_solved) {
                Status::Solved
            } else {
                Status::unsolved(children.iter().map(|c| c.status))
            };
            out.push(Alternative {
                rule: rule.id.clone(),
                kind: AlternativeKind::Abstract {
                    path_index,
                    path: path.iter().map(|s| s.id.clone()).collect(),
                    children,
                },
                status,
            });
        }
        out
    }
}

/// Builds the full resolution tree for a goal, failed and pruned branches
/// included. `limits.max_depth` must be at least 1.
pub fn resolve(goal: &Goal, memory: &Memory, limits: Limits) -> ResolutionNode {
    let mut r = Resolver {
        memory,
        dataset: memory.dataset(limits.entail),
        limits: Limits { max_depth: limits.max_depth.max(1), ..limits },
        body_maps: BTreeMap::new(),
        candidates: BTreeMap::new(),
    };
    r.node(goal.clone(), 1, &mut Vec::new())
}

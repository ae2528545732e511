use std::collections::BTreeSet;

use super::{AlternativeKind, Goal, ResolutionNode, Status};
use crate::rdf::Iri;

/// One decision point of a plan: the rule chosen for a goal and, for an
/// abstract rule, the followed path of its body map.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Choice {
    pub goal: Goal,
    pub rule: Iri,
    pub path: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Leaf {
    pub goal: Goal,
    pub rule: Iri,
    pub candidates: BTreeSet<Iri>,
}

/// One consistent selection through a solved resolution tree. Choices are
/// listed in depth-first order; leaves are the concrete choices among them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Plan {
    pub choices: Vec<Choice>,
    pub leaves: Vec<Leaf>,
}

impl Plan {
    fn sort_key(&self) -> Vec<(&Iri, Option<&Vec<String>>)> {
        self.choices.iter().map(|c| (&c.rule, c.path.as_ref())).collect()
    }
}

fn node_plans(node: &ResolutionNode) -> Vec<Plan> {
    if node.status != Status::Solved {
        return Vec::new();
    }
    let mut out = Vec::new();
    for alt in node.alternatives.iter().filter(|a| a.status == Status::Solved) {
        match &alt.kind {
            AlternativeKind::Concrete { candidates } => out.push(Plan {
                choices: vec![Choice { goal: node.goal.clone(), rule: alt.rule.clone(), path: None }],
                leaves: vec![Leaf { goal: node.goal.clone(), rule: alt.rule.clone(), candidates: candidates.clone() }],
            }),
            AlternativeKind::Abstract { path, children, .. } => {
                let head = Choice { goal: node.goal.clone(), rule: alt.rule.clone(), path: Some(path.clone()) };
                let mut partial = vec![Plan { choices: vec![head], leaves: Vec::new() }];
                for child in children {
                    let sub = node_plans(child);
                    partial = partial
                        .iter()
                        .flat_map(|p| {
                            sub.iter().map(move |s| {
                                let mut p = p.clone();
                                p.choices.extend(s.choices.iter().cloned());
                                p.leaves.extend(s.leaves.iter().cloned());
                                p
                            })
                        })
                        .collect();
                }
                out.extend(partial);
            }
            AlternativeKind::Broken { .. } => {}
        }
    }
    out
}

/// Every plan of a resolution tree, ordered by the chosen rule ids.
pub fn enumerate_plans(root: &ResolutionNode) -> Vec<Plan> {
    let mut plans = node_plans(root);
    plans.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    plans
}

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::{AlternativeKind, Goal, Plan, ResolutionNode, Status};
use crate::rdf::Iri;
use crate::syntax::abbreviate_iri;

type Prefixes = BTreeMap<String, String>;

fn short(iri: &Iri, prefixes: &Prefixes) -> String {
    abbreviate_iri(iri, prefixes)
}

fn short_list<'a>(iris: impl IntoIterator<Item = &'a Iri>, prefixes: &Prefixes) -> Vec<String> {
    iris.into_iter().map(|i| short(i, prefixes)).collect()
}

/// Indented trace of a resolution tree: goals, the rules tried for each,
/// and why they matched, failed or were pruned.
pub fn explain(root: &ResolutionNode, prefixes: &Prefixes) -> String {
    let mut out = String::new();
    explain_node(root, prefixes, 0, &mut out);
    out
}

fn explain_node(node: &ResolutionNode, prefixes: &Prefixes, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    let goal = node.goal.render(prefixes);
    let _ = writeln!(out, "{pad}goal {goal} [{}]", node.status.as_str());
    match node.status {
        Status::PrunedCycle => {
            let _ = writeln!(out, "{pad}  pruned: goal repeats an ancestor: {goal}");
            return;
        }
        Status::PrunedDepth => {
            let _ = writeln!(out, "{pad}  pruned: depth {} exceeds the limit", node.depth);
            return;
        }
        _ => {}
    }
    if node.alternatives.is_empty() {
        let _ = writeln!(out, "{pad}  no applicable rule");
    }
    for alt in &node.alternatives {
        let rule = short(&alt.rule, prefixes);
        match &alt.kind {
            AlternativeKind::Concrete { candidates } if candidates.is_empty() => {
                let _ = writeln!(out, "{pad}  rule {rule} (concrete) [failed]: no matching service");
            }
            AlternativeKind::Concrete { candidates } => {
                let _ = writeln!(
                    out,
                    "{pad}  rule {rule} (concrete) [solved]: matched services: {}",
                    short_list(candidates, prefixes).join(", ")
                );
            }
            AlternativeKind::Abstract { path, children, .. } => {
                let _ = writeln!(
                    out,
                    "{pad}  rule {rule} (abstract) path {} [{}]",
                    path.join(" -> "),
                    alt.status.as_str()
                );
                for child in children {
                    explain_node(child, prefixes, indent + 2, out);
                }
            }
            AlternativeKind::Broken { reason } => {
                let _ = writeln!(out, "{pad}  rule {rule} (abstract) [failed]: {reason}");
            }
        }
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz digraph of the tree. Goal nodes are boxes, rule alternatives
/// ellipses; solved elements are drawn solid and everything else dashed.
pub fn to_dot(root: &ResolutionNode, prefixes: &Prefixes) -> String {
    let mut out = String::from("digraph resolution {\n  rankdir=TB;\n");
    let mut next = 0usize;
    dot_node(root, prefixes, &mut next, &mut out);
    out.push_str("}\n");
    out
}

fn style(status: Status) -> &'static str {
    if status == Status::Solved {
        "solid"
    } else {
        "dashed"
    }
}

fn dot_node(node: &ResolutionNode, prefixes: &Prefixes, next: &mut usize, out: &mut String) -> String {
    let id = format!("g{next}");
    *next += 1;
    let label = format!("{}\\n{}", dot_escape(&node.goal.render(prefixes)), node.status.as_str());
    let _ = writeln!(out, "  {id} [shape=box, style={}, label=\"{label}\"];", style(node.status));
    for alt in &node.alternatives {
        let aid = format!("a{next}");
        *next += 1;
        let mut label = dot_escape(&short(&alt.rule, prefixes));
        match &alt.kind {
            AlternativeKind::Concrete { candidates } => {
                label.push_str("\\n");
                label.push_str(&dot_escape(&short_list(candidates, prefixes).join(", ")));
            }
            AlternativeKind::Abstract { path, .. } => {
                label.push_str("\\n");
                label.push_str(&dot_escape(&path.join(" -> ")));
            }
            AlternativeKind::Broken { .. } => label.push_str("\\nbroken"),
        }
        let _ = writeln!(out, "  {aid} [shape=ellipse, style={}, label=\"{label}\"];", style(alt.status));
        let _ = writeln!(out, "  {id} -> {aid} [style={}];", style(alt.status));
        if let AlternativeKind::Abstract { children, .. } = &alt.kind {
            for child in children {
                let cid = dot_node(child, prefixes, next, out);
                let _ = writeln!(out, "  {aid} -> {cid} [style={}];", style(child.status));
            }
        }
    }
    id
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GoalJson {
    pub verb: String,
    pub object: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_verb: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_object: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
}

impl GoalJson {
    fn new(g: &Goal, prefixes: &Prefixes) -> Self {
        use crate::map::Intention;
        let (source, source_verb, source_object) = match &g.source {
            None => (None, None, None),
            Some(Intention::Start) => (Some("start".to_string()), None, None),
            Some(Intention::Stop) => (Some("stop".to_string()), None, None),
            Some(Intention::Ordinary { verb, object }) => {
                (None, Some(short(verb, prefixes)), Some(short(object, prefixes)))
            }
        };
        GoalJson {
            verb: short(&g.target_verb, prefixes),
            object: short(&g.target_object, prefixes),
            source,
            source_verb,
            source_object,
            strategy: g.strategy.as_ref().map(|s| short(s, prefixes)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChoiceJson {
    pub goal: GoalJson,
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafJson {
    pub goal: GoalJson,
    pub rule: String,
    pub candidates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanJson {
    pub choices: Vec<ChoiceJson>,
    pub leaves: Vec<LeafJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AlternativeJson {
    pub rule: String,
    pub kind: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub children: Option<Vec<NodeJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeJson {
    pub goal: GoalJson,
    pub status: Status,
    pub alternatives: Vec<AlternativeJson>,
}

impl NodeJson {
    fn new(n: &ResolutionNode, prefixes: &Prefixes) -> Self {
        let alternatives = n
            .alternatives
            .iter()
            .map(|a| {
                let mut j = AlternativeJson {
                    rule: short(&a.rule, prefixes),
                    kind: "abstract",
                    status: a.status,
                    candidates: None,
                    path: None,
                    children: None,
                    reason: None,
                };
                match &a.kind {
                    AlternativeKind::Concrete { candidates } => {
                        j.kind = "concrete";
                        j.candidates = Some(short_list(candidates, prefixes));
                    }
                    AlternativeKind::Abstract { path, children, .. } => {
                        j.path = Some(path.clone());
                        j.children = Some(children.iter().map(|c| NodeJson::new(c, prefixes)).collect());
                    }
                    AlternativeKind::Broken { reason } => j.reason = Some(reason.clone()),
                }
                j
            })
            .collect();
        NodeJson { goal: GoalJson::new(&n.goal, prefixes), status: n.status, alternatives }
    }
}

/// Machine-readable result of one resolution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub goal: GoalJson,
    pub plan_count: usize,
    pub plans: Vec<PlanJson>,
    pub trace: NodeJson,
}

impl Report {
    pub fn new(root: &ResolutionNode, plans: &[Plan], prefixes: &Prefixes) -> Self {
        let plans = plans
            .iter()
            .map(|p| PlanJson {
                choices: p
                    .choices
                    .iter()
                    .map(|c| ChoiceJson {
                        goal: GoalJson::new(&c.goal, prefixes),
                        rule: short(&c.rule, prefixes),
                        path: c.path.clone(),
                    })
                    .collect(),
                leaves: p
                    .leaves
                    .iter()
                    .map(|l| LeafJson {
                        goal: GoalJson::new(&l.goal, prefixes),
                        rule: short(&l.rule, prefixes),
                        candidates: short_list(&l.candidates, prefixes),
                    })
                    .collect(),
            })
            .collect::<Vec<_>>();
        Report {
            goal: GoalJson::new(&root.goal, prefixes),
            plan_count: plans.len(),
            plans,
            trace: NodeJson::new(root, prefixes),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

//! Random memories described as plain data, plus an exhaustive forward
//! planner over that data which never touches the resolver or the rule
//! compiler. Shared by the resolver property tests and the acceptance run.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use satis_core::fragment::{fragment_from_manifest, parse_manifest};
use satis_core::memory::Memory;
use satis_core::rdf::Iri;
use satis_core::registry::ServiceDescription;
use satis_core::resolver::{Goal, Plan};
use satis_core::syntax::parse_turtle;
use serde_json::json;

pub const DOM: &str = "http://satis.example/domain#";
pub const FRAG: &str = "http://satis.example/fragments#";

pub const VERBS: usize = 4;
pub const OBJECTS: usize = 2;
pub const CONCEPTS: usize = 4;
pub const STRATEGIES: usize = 2;

// O1 is a subclass of O0 and St1 of St0; nothing else is related.
fn obj_sub(a: usize, b: usize) -> bool {
    a == b || (a == 1 && b == 0)
}

fn strat_sub(a: usize, b: usize) -> bool {
    a == b || (a == 1 && b == 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum End {
    Start,
    Stop,
    Int(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sig {
    pub verb: usize,
    pub object: usize,
    pub source: Option<End>,
    pub strategy: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SecStrategy {
    None,
    Label,
    Iri(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sec {
    pub id: String,
    pub source: End,
    pub target: End,
    pub strategy: SecStrategy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    Query { output: usize, input: Option<usize> },
    Map(Vec<Sec>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frag {
    pub name: String,
    pub sig: Sig,
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Svc {
    pub name: String,
    pub input: usize,
    pub outputs: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spec {
    pub services: Vec<Svc>,
    pub fragments: Vec<Frag>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OGoal {
    pub verb: usize,
    pub object: usize,
    pub source: Option<End>,
    pub strategy: Option<usize>,
}

fn random_intention<R: Rng>(rng: &mut R) -> End {
    End::Int(rng.gen_range(0..VERBS), rng.gen_range(0..OBJECTS))
}

fn random_map<R: Rng>(rng: &mut R) -> Vec<Sec> {
    let k = rng.gen_range(1..=3);
    let mut ints: Vec<End> = Vec::new();
    while ints.len() < k {
        let i = random_intention(rng);
        if !ints.contains(&i) {
            ints.push(i);
        }
    }
    let mut nodes = vec![End::Start];
    nodes.extend(ints.iter().copied());
    nodes.push(End::Stop);
    let mut edges: Vec<(usize, usize)> = (0..nodes.len() - 1).map(|i| (i, i + 1)).collect();
    for _ in 0..rng.gen_range(0..=2) {
        let a = rng.gen_range(0..nodes.len() - 1);
        let b = rng.gen_range(a + 1..nodes.len());
        if !(a == 0 && b == nodes.len() - 1) {
            edges.push((a, b));
        }
    }
    edges
        .into_iter()
        .enumerate()
        .map(|(n, (a, b))| Sec {
            id: format!("s{}", n + 1),
            source: nodes[a],
            target: nodes[b],
            strategy: match rng.gen_range(0..4) {
                0 => SecStrategy::Label,
                1 => SecStrategy::Iri(rng.gen_range(0..STRATEGIES)),
                _ => SecStrategy::None,
            },
        })
        .collect()
}

/// A memory with at most `max_fragments` fragments and `max_services`
/// services over a small fixed vocabulary.
pub fn random_spec<R: Rng>(rng: &mut R, max_fragments: usize, max_services: usize) -> Spec {
    let services = (0..rng.gen_range(0..=max_services))
        .map(|n| {
            let mut outputs = BTreeSet::from([rng.gen_range(0..CONCEPTS)]);
            if rng.gen_bool(0.3) {
                outputs.insert(rng.gen_range(0..CONCEPTS));
            }
            Svc { name: format!("S{n}"), input: rng.gen_range(0..OBJECTS), outputs }
        })
        .collect();
    let fragments = (0..rng.gen_range(1..=max_fragments))
        .map(|n| {
            let source = match rng.gen_range(0..4) {
                0 => Some(End::Start),
                1 => Some(random_intention(rng)),
                _ => None,
            };
            let strategy = rng.gen_bool(0.25).then(|| rng.gen_range(0..STRATEGIES));
            let sig = Sig { verb: rng.gen_range(0..VERBS), object: rng.gen_range(0..OBJECTS), source, strategy };
            let body = if rng.gen_bool(0.55) {
                Body::Query {
                    output: rng.gen_range(0..CONCEPTS),
                    input: rng.gen_bool(0.3).then(|| rng.gen_range(0..OBJECTS)),
                }
            } else {
                Body::Map(random_map(rng))
            };
            Frag { name: format!("f{n}"), sig, body }
        })
        .collect();
    Spec { services, fragments }
}

/// A goal that targets some fragment's intention most of the time.
pub fn random_goal<R: Rng>(rng: &mut R, spec: &Spec) -> OGoal {
    let (verb, object) = match spec.fragments.choose(rng) {
        Some(f) if rng.gen_bool(0.8) => (f.sig.verb, f.sig.object),
        _ => (rng.gen_range(0..VERBS), rng.gen_range(0..OBJECTS)),
    };
    let source = match rng.gen_range(0..6) {
        0 => Some(End::Start),
        1 => Some(random_intention(rng)),
        _ => None,
    };
    OGoal { verb, object, source, strategy: rng.gen_bool(0.1).then(|| rng.gen_range(0..STRATEGIES)) }
}

fn v(i: usize) -> String {
    format!("dom:V{i}")
}
fn o(i: usize) -> String {
    format!("dom:O{i}")
}
fn c(i: usize) -> String {
    format!("dom:C{i}")
}
fn st(i: usize) -> String {
    format!("dom:St{i}")
}

fn iri(curie: &str) -> Iri {
    Iri::new(curie.replacen("dom:", DOM, 1)).unwrap()
}

pub fn ontology_ttl() -> String {
    let mut t = String::from(
        "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\
         @prefix map: <http://satis.example/map#> .\n\
         @prefix dom: <http://satis.example/domain#> .\n\
         @prefix frag: <http://satis.example/fragments#> .\n",
    );
    for i in 0..VERBS {
        t.push_str(&format!("{} a map:Verb .\n", v(i)));
    }
    for i in 0..OBJECTS {
        t.push_str(&format!("{} a map:Object , rdfs:Class .\n", o(i)));
    }
    t.push_str("dom:O1 rdfs:subClassOf dom:O0 .\n");
    for i in 0..CONCEPTS {
        t.push_str(&format!("{} a rdfs:Class .\n", c(i)));
    }
    for i in 0..STRATEGIES {
        t.push_str(&format!("{} a map:Strategy , rdfs:Class .\n", st(i)));
    }
    t.push_str("dom:St1 rdfs:subClassOf dom:St0 .\n");
    t
}

fn end_json(e: &End) -> serde_json::Value {
    match e {
        End::Start => json!("start"),
        End::Stop => json!("stop"),
        End::Int(a, b) => json!({"verb": v(*a), "object": o(*b)}),
    }
}

pub fn manifest_json(f: &Frag) -> serde_json::Value {
    let mut sig = json!({"target": {"verb": v(f.sig.verb), "object": o(f.sig.object)}});
    if let Some(s) = &f.sig.source {
        sig["source"] = end_json(s);
    }
    if let Some(s) = f.sig.strategy {
        sig["strategy"] = json!(st(s));
    }
    let (kind, body) = match &f.body {
        Body::Query { output, input } => {
            let mut q = format!("?service a owls:Service ; owls:hasOutput {} .", c(*output));
            if let Some(i) = input {
                q.push_str(&format!(" ?service owls:hasInput {} .", o(*i)));
            }
            ("operational", json!({"sparqlWhere": q}))
        }
        Body::Map(secs) => {
            let sections: Vec<serde_json::Value> = secs
                .iter()
                .map(|s| {
                    let mut j = json!({"id": s.id, "source": end_json(&s.source), "target": end_json(&s.target)});
                    match &s.strategy {
                        SecStrategy::None => {}
                        SecStrategy::Label => j["strategy"] = json!({"label": "by hand"}),
                        SecStrategy::Iri(i) => j["strategy"] = json!({"iri": st(*i)}),
                    }
                    j
                })
                .collect();
            ("intentional", json!({"map": {"sections": sections}}))
        }
    };
    json!({
        "id": format!("frag:{}", f.name),
        "kind": kind,
        "signature": sig,
        "body": body,
        "prefixes": {"dom": DOM, "frag": FRAG},
    })
}

pub fn service_description(s: &Svc) -> ServiceDescription {
    ServiceDescription {
        id: iri(&format!("dom:{}", s.name)),
        name: format!("service {}", s.name),
        inputs: BTreeSet::from([iri(&o(s.input))]),
        outputs: s.outputs.iter().map(|i| iri(&c(*i))).collect(),
        grounding: format!("urn:example:{}", s.name),
    }
}

pub fn build_memory(spec: &Spec) -> Memory {
    let ontology = parse_turtle(&ontology_ttl(), None).expect("ontology parses");
    let prefixes = BTreeMap::from([("owls".to_string(), "http://satis.example/owls#".to_string())]);
    let fragments = spec
        .fragments
        .iter()
        .map(|f| {
            let m = parse_manifest(&manifest_json(f).to_string()).expect("manifest parses");
            fragment_from_manifest(&m, &prefixes).expect("manifest converts")
        })
        .collect();
    let services = spec.services.iter().map(service_description).collect();
    Memory::from_parts(&ontology, services, fragments, Vec::new()).expect("random memory is valid")
}

pub fn to_goal(g: &OGoal) -> Goal {
    use satis_core::map::Intention;
    Goal {
        target_verb: iri(&v(g.verb)),
        target_object: iri(&o(g.object)),
        source: g.source.map(|s| match s {
            End::Start => Intention::Start,
            End::Stop => Intention::Stop,
            End::Int(a, b) => Intention::ordinary(iri(&v(a)), iri(&o(b))),
        }),
        strategy: g.strategy.map(|s| iri(&st(s))),
    }
}

/// A plan flattened to strings: each choice is (goal, rule, path) and each
/// leaf is (goal, rule, candidates).
pub type FlatPlan = (Vec<(String, String, Option<Vec<String>>)>, Vec<(String, String, Vec<String>)>);

fn goal_key(g: &OGoal) -> String {
    let mut s = format!("V{} O{}", g.verb, g.object);
    match g.source {
        Some(End::Start) => s.push_str(" from start"),
        Some(End::Stop) => s.push_str(" from stop"),
        Some(End::Int(a, b)) => s.push_str(&format!(" from V{a} O{b}")),
        None => {}
    }
    if let Some(t) = g.strategy {
        s.push_str(&format!(" by St{t}"));
    }
    s
}

/// Flattens a resolver plan into the oracle's vocabulary.
pub fn flatten(plan: &Plan) -> FlatPlan {
    let local = |i: &Iri| i.as_str().rsplit(['#', '/']).next().unwrap().to_string();
    let key = |g: &Goal| {
        use satis_core::map::Intention;
        let mut s = format!("{} {}", local(&g.target_verb), local(&g.target_object));
        match &g.source {
            Some(Intention::Start) => s.push_str(" from start"),
            Some(Intention::Stop) => s.push_str(" from stop"),
            Some(Intention::Ordinary { verb, object }) => s.push_str(&format!(" from {} {}", local(verb), local(object))),
            None => {}
        }
        if let Some(t) = &g.strategy {
            s.push_str(&format!(" by {}", local(t)));
        }
        s
    };
    let rule = |i: &Iri| i.as_str().strip_prefix(FRAG).unwrap_or(i.as_str()).to_string();
    (
        plan.choices.iter().map(|c| (key(&c.goal), rule(&c.rule), c.path.clone())).collect(),
        plan.leaves.iter().map(|l| (key(&l.goal), rule(&l.rule), l.candidates.iter().map(local).collect())).collect(),
    )
}

fn applies(sig: &Sig, g: &OGoal) -> bool {
    if sig.verb != g.verb || !obj_sub(g.object, sig.object) {
        return false;
    }
    let source_ok = match (&sig.source, &g.source) {
        (None, _) => true,
        (Some(End::Int(sv, so)), Some(End::Int(gv, go))) => sv == gv && obj_sub(*go, *so),
        (Some(a), Some(b)) => a == b,
        (Some(_), None) => false,
    };
    let strategy_ok = match (sig.strategy, g.strategy) {
        (None, _) => true,
        (Some(s), Some(t)) => strat_sub(t, s),
        (Some(_), None) => false,
    };
    source_ok && strategy_ok
}

fn candidates(spec: &Spec, output: usize, input: Option<usize>) -> Vec<String> {
    let mut out: Vec<String> = spec
        .services
        .iter()
        .filter(|s| s.outputs.contains(&output) && input.is_none_or(|i| s.input == i))
        .map(|s| s.name.clone())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Every start-to-stop path, as section indices.
fn paths(secs: &[Sec]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..secs.len()).collect();
    order.sort_by(|a, b| secs[*a].id.cmp(&secs[*b].id));
    let mut out = Vec::new();
    let mut stack: Vec<(End, Vec<usize>)> = vec![(End::Start, Vec::new())];
    while let Some((at, path)) = stack.pop() {
        if at == End::Stop {
            out.push(path);
            continue;
        }
        for &i in order.iter().rev() {
            if secs[i].source == at {
                let mut p = path.clone();
                p.push(i);
                stack.push((secs[i].target, p));
            }
        }
    }
    out
}

struct Open {
    goal: OGoal,
    depth: usize,
    ancestors: Vec<OGoal>,
}

struct Partial {
    open: VecDeque<Open>,
    plan: FlatPlan,
}

/// Breadth-first expansion of every rule application from the goal. A
/// partial plan is dropped as soon as one of its open goals cannot be met:
/// no applicable fragment, no matching service, a repeated goal on its own
/// ancestor chain, or a depth beyond `max_depth`.
pub fn oracle_plans(spec: &Spec, goal: &OGoal, max_depth: usize) -> Vec<FlatPlan> {
    let mut done = Vec::new();
    let mut queue = VecDeque::from([Partial {
        open: VecDeque::from([Open { goal: goal.clone(), depth: 1, ancestors: Vec::new() }]),
        plan: (Vec::new(), Vec::new()),
    }]);
    while let Some(mut p) = queue.pop_front() {
        let Some(next) = p.open.pop_front() else {
            done.push(p.plan);
            continue;
        };
        if next.ancestors.contains(&next.goal) || next.depth > max_depth {
            continue;
        }
        let gk = goal_key(&next.goal);
        let mut ancestors = next.ancestors.clone();
        ancestors.push(next.goal.clone());
        for f in spec.fragments.iter().filter(|f| applies(&f.sig, &next.goal)) {
            match &f.body {
                Body::Query { output, input } => {
                    let found = candidates(spec, *output, *input);
                    if found.is_empty() {
                        continue;
                    }
                    let rule = format!("{}/concrete", f.name);
                    let mut plan = p.plan.clone();
                    plan.0.push((gk.clone(), rule.clone(), None));
                    plan.1.push((gk.clone(), rule, found));
                    queue.push_back(Partial { open: p.open.iter().map(clone_open).collect(), plan });
                }
                Body::Map(secs) => {
                    for path in paths(secs) {
                        let mut plan = p.plan.clone();
                        plan.0.push((
                            gk.clone(),
                            format!("{}/abstract", f.name),
                            Some(path.iter().map(|i| secs[*i].id.clone()).collect()),
                        ));
                        let mut open: VecDeque<Open> = VecDeque::new();
                        for i in &path {
                            let s = &secs[*i];
                            if let End::Int(verb, object) = s.target {
                                let strategy = match s.strategy {
                                    SecStrategy::Iri(t) => Some(t),
                                    _ => None,
                                };
                                open.push_back(Open {
                                    goal: OGoal { verb, object, source: Some(s.source), strategy },
                                    depth: next.depth + 1,
                                    ancestors: ancestors.clone(),
                                });
                            }
                        }
                        open.extend(p.open.iter().map(clone_open));
                        queue.push_back(Partial { open, plan });
                    }
                }
            }
        }
        p.open.clear();
    }
    done
}

fn clone_open(o: &Open) -> Open {
    Open { goal: o.goal.clone(), depth: o.depth, ancestors: o.ancestors.clone() }
}

pub fn sorted(mut plans: Vec<FlatPlan>) -> Vec<FlatPlan> {
    plans.sort();
    plans
}

//! Compilation of fragments into CONSTRUCT rules.
//!
//! An operational fragment yields one concrete rule: its conclusion describes
//! the signature section, operationalised by the service variables, and its
//! premise is the query body.
//!
//! An intentional fragment yields two rules. The abstract rule concludes the
//! signature section, refined by a map and operationalised by `?service1` to
//! `?serviceN`, from a premise that matches the encoding of the body map with
//! each ordinary-target section carrying its own service variable. The
//! map-builder rule concludes the constant encoding of the body map, with
//! service links, from one template per body section.

use std::collections::BTreeMap;

use super::{validate_fragment, Fragment, FragmentBody, SectionSignature};
use crate::diagnostic::Diagnostic;
use crate::map::{map_from_rdf, map_ids_in, map_to_rdf, section_iri, Intention, Map, MapError};
use crate::query::{instantiate, Solution};
use crate::rdf::{vocab, Graph, Iri, Term};
use crate::syntax::{PatternTerm, SparqlQuery, TriplePattern, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    Concrete,
    Abstract,
    MapBuilder,
}

impl RuleKind {
    fn suffix(self) -> &'static str {
        match self {
            RuleKind::Concrete => "concrete",
            RuleKind::Abstract => "abstract",
            RuleKind::MapBuilder => "map-builder",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: Iri,
    pub fragment: Iri,
    pub kind: RuleKind,
    /// A CONSTRUCT query: the template is the conclusion, the WHERE clause
    /// the premise.
    pub query: SparqlQuery,
    pub service_variables: Vec<Variable>,
}

impl Rule {
    pub fn conclusion(&self) -> &[TriplePattern] {
        &self.query.template
    }

    pub fn premise(&self) -> &[TriplePattern] {
        &self.query.where_patterns
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("fragment {fragment}: {}", .diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
pub struct CompileError {
    pub fragment: Iri,
    pub diagnostics: Vec<Diagnostic>,
}

fn m(local: &str) -> PatternTerm {
    PatternTerm::Term(vocab::term(vocab::MAP, local))
}

fn c(iri: &Iri) -> PatternTerm {
    PatternTerm::from(iri)
}

fn v(name: impl Into<String>) -> PatternTerm {
    PatternTerm::Var(Variable::new(name))
}

fn b(label: &str) -> PatternTerm {
    PatternTerm::Term(Term::blank(label))
}

fn tp(s: PatternTerm, p: PatternTerm, o: PatternTerm) -> TriplePattern {
    TriplePattern::new(s, p, o)
}

fn a() -> PatternTerm {
    PatternTerm::Term(vocab::rdf_type())
}

/// The conclusion shared by concrete and abstract rules: one blank section
/// encoding the signature, plus `extra` properties on that section.
fn section_template(sig: &SectionSignature, extra: Vec<(PatternTerm, PatternTerm)>) -> Vec<TriplePattern> {
    let (sec, tgt, src) = (b("section"), b("target"), b("source"));
    let mut out = vec![
        tp(sec.clone(), a(), m("Section")),
        tp(sec.clone(), m("hasTarget"), tgt.clone()),
        tp(tgt.clone(), a(), m("Intention")),
        tp(tgt.clone(), m("hasVerb"), c(&sig.target_verb)),
        tp(tgt, m("hasObject"), c(&sig.target_object)),
    ];
    match &sig.source {
        Some(Intention::Ordinary { verb, object }) => {
            out.push(tp(sec.clone(), m("hasSource"), src.clone()));
            out.push(tp(src.clone(), a(), m("Intention")));
            out.push(tp(src.clone(), m("hasVerb"), c(verb)));
            out.push(tp(src, m("hasObject"), c(object)));
        }
        Some(Intention::Start) | Some(Intention::Stop) => {
            let class = if sig.source == Some(Intention::Start) { "Start" } else { "Stop" };
            out.push(tp(sec.clone(), m("hasSource"), src.clone()));
            out.push(tp(src, a(), m(class)));
        }
        None => {}
    }
    if let Some(st) = &sig.strategy {
        out.push(tp(sec.clone(), m("hasStrategy"), c(st)));
    }
    for (p, o) in extra {
        out.push(tp(sec.clone(), p, o));
    }
    out
}

/// Recovers the signature encoded by a concrete or abstract rule
/// conclusion: the blank section typed `map:Section` with a target.
pub fn signature_of(template: &[TriplePattern]) -> Option<SectionSignature> {
    let find = |s: &PatternTerm, p: &PatternTerm| -> Vec<&PatternTerm> {
        template.iter().filter(|t| &t.subject == s && &t.predicate == p).map(|t| &t.object).collect()
    };
    let one_iri = |s: &PatternTerm, p: &PatternTerm| -> Option<Iri> {
        match find(s, p).as_slice() {
            [PatternTerm::Term(Term::Iri(i))] => Some(i.clone()),
            _ => None,
        }
    };
    let is_a = |s: &PatternTerm, class: &str| find(s, &a()).contains(&&m(class));
    let section = template
        .iter()
        .filter(|t| t.predicate == a() && t.object == m("Section"))
        .map(|t| &t.subject)
        .find(|s| matches!(s, PatternTerm::Term(Term::Blank(_))))?;
    let target = *find(section, &m("hasTarget")).first()?;
    let source = match find(section, &m("hasSource")).first() {
        None => None,
        Some(src) if is_a(src, "Start") => Some(Intention::Start),
        Some(src) if is_a(src, "Stop") => Some(Intention::Stop),
        Some(src) => Some(Intention::Ordinary { verb: one_iri(src, &m("hasVerb"))?, object: one_iri(src, &m("hasObject"))? }),
    };
    Some(SectionSignature {
        target_verb: one_iri(target, &m("hasVerb"))?,
        target_object: one_iri(target, &m("hasObject"))?,
        source,
        strategy: one_iri(section, &m("hasStrategy")),
    })
}

fn rule_id(fragment: &Iri, kind: RuleKind) -> Iri {
    Iri::constant(&format!("{}/{}", fragment.as_str(), kind.suffix()))
}

fn prefixes_for(ontology: &Graph) -> BTreeMap<String, String> {
    let mut p: BTreeMap<String, String> = ontology.prefixes().clone();
    for (label, ns) in vocab::standard_prefixes() {
        p.entry(label.to_string()).or_insert_with(|| ns.to_string());
    }
    p
}

/// Compiles a fragment: one concrete rule for a query body, an abstract and
/// a map-builder rule for a map body.
pub fn compile_fragment(f: &Fragment, ontology: &Graph) -> Result<Vec<Rule>, CompileError> {
    let diagnostics = validate_fragment(f, ontology);
    if !diagnostics.is_empty() {
        return Err(CompileError { fragment: f.id.clone(), diagnostics });
    }
    let prefixes = prefixes_for(ontology);
    Ok(match &f.body {
        FragmentBody::Query { patterns, service_variables } => {
            let extra = service_variables.iter().map(|sv| (m("operationalisedBy"), PatternTerm::Var(sv.clone()))).collect();
            let template = section_template(&f.signature, extra);
            vec![Rule {
                id: rule_id(&f.id, RuleKind::Concrete),
                fragment: f.id.clone(),
                kind: RuleKind::Concrete,
                query: SparqlQuery::construct(prefixes, template, patterns.clone()),
                service_variables: service_variables.clone(),
            }]
        }
        FragmentBody::Map(map) => intentional_rules(f, map, prefixes),
    })
}

fn intentional_rules(f: &Fragment, map: &Map, prefixes: BTreeMap<String, String>) -> Vec<Rule> {
    let ordinary = map.ordinary_intentions();
    let intention_var = |i: &Intention| match i {
        Intention::Start => v("start"),
        Intention::Stop => v("stop"),
        other => v(format!("i{}", ordinary.iter().position(|o| *o == other).expect("listed") + 1)),
    };

    let mut service_vars: Vec<Variable> = Vec::new();
    let mut abstract_premise = vec![tp(v("map"), a(), m("Map"))];
    let mut builder_premise = Vec::new();
    let mut builder_links = Vec::new();
    for (k, s) in map.sections().iter().enumerate() {
        let (sk, tk) = (v(format!("s{}", k + 1)), v(format!("t{}", k + 1)));
        abstract_premise.push(tp(v("map"), m("hasSection"), sk.clone()));
        abstract_premise.push(tp(sk.clone(), m("hasSource"), intention_var(&s.source)));
        abstract_premise.push(tp(sk.clone(), m("hasTarget"), intention_var(&s.target)));
        if let Some(st) = &s.strategy.iri {
            abstract_premise.push(tp(sk.clone(), m("hasStrategy"), c(st)));
        }
        builder_premise.push(tp(sk.clone(), m("hasTarget"), tk.clone()));
        match &s.target {
            Intention::Ordinary { verb, object } => {
                let sv = Variable::new(format!("service{}", service_vars.len() + 1));
                abstract_premise.push(tp(sk.clone(), m("operationalisedBy"), PatternTerm::Var(sv.clone())));
                builder_premise.push(tp(tk.clone(), m("hasVerb"), c(verb)));
                builder_premise.push(tp(tk, m("hasObject"), c(object)));
                builder_premise.push(tp(sk, m("operationalisedBy"), PatternTerm::Var(sv.clone())));
                builder_links.push(tp(c(&section_iri(map.id(), &s.id)), m("operationalisedBy"), PatternTerm::Var(sv.clone())));
                service_vars.push(sv);
            }
            _ => builder_premise.push(tp(tk, a(), m("Stop"))),
        }
    }
    let mut used: Vec<&Intention> = map.sections().iter().flat_map(|s| [&s.source, &s.target]).collect();
    used.sort();
    used.dedup();
    for i in used {
        match i {
            Intention::Start => abstract_premise.push(tp(v("start"), a(), m("Start"))),
            Intention::Stop => abstract_premise.push(tp(v("stop"), a(), m("Stop"))),
            Intention::Ordinary { verb, object } => {
                abstract_premise.push(tp(intention_var(i), m("hasVerb"), c(verb)));
                abstract_premise.push(tp(intention_var(i), m("hasObject"), c(object)));
            }
        }
    }

    let mut extra = vec![(m("refinedBy"), v("map"))];
    extra.extend(service_vars.iter().map(|sv| (m("operationalisedBy"), PatternTerm::Var(sv.clone()))));
    let abstract_rule = Rule {
        id: rule_id(&f.id, RuleKind::Abstract),
        fragment: f.id.clone(),
        kind: RuleKind::Abstract,
        query: SparqlQuery::construct(prefixes.clone(), section_template(&f.signature, extra), abstract_premise),
        service_variables: service_vars.clone(),
    };

    let mut builder_conclusion: Vec<TriplePattern> = map_to_rdf(map)
        .iter()
        .map(|t| tp(t.subject().clone().into(), t.predicate().clone().into(), t.object().clone().into()))
        .collect();
    builder_conclusion.extend(builder_links);
    let builder = Rule {
        id: rule_id(&f.id, RuleKind::MapBuilder),
        fragment: f.id.clone(),
        kind: RuleKind::MapBuilder,
        query: SparqlQuery::construct(prefixes, builder_conclusion, builder_premise),
        service_variables: service_vars,
    };
    vec![abstract_rule, builder]
}

/// Rules by id, with an index from signature target to the concrete and
/// abstract rules concluding it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleBase {
    rules: BTreeMap<Iri, Rule>,
    signatures: BTreeMap<Iri, SectionSignature>,
    index: BTreeMap<(Iri, Iri), Vec<Iri>>,
}

impl RuleBase {
    /// Fails with the offending id if two rules share one.
    pub fn new(rules: impl IntoIterator<Item = Rule>) -> Result<Self, Iri> {
        let mut rb = RuleBase::default();
        for r in rules {
            if r.kind != RuleKind::MapBuilder {
                if let Some(sig) = signature_of(r.conclusion()) {
                    rb.index.entry((sig.target_verb.clone(), sig.target_object.clone())).or_default().push(r.id.clone());
                    rb.signatures.insert(r.id.clone(), sig);
                }
            }
            if let Some(dup) = rb.rules.insert(r.id.clone(), r) {
                return Err(dup.id);
            }
        }
        for ids in rb.index.values_mut() {
            ids.sort();
        }
        Ok(rb)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Rules in id order.
    pub fn rules(&self) -> impl Iterator<Item = &Rule> + '_ {
        self.rules.values()
    }

    pub fn get(&self, id: &Iri) -> Option<&Rule> {
        self.rules.get(id)
    }

    pub fn signature(&self, rule: &Iri) -> Option<&SectionSignature> {
        self.signatures.get(rule)
    }

    /// Ids of the rules whose conclusion targets exactly `(verb, object)`.
    pub fn by_target(&self, verb: &Iri, object: &Iri) -> &[Iri] {
        self.index.get(&(verb.clone(), object.clone())).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The body map of an abstract rule, rebuilt from the conclusion of its
    /// map-builder companion.
    pub fn body_map(&self, abstract_rule: &Iri) -> Result<Map, MapError> {
        let rule = self.rules.get(abstract_rule);
        let builder = rule
            .map(|r| rule_id(&r.fragment, RuleKind::MapBuilder))
            .and_then(|id| self.rules.get(&id))
            .ok_or_else(|| MapError::NoSuchMap(abstract_rule.clone()))?;
        let g = instantiate(builder.conclusion(), &[Solution::new()], &Default::default());
        let ids = map_ids_in(&g);
        match ids.as_slice() {
            [id] => map_from_rdf(&g, id),
            _ => Err(MapError::Malformed {
                node: builder.id.to_string(),
                message: format!("map-builder conclusion describes {} maps", ids.len()),
            }),
        }
    }
}

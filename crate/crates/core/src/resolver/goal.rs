use std::collections::BTreeMap;
use std::fmt;

use crate::map::{Intention, Section};
use crate::rdf::Iri;
use crate::syntax::{abbreviate_iri, expand_curie};

/// A section to operationalise. Absent slots are unconstrained.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Goal {
    pub target_verb: Iri,
    pub target_object: Iri,
    /// `Intention::Start` or an ordinary intention.
    pub source: Option<Intention>,
    pub strategy: Option<Iri>,
}

impl Goal {
    pub fn new(target_verb: Iri, target_object: Iri) -> Self {
        Goal { target_verb, target_object, source: None, strategy: None }
    }

    /// The subgoal for a body-map section. `None` for sections that reach
    /// the stop intention: there is nothing left to achieve.
    pub fn from_section(s: &Section) -> Option<Goal> {
        let Intention::Ordinary { verb, object } = &s.target else { return None };
        Some(Goal {
            target_verb: verb.clone(),
            target_object: object.clone(),
            source: Some(s.source.clone()),
            strategy: s.strategy.iri.clone(),
        })
    }

    /// The goal in `parse_goal` syntax, IRIs compacted where possible.
    pub fn render(&self, prefixes: &BTreeMap<String, String>) -> String {
        let r = |i: &Iri| abbreviate_iri(i, prefixes);
        let mut out = format!("verb={},object={}", r(&self.target_verb), r(&self.target_object));
        match &self.source {
            Some(Intention::Ordinary { verb, object }) => {
                out.push_str(&format!(",sourceVerb={},sourceObject={}", r(verb), r(object)))
            }
            Some(Intention::Start) => out.push_str(",source=start"),
            Some(Intention::Stop) => out.push_str(",source=stop"),
            None => {}
        }
        if let Some(st) = &self.strategy {
            out.push_str(&format!(",strategy={}", r(st)));
        }
        out
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&BTreeMap::new()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid goal: {0}")]
pub struct GoalError(pub String);

/// Parses `verb=V,object=O[,source=start|sourceVerb=SV,sourceObject=SO][,strategy=S]`.
/// Values are prefixed names or IRIs.
pub fn parse_goal(spec: &str, prefixes: &BTreeMap<String, String>) -> Result<Goal, GoalError> {
    let mut slots: BTreeMap<&str, &str> = BTreeMap::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| GoalError(format!("expected key=value, found {part:?}")))?;
        let key = key.trim();
        if !["verb", "object", "source", "sourceVerb", "sourceObject", "strategy"].contains(&key) {
            return Err(GoalError(format!("unknown slot {key:?}")));
        }
        if slots.insert(key, value.trim()).is_some() {
            return Err(GoalError(format!("slot {key:?} given twice")));
        }
    }
    let iri = |key: &str| -> Result<Option<Iri>, GoalError> {
        slots.get(key).map(|v| expand_curie(v, prefixes).map_err(GoalError)).transpose()
    };
    let target_verb = iri("verb")?.ok_or_else(|| GoalError("missing slot \"verb\"".into()))?;
    let target_object = iri("object")?.ok_or_else(|| GoalError("missing slot \"object\"".into()))?;
    let source = match (slots.get("source"), iri("sourceVerb")?, iri("sourceObject")?) {
        (None, None, None) => None,
        (Some(s), None, None) if s.eq_ignore_ascii_case("start") => Some(Intention::Start),
        (Some(s), None, None) => return Err(GoalError(format!("source must be \"start\", found {s:?}"))),
        (None, Some(verb), Some(object)) => Some(Intention::Ordinary { verb, object }),
        (None, _, _) => return Err(GoalError("sourceVerb and sourceObject must be given together".into())),
        (Some(_), _, _) => return Err(GoalError("source=start cannot be combined with sourceVerb/sourceObject".into())),
    };
    Ok(Goal { target_verb, target_object, source, strategy: iri("strategy")? })
}

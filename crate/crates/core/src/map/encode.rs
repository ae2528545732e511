//! RDF encoding of maps in the `map:` vocabulary.
//!
//! A map `<m>` is written as `<m> a map:Map` with one `map:hasSection` link
//! per section. Section `s` becomes `<m/section/s>` with `map:hasSource`,
//! `map:hasTarget`, an optional `map:hasStrategy` (strategy IRI), an optional
//! `rdfs:label` (strategy label) and an optional `map:refinedBy`. Intentions
//! are `<m/intention/start>`, `<m/intention/stop>` and `<m/intention/iN>`,
//! numbered by first appearance.

use std::collections::BTreeMap;

use super::{Intention, Map, MapError, Section, Strategy};
use crate::rdf::{vocab, Graph, Iri, Literal, Term, Triple};

pub fn section_iri(map: &Iri, section_id: &str) -> Iri {
    Iri::constant(&format!("{}/section/{section_id}", map.as_str()))
}

fn map_term(local: &str) -> Term {
    vocab::term(vocab::MAP, local)
}

fn push(g: &mut Graph, s: impl Into<Term>, p: Term, o: impl Into<Term>) {
    g.insert(Triple::new(s, p, o).expect("map encoding produces well-formed triples"));
}

pub fn map_to_rdf(m: &Map) -> Graph {
    let mut g = Graph::new();
    g.set_prefix("map", vocab::MAP);
    g.set_prefix("rdfs", vocab::RDFS);
    let ty = vocab::rdf_type();
    let base = m.id().as_str();
    let map_node = Term::from(m.id());
    push(&mut g, map_node.clone(), ty.clone(), map_term("Map"));

    let mut intention_nodes: BTreeMap<&Intention, Term> = BTreeMap::new();
    intention_nodes.insert(&Intention::Start, Term::iri(format!("{base}/intention/start")).expect("valid IRI"));
    intention_nodes.insert(&Intention::Stop, Term::iri(format!("{base}/intention/stop")).expect("valid IRI"));
    for (n, i) in m.ordinary_intentions().into_iter().enumerate() {
        intention_nodes.insert(i, Term::iri(format!("{base}/intention/i{}", n + 1)).expect("valid IRI"));
    }

    let mut used: Vec<&Intention> = Vec::new();
    for s in m.sections() {
        let node = Term::from(section_iri(m.id(), &s.id));
        push(&mut g, map_node.clone(), map_term("hasSection"), node.clone());
        push(&mut g, node.clone(), ty.clone(), map_term("Section"));
        push(&mut g, node.clone(), map_term("hasSource"), intention_nodes[&s.source].clone());
        push(&mut g, node.clone(), map_term("hasTarget"), intention_nodes[&s.target].clone());
        if let Some(st) = &s.strategy.iri {
            push(&mut g, node.clone(), map_term("hasStrategy"), st);
        }
        if let Some(label) = &s.strategy.label {
            push(&mut g, node.clone(), vocab::rdfs_label(), Literal::plain(label.clone()));
        }
        if let Some(r) = m.refinements().get(&s.id) {
            push(&mut g, node.clone(), map_term("refinedBy"), r);
        }
        used.extend([&s.source, &s.target]);
    }
    used.sort();
    used.dedup();
    for i in used {
        let node = intention_nodes[i].clone();
        match i {
            Intention::Start => push(&mut g, node, ty.clone(), map_term("Start")),
            Intention::Stop => push(&mut g, node, ty.clone(), map_term("Stop")),
            Intention::Ordinary { verb, object } => {
                push(&mut g, node.clone(), ty.clone(), map_term("Intention"));
                push(&mut g, node.clone(), map_term("hasVerb"), verb);
                push(&mut g, node, map_term("hasObject"), object);
            }
        }
    }
    g
}

/// IRIs of every resource typed `map:Map`, in canonical order.
pub fn map_ids_in(g: &Graph) -> Vec<Iri> {
    let ty = vocab::rdf_type();
    let class = map_term("Map");
    g.subjects(&ty, &class).filter_map(|t| t.as_iri().cloned()).collect()
}

fn values(g: &Graph, node: &Term, local: &str) -> Vec<Term> {
    let p = map_term(local);
    g.objects(node, &p).cloned().collect()
}

fn at_most_one(g: &Graph, node: &Term, pred: &Term, name: &str) -> Result<Option<Term>, MapError> {
    let mut vals: Vec<Term> = g.objects(node, pred).cloned().collect();
    match vals.len() {
        0 => Ok(None),
        1 => Ok(vals.pop()),
        n => Err(MapError::Ambiguous { node: node.to_string(), property: name.to_string(), count: n }),
    }
}

fn exactly_one(g: &Graph, node: &Term, local: &str) -> Result<Term, MapError> {
    let name = format!("map:{local}");
    at_most_one(g, node, &map_term(local), &name)?
        .ok_or(MapError::MissingProperty { node: node.to_string(), property: name })
}

fn expect_iri(node: &Term, property: &str, value: &Term) -> Result<Iri, MapError> {
    value.as_iri().cloned().ok_or_else(|| MapError::Malformed {
        node: node.to_string(),
        message: format!("value of {property} must be an IRI, found {value}"),
    })
}

fn decode_intention(g: &Graph, node: &Term) -> Result<Intention, MapError> {
    let ty = vocab::rdf_type();
    if g.contains_terms(node, &ty, &map_term("Start")) {
        return Ok(Intention::Start);
    }
    if g.contains_terms(node, &ty, &map_term("Stop")) {
        return Ok(Intention::Stop);
    }
    let verb = expect_iri(node, "map:hasVerb", &exactly_one(g, node, "hasVerb")?)?;
    let object = expect_iri(node, "map:hasObject", &exactly_one(g, node, "hasObject")?)?;
    Ok(Intention::Ordinary { verb, object })
}

fn section_id(map: &Iri, node: &Term) -> Result<String, MapError> {
    let prefix = format!("{}/section/", map.as_str());
    match node {
        Term::Iri(i) => Ok(i.as_str().strip_prefix(&prefix).unwrap_or(i.local_name()).to_string()),
        Term::Blank(b) => Ok(b.label().to_string()),
        Term::Literal(_) => Err(MapError::Malformed {
            node: map.to_string(),
            message: format!("section {node} must be a resource"),
        }),
    }
}

/// Decodes the map `id` from `g`. Properties other than the map vocabulary
/// (service links for instance) are ignored.
pub fn map_from_rdf(g: &Graph, id: &Iri) -> Result<Map, MapError> {
    let node = Term::from(id);
    let sections = values(g, &node, "hasSection");
    if sections.is_empty() && !g.contains_terms(&node, &vocab::rdf_type(), &map_term("Map")) {
        return Err(MapError::NoSuchMap(id.clone()));
    }
    let mut out = Vec::new();
    let mut refinements = BTreeMap::new();
    for sec in sections {
        let sec = &sec;
        let sid = section_id(id, sec)?;
        let source = decode_intention(g, &exactly_one(g, sec, "hasSource")?)?;
        let target = decode_intention(g, &exactly_one(g, sec, "hasTarget")?)?;
        let strategy_iri = match at_most_one(g, sec, &map_term("hasStrategy"), "map:hasStrategy")? {
            Some(v) => Some(expect_iri(sec, "map:hasStrategy", &v)?),
            None => None,
        };
        let label = match at_most_one(g, sec, &vocab::rdfs_label(), "rdfs:label")? {
            Some(Term::Literal(l)) => Some(l.value().to_string()),
            Some(other) => {
                return Err(MapError::Malformed {
                    node: sec.to_string(),
                    message: format!("strategy label must be a literal, found {other}"),
                })
            }
            None => None,
        };
        if let Some(r) = at_most_one(g, sec, &map_term("refinedBy"), "map:refinedBy")? {
            refinements.insert(sid.clone(), expect_iri(sec, "map:refinedBy", &r)?);
        }
        out.push(Section { id: sid, source, strategy: Strategy { label, iri: strategy_iri }, target });
    }
    Ok(Map::new(id.clone(), out, refinements))
}

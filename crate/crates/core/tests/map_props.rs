use std::collections::BTreeMap;

use proptest::prelude::*;
use satis_core::map::{
    enumerate_paths, map_from_rdf, map_to_rdf, structural_diagnostics, Intention, Map, Section, Strategy,
};
use satis_core::rdf::Iri;
use satis_core::syntax::{parse_turtle, serialize_turtle};

fn iri(local: &str) -> Iri {
    Iri::new(format!("http://satis.example/domain#{local}")).unwrap()
}

/// Node 0 is start, the last node is stop, and sections only go forward, so
/// the map is acyclic. `extra` edges are taken modulo the node count.
fn dag_map(k: usize, extra: &[(usize, usize, u8)]) -> Map {
    let mut nodes = vec![Intention::Start];
    nodes.extend((0..k).map(|i| Intention::ordinary(iri(&format!("V{i}")), iri(if i % 2 == 0 { "Image" } else { "Scan" }))));
    nodes.push(Intention::Stop);
    let n = nodes.len();
    let mut edges: Vec<(usize, usize, u8)> = (0..n - 1).map(|i| (i, i + 1, 0)).collect();
    for &(a, b, st) in extra {
        let a = a % (n - 1);
        let b = a + 1 + b % (n - 1 - a);
        edges.push((a, b, st));
    }
    let sections = edges
        .iter()
        .enumerate()
        .map(|(i, &(a, b, st))| {
            let strategy = match st % 3 {
                0 => Strategy::anonymous(),
                1 => Strategy { label: Some(format!("way {i}")), iri: None },
                _ => Strategy { label: Some("named".into()), iri: Some(iri("ByHand")) },
            };
            Section::new(format!("s{i}"), nodes[a].clone(), strategy, nodes[b].clone())
        })
        .collect();
    Map::new(iri("m"), sections, BTreeMap::new())
}

/// Number of start-to-stop paths, counted by dynamic programming over the
/// intentions in reverse topological order.
fn count_paths(m: &Map) -> usize {
    fn ways(at: &Intention, m: &Map, memo: &mut BTreeMap<Intention, usize>) -> usize {
        if *at == Intention::Stop {
            return 1;
        }
        if let Some(n) = memo.get(at) {
            return *n;
        }
        let n = m.sections().iter().filter(|s| &s.source == at).map(|s| ways(&s.target, m, memo)).sum();
        memo.insert(at.clone(), n);
        n
    }
    ways(&Intention::Start, m, &mut BTreeMap::new())
}

fn extra_edges() -> impl proptest::strategy::Strategy<Value = Vec<(usize, usize, u8)>> {
    prop::collection::vec((0usize..8, 0usize..8, any::<u8>()), 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn forward_maps_are_valid(k in 1usize..5, extra in extra_edges()) {
        let m = dag_map(k, &extra);
        prop_assert_eq!(structural_diagnostics(&m), vec![]);
    }

    #[test]
    fn path_enumeration_matches_count(k in 1usize..5, extra in extra_edges()) {
        let m = dag_map(k, &extra);
        let paths = enumerate_paths(&m).unwrap();
        prop_assert_eq!(paths.len(), count_paths(&m));
        for p in &paths {
            prop_assert_eq!(&p[0].source, &Intention::Start);
            prop_assert_eq!(&p[p.len() - 1].target, &Intention::Stop);
            for w in p.windows(2) {
                prop_assert_eq!(&w[0].target, &w[1].source);
            }
        }
        let mut distinct = paths.clone();
        distinct.sort();
        distinct.dedup();
        prop_assert_eq!(distinct.len(), paths.len());
    }

    #[test]
    fn back_edge_is_a_cycle(k in 2usize..5, extra in extra_edges(), from in 0usize..8, to in 0usize..8) {
        let m = dag_map(k, &extra);
        let ordinary: Vec<Intention> = m.ordinary_intentions().into_iter().cloned().collect();
        let (lo, hi) = (to % ordinary.len(), from % ordinary.len());
        prop_assume!(lo < hi);
        let mut sections = m.sections().to_vec();
        sections.push(Section::new("back", ordinary[hi].clone(), Strategy::anonymous(), ordinary[lo].clone()));
        let cyclic = Map::new(m.id().clone(), sections, BTreeMap::new());
        prop_assert!(structural_diagnostics(&cyclic).iter().any(|d| d.code == "cyclic-sections"));
        prop_assert!(enumerate_paths(&cyclic).is_err());
    }

    #[test]
    fn rdf_encoding_roundtrips(k in 1usize..5, extra in extra_edges()) {
        let m = dag_map(k, &extra);
        let g = map_to_rdf(&m);
        prop_assert_eq!(map_from_rdf(&g, m.id()).unwrap(), m.clone());
        let reparsed = parse_turtle(&serialize_turtle(&g), None).unwrap();
        prop_assert_eq!(map_from_rdf(&reparsed, m.id()).unwrap(), m);
    }
}

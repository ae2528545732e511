use std::path::PathBuf;

use satis_core::fragment::FragmentBody;
use satis_core::map::{map_from_rdf, map_to_rdf, Intention};
use satis_core::memory::{load_memory, Memory};
use satis_core::rdf::{is_isomorphic, Iri};
use satis_core::registry::{registry_from_rdf, registry_graph, ServiceDescription};
use satis_core::resolver::{
    applicable_rules, enumerate_plans, explain, parse_goal, resolve, AlternativeKind, Goal, Limits, Status,
};
use satis_core::syntax::{parse_turtle, serialize_turtle};

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/imaging")
}

fn memory() -> Memory {
    load_memory(&fixture_dir()).expect("fixture loads cleanly")
}

fn goal(mem: &Memory, spec: &str) -> Goal {
    parse_goal(spec, &mem.prefixes).unwrap()
}

fn dom(local: &str) -> Iri {
    Iri::new(format!("http://satis.example/domain#{local}")).unwrap()
}

fn frag(local: &str) -> Iri {
    Iri::new(format!("http://satis.example/fragments#{local}")).unwrap()
}

const PREPROCESS: &str = "verb=dom:Preprocessing,object=dom:Image";

#[test]
fn fixture_contents() {
    let mem = memory();
    assert_eq!(mem.registry.len(), 7);
    assert_eq!(mem.fragments.len(), 10);
    assert_eq!(mem.maps.len(), 1);
    // Each intentional fragment yields an abstract and a map-builder rule.
    assert_eq!(mem.rulebase.len(), 7 + 3 * 2);
}

#[test]
fn preprocessing_has_two_solved_alternatives() {
    let mem = memory();
    let root = resolve(&goal(&mem, PREPROCESS), &mem, Limits::default());
    assert_eq!(root.status, Status::Solved);
    let rules: Vec<&Iri> = root.alternatives.iter().map(|a| &a.rule).collect();
    assert_eq!(rules, [&frag("preprocess-chain/abstract"), &frag("preprocess-rotation/abstract")]);
    assert!(root.alternatives.iter().all(|a| a.status == Status::Solved));
    assert_eq!(enumerate_plans(&root).len(), 2);

    let text = explain(&root, &mem.prefixes);
    assert!(text.contains("frag:preprocess-chain/abstract"));
    assert!(text.contains("frag:preprocess-rotation/abstract"));
    assert!(text.contains("matched services: svc:N4Debias"));
}

#[test]
fn retiring_rotation_leaves_one_plan() {
    let mem = memory().retire(&Iri::new("http://satis.example/services#Rotate").unwrap()).unwrap();
    let plans = enumerate_plans(&resolve(&goal(&mem, PREPROCESS), &mem, Limits::default()));
    assert_eq!(plans.len(), 1);
    assert_eq!(plans[0].choices[0].rule, frag("preprocess-chain/abstract"));
}

#[test]
fn second_debiasing_service_is_found_without_fragment_edits() {
    let base = memory();
    let extra = ServiceDescription {
        id: Iri::new("http://satis.example/services#SplineDebias").unwrap(),
        name: "spline bias correction".into(),
        inputs: [dom("Image")].into(),
        outputs: [dom("DebiasedImage")].into(),
        grounding: "http://services.example.org/spline-debias".into(),
    };
    let mem = base.publish(extra.clone()).unwrap();
    assert_eq!(mem.fragments, base.fragments);
    let plans = enumerate_plans(&resolve(&goal(&mem, PREPROCESS), &mem, Limits::default()));
    assert_eq!(plans.len(), 2);
    for plan in &plans {
        let debias = plan.leaves.iter().find(|l| l.goal.target_verb == dom("Debiasing")).unwrap();
        assert_eq!(debias.candidates.len(), 2);
        assert!(debias.candidates.contains(&extra.id));
    }
}

#[test]
fn empty_registry_fails_everywhere() {
    let base = memory();
    let mem = base.with_registry(Default::default());
    let root = resolve(&goal(&mem, PREPROCESS), &mem, Limits::default());
    assert_eq!(root.status, Status::Failed);
    assert!(enumerate_plans(&root).is_empty());
    fn concrete_all_empty(n: &satis_core::resolver::ResolutionNode) -> bool {
        n.alternatives.iter().all(|a| match &a.kind {
            AlternativeKind::Concrete { candidates } => candidates.is_empty(),
            AlternativeKind::Abstract { children, .. } => children.iter().all(concrete_all_empty),
            AlternativeKind::Broken { .. } => true,
        })
    }
    assert!(concrete_all_empty(&root));
}

#[test]
fn segmentation_refines_through_both_levels() {
    let mem = memory();
    let plans = enumerate_plans(&resolve(&goal(&mem, "verb=dom:Segmentation,object=dom:Image"), &mem, Limits::default()));
    assert_eq!(plans.len(), 3);
    assert!(plans.iter().all(|p| p.leaves.iter().all(|l| !l.candidates.is_empty())));
    let nested = plans.iter().filter(|p| p.choices.iter().filter(|c| c.path.is_some()).count() == 2).count();
    assert_eq!(nested, 2);
}

#[test]
fn applicability_follows_signatures() {
    let mem = memory();
    let g = goal(&mem, "verb=dom:Debiasing,object=dom:Image,source=start");
    let ids: Vec<&Iri> = applicable_rules(&g, &mem.rulebase, &mem.ontology).iter().map(|r| &r.id).collect();
    assert_eq!(ids, [&frag("debias/concrete")]);
    // A more specific object is still covered by a signature on its superclass.
    let raw = goal(&mem, "verb=dom:Debiasing,object=dom:RawImage");
    assert_eq!(applicable_rules(&raw, &mem.rulebase, &mem.ontology).len(), 1);
}

#[test]
fn strategy_slots_must_agree() {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(&fixture_dir(), dir.path());
    std::fs::write(
        dir.path().join("ontology/strategies.ttl"),
        "@prefix map: <http://satis.example/map#> .\n@prefix dom: <http://satis.example/domain#> .\n\
         dom:ByAtlas a map:Strategy .\ndom:ByHistogram a map:Strategy .\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("fragments/normalize-atlas.json"),
        r#"{"id": "frag:normalize-atlas", "kind": "operational",
            "signature": {"target": {"verb": "dom:Normalization", "object": "dom:Image"}, "strategy": "dom:ByAtlas"},
            "body": {"sparqlWhere": "?service owls:hasOutput dom:NormalizedImage ."}}"#,
    )
    .unwrap();
    let mem = load_memory(dir.path()).unwrap();
    let rules = |spec: &str| -> Vec<Iri> {
        applicable_rules(&goal(&mem, spec), &mem.rulebase, &mem.ontology).iter().map(|r| r.id.clone()).collect()
    };
    let base = "verb=dom:Normalization,object=dom:Image";
    assert_eq!(rules(base), [frag("normalize/concrete")]);
    assert_eq!(rules(&format!("{base},strategy=dom:ByAtlas")), [frag("normalize-atlas/concrete"), frag("normalize/concrete")]);
    assert_eq!(rules(&format!("{base},strategy=dom:ByHistogram")), [frag("normalize/concrete")]);
}

fn copy_dir(from: &std::path::Path, to: &std::path::Path) {
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            std::fs::create_dir_all(&target).unwrap();
            copy_dir(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), target).unwrap();
        }
    }
}

#[test]
fn self_refining_fragment_is_pruned() {
    let mem = memory();
    let cyclic = satis_core::fragment::parse_manifest(
        r#"{"id": "frag:loop", "kind": "intentional",
            "signature": {"target": {"verb": "dom:Denoising", "object": "dom:Image"}, "source": "start"},
            "body": {"map": {"sections": [
                {"id": "s1", "source": "start", "target": {"verb": "dom:Denoising", "object": "dom:Image"}},
                {"id": "s2", "source": {"verb": "dom:Denoising", "object": "dom:Image"}, "target": "stop"}]}}}"#,
    )
    .unwrap();
    let f = satis_core::fragment::fragment_from_manifest(&cyclic, &mem.prefixes).unwrap();
    let mem = Memory::from_parts(&mem.asserted, Vec::new(), vec![f], Vec::new()).unwrap();
    let root = resolve(&goal(&mem, "verb=dom:Denoising,object=dom:Image,source=start"), &mem, Limits::default());
    assert_eq!(root.status, Status::PrunedCycle);
    assert!(explain(&root, &mem.prefixes).contains("repeats an ancestor: verb=dom:Denoising,object=dom:Image,source=start"));
}

#[test]
fn depth_limit_prunes() {
    let mem = memory();
    let root = resolve(&goal(&mem, PREPROCESS), &mem, Limits { max_depth: 1, entail: true });
    assert_eq!(root.status, Status::PrunedDepth);
    assert!(enumerate_plans(&root).is_empty());
}

#[test]
fn fixture_roundtrips() {
    let mem = memory();
    for sub in ["ontology", "services", "maps"] {
        for entry in std::fs::read_dir(fixture_dir().join(sub)).unwrap() {
            let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
            let g = parse_turtle(&text, None).unwrap();
            assert!(is_isomorphic(&g, &parse_turtle(&serialize_turtle(&g), None).unwrap()));
        }
    }
    let mut maps = mem.maps.clone();
    maps.extend(mem.fragments.iter().filter_map(|f| match &f.body {
        FragmentBody::Map(m) => Some(m.clone()),
        FragmentBody::Query { .. } => None,
    }));
    assert_eq!(maps.len(), 4);
    for m in &maps {
        assert_eq!(&map_from_rdf(&map_to_rdf(m), m.id()).unwrap(), m);
    }
    let reg = registry_from_rdf(&registry_graph(&mem.registry)).unwrap();
    assert!(reg.services().eq(mem.registry.services()));

    let chain = mem.fragment(&frag("preprocess-chain")).unwrap();
    let FragmentBody::Map(chain) = &chain.body else { panic!("intentional") };
    assert_eq!(chain.sections().len(), 5);
    let top = &mem.maps[0];
    assert_eq!(top.ordinary_intentions().len(), 3);
    assert!(top.ordinary_intentions().iter().all(|i| matches!(i, Intention::Ordinary { .. })));
}

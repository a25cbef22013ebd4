use ecsy_core::devgraph::{check_link, DevGraph, EvidenceStatus, Link};
use ecsy_core::dsl::Library;
use ecsy_core::{fixtures, Error, Settings};

fn settings() -> Settings {
    Settings::default()
}

fn split_graph(nodes: &[&str], extra: &str) -> DevGraph {
    let mut lib = fixtures::split();
    lib.load(extra).unwrap();
    let mut g = DevGraph::new();
    g.declare(&lib).unwrap();
    for n in nodes {
        g.add_node(lib.ontology(n).unwrap().clone(), &settings()).unwrap();
    }
    g
}

const COLLAPSE: &str = "
morphism ca: toy_sig -> a_sig { b/1 -> a; }
morphism cb: toy_sig -> b_sig { a/1 -> b; }
";

#[test]
fn nodes() {
    let s = settings();
    let mut g = DevGraph::new();
    g.add_node(fixtures::ontology("CPL_ONTO"), &s).unwrap();
    assert_eq!(g.nodes().count(), 1);
    assert!(matches!(g.add_node(fixtures::ontology("CPL_ONTO"), &s), Err(Error::DuplicateName(_))));

    let lib = Library::parse(&format!(
        "{}\nontology LOOSE {{ base CPL; onto_signature {{ }} theory {{ x1; }} }}",
        fixtures::BASICS
    ))
    .unwrap();
    let err = g.add_node(lib.ontology("LOOSE").unwrap().clone(), &s).unwrap_err();
    assert!(matches!(err, Error::ValidationFailed(ref m) if m.contains("condition-3")), "{err}");
}

#[test]
fn links_and_cycles() {
    let s = settings();
    let mut g = split_graph(&["TOY_O", "A_O", "DUP"], "");
    let e = g.add_link(Link::theorem("TOY_O", "TOY_O"), &s, false).unwrap();
    assert!(matches!(e.status, EvidenceStatus::VerifiedUpTo { .. }));
    g.add_link(Link::splitting("TOY_O", "TOY_O", "m"), &s, false).unwrap();
    g.add_link(Link::theorem("TOY_O", "DUP"), &s, false).unwrap();
    assert!(matches!(g.add_link(Link::theorem("DUP", "TOY_O"), &s, false), Err(Error::Cycle(_))));
    assert!(matches!(g.add_link(Link::theorem("DUP", "TOY_O"), &s, true), Err(Error::Cycle(_))));
    assert!(matches!(g.add_link(Link::theorem("TOY_O", "NOPE"), &s, false), Err(Error::UnknownNode(_))));
    assert!(g.is_acyclic());

    // The toy language is not inside the fragment's, so only an assertion gets through.
    let err = g.add_link(Link::theorem("TOY_O", "A_O"), &s, false).unwrap_err();
    assert!(matches!(err, Error::Signature(_)), "{err}");
    let e = g.add_link(Link::theorem("TOY_O", "A_O"), &s, true).unwrap();
    assert_eq!(e.status, EvidenceStatus::Asserted);
    assert!(matches!(g.add_link(Link::splitting("TOY_O", "A_O", "pa"), &s, true), Err(Error::Config(_))));
}

#[test]
fn refuted_links_are_rejected() {
    let s = settings();
    let mut lib = fixtures::basics();
    lib.load("ontology CPL_O { base CPL; onto_signature { } axioms { } }").unwrap();
    lib.load("ontology RF_O { base RF; onto_signature { } axioms { } }").unwrap();
    let mut g = DevGraph::new();
    g.add_node(lib.ontology("CPL_O").unwrap().clone(), &s).unwrap();
    g.add_node(lib.ontology("RF_O").unwrap().clone(), &s).unwrap();
    let err = g.add_link(Link::theorem("CPL_O", "RF_O"), &s, false).unwrap_err();
    assert!(matches!(err, Error::EvidenceRefuted(ref m) if m.contains("{x1, imp(x1, x2)} |- x2")), "{err}");
    assert_eq!(g.links().count(), 0);
}

#[test]
fn homogeneous_refinement() {
    let g = fixtures::refinement_graph(&settings()).unwrap();
    assert!(g.verify_homogeneous_refinement("IMP_O", "CPL_ONTO").unwrap());
    assert!(!g.verify_homogeneous_refinement("CPL_ONTO", "IMP_O").unwrap());
    let empty = split_graph(&["TOY_O", "DUP"], "");
    assert!(!empty.verify_homogeneous_refinement("TOY_O", "DUP").unwrap());
    assert!(matches!(g.verify_homogeneous_refinement("IMP_O", "X"), Err(Error::UnknownNode(_))));
}

#[test]
fn heterogeneous_refinement() {
    let s = settings();
    let mut g = fixtures::refinement_graph(&s).unwrap();
    assert!(g.verify_heterogeneous_refinement("IMP_O", "BI_ONTO", "CPL_ONTO").unwrap());
    assert!(!g.verify_heterogeneous_refinement("BI_ONTO", "IMP_O", "CPL_ONTO").unwrap());

    g.remove_link(&Link::theorem("IMP_O", "CPL_ONTO")).unwrap();
    g.add_link(Link::theorem("CPL_ONTO", "IMP_O"), &s, true).unwrap();
    assert!(!g.verify_heterogeneous_refinement("IMP_O", "BI_ONTO", "CPL_ONTO").unwrap());

    let mut t = split_graph(&["TOY_O", "A_O"], COLLAPSE);
    t.add_link(Link::theorem("A_O", "A_O"), &s, false).unwrap();
    t.add_link(Link::definition("TOY_O", "A_O", "ca"), &s, false).unwrap();
    assert!(!t.verify_heterogeneous_refinement("A_O", "TOY_O", "A_O").unwrap());
}

#[test]
fn integration() {
    let s = settings();
    let g = fixtures::integration_graph(&s).unwrap();
    assert!(g.verify_integration("BI_ONTO", "IMP_O", "CONJ_ONTO", false).unwrap());
    assert!(g.verify_integration("BI_ONTO", "IMP_O", "CONJ_ONTO", true).unwrap());
    assert_eq!(
        g.find_integration("BI_ONTO", "IMP_O", "CONJ_ONTO", true).unwrap(),
        Some(("CPL_ONTO".to_string(), "JOINT".to_string()))
    );
    let mut without = g.clone();
    without.remove_link(&Link::theorem("CONJ_ONTO", "JOINT")).unwrap();
    assert!(!without.verify_integration("BI_ONTO", "IMP_O", "CONJ_ONTO", false).unwrap());

    let mut t = split_graph(&["TOY_O", "A_O", "B_O"], COLLAPSE);
    t.add_link(Link::theorem("A_O", "A_O"), &s, false).unwrap();
    t.add_link(Link::theorem("B_O", "B_O"), &s, false).unwrap();
    t.add_link(Link::definition("TOY_O", "A_O", "ca"), &s, false).unwrap();
    t.add_link(Link::definition("TOY_O", "B_O", "cb"), &s, false).unwrap();
    assert!(t.verify_integration("TOY_O", "A_O", "B_O", false).unwrap());
    assert!(!t.verify_integration("TOY_O", "A_O", "B_O", true).unwrap());
}

#[test]
fn decomposition() {
    let s = Settings { corpus_depth: 3, ..settings() };
    let mut g = fixtures::decomposition_graph(&s).unwrap();
    let r = g.verify_decomposition("TOY_O", &["A_O", "B_O"], &s).unwrap();
    assert!(r.passed(), "{r}");
    assert!(r.get("cone TOY_O").next().is_some(), "{r}");

    g.add_link(Link::splitting("DUP", "A_O", "pa"), &s, false).unwrap();
    g.add_link(Link::splitting("DUP", "B_O", "pb"), &s, false).unwrap();
    let r = g.verify_decomposition("TOY_O", &["A_O", "B_O"], &s).unwrap();
    assert!(!r.passed());
    assert!(r.get("cone DUP").next().unwrap().witness.contains("no splitting link"), "{r}");

    let mut skewed = g.clone();
    skewed.add_link(Link::splitting("DUP", "TOY_O", "skew"), &s, false).unwrap();
    let r = skewed.verify_decomposition("TOY_O", &["A_O", "B_O"], &s).unwrap();
    let line = r.get("cone DUP").next().unwrap();
    assert!(line.witness.starts_with("a(x1): composite gives a(a(x1))"), "{r}");

    g.add_link(Link::splitting("DUP", "TOY_O", "m"), &s, false).unwrap();
    assert!(g.verify_decomposition("TOY_O", &["A_O", "B_O"], &s).unwrap().passed());

    g.remove_link(&Link::splitting("TOY_O", "B_O", "pb")).unwrap();
    assert!(matches!(g.verify_decomposition("TOY_O", &["A_O", "B_O"], &s), Err(Error::MissingSplittingLink(_))));
}

#[test]
fn manifests_round_trip() {
    let s = settings();
    let empty = DevGraph::new();
    assert_eq!(DevGraph::load(&empty.save()).unwrap(), empty);

    let mut g = fixtures::refinement_graph(&s).unwrap();
    let split = fixtures::split();
    g.declare(&split).unwrap();
    for n in ["TOY_O", "A_O"] {
        g.add_node(split.ontology(n).unwrap().clone(), &s).unwrap();
    }
    g.add_link(Link::splitting("TOY_O", "A_O", "pa"), &s, false).unwrap();
    g.add_link(Link::theorem("A_O", "A_O"), &s, true).unwrap();
    let text = g.save();
    let back = DevGraph::load(&text).unwrap();
    assert_eq!(back, g);
    assert_eq!(back.save(), text);

    let cut = &text[..text.len() - 20];
    assert!(matches!(DevGraph::load(cut), Err(Error::Format(_))));
    let dangling = format!("{text}link theorem IMP_O -> NOPE verified 2 6 31 512;\n");
    assert!(matches!(DevGraph::load(&dangling), Err(Error::Format(_))));
    let cyclic = format!("{text}link theorem CPL_ONTO -> IMP_O assert;\n");
    assert!(matches!(DevGraph::load(&cyclic), Err(Error::Format(_))));
}

#[test]
fn stored_evidence_reproduces() {
    let s = settings();
    let g = fixtures::integration_graph(&s).unwrap();
    for (link, e) in g.links() {
        let EvidenceStatus::VerifiedUpTo { corpus_depth, fuel } = e.status else { continue };
        let again = check_link(
            g.declarations(),
            link,
            g.node(&link.from).unwrap(),
            g.node(&link.to).unwrap(),
            corpus_depth,
            &fuel,
        )
        .unwrap();
        assert_eq!(&again, e, "{link}");
    }
}

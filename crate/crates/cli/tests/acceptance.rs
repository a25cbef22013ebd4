//! One line per acceptance criterion. Exits non-zero if any criterion fails.

mod common;

use std::error::Error as StdError;
use std::time::Instant;

use ecsy_core::consequence::{check_operator_laws, probe_pnt, probe_pps, weaker_than, Corpus, Fuel, Verdict, Weakness};
use ecsy_core::devgraph::{DevGraph, Link, LinkKind};
use ecsy_core::dsl::Library;
use ecsy_core::fibring::{check_conservation, FibringSession, Side};
use ecsy_core::ontology::{connect, make_ontology, validate_ontology, Ontology};
use ecsy_core::report::Status;
use ecsy_core::{enumerate_formulas, fixtures, parse_formula, parse_formula_set, Settings, Signature};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, Box<dyn StdError>>;
type Criterion = (&'static str, fn() -> Check);

const SEED: u64 = 7;

fn fail<T>(msg: impl Into<String>) -> Result<T, Box<dyn StdError>> {
    Err(msg.into().into())
}

fn operator_laws() -> Check {
    let cpl = fixtures::cpl();
    let corpus = Corpus::new(cpl.signature(), 3, Corpus::DEFAULT_VARS)?;
    let start = Instant::now();
    let r = check_operator_laws(&cpl, &corpus, 200, &Fuel::default(), SEED)?;
    let took = start.elapsed().as_secs_f64();
    for law in ["extensivity", "monotonicity", "cut", "idempotence"] {
        if r.status_of(law) != Some(Status::Pass) {
            return fail(format!("{law} did not pass:\n{r}"));
        }
    }
    if took >= 10.0 {
        return fail(format!("took {took:.1}s"));
    }
    let cut = r.get("cut").next().map(|l| l.witness.clone()).unwrap_or_default();
    Ok(format!("CPL, 200 samples, {} formulas, cut: {cut}, {took:.1}s", corpus.len()))
}

const MIXED: &str = "
signature pn_sig { not/1; imp/2; }
calculus PN over pn_sig { rule mp: x1, imp(x1, x2) |- x2; negation not; }
signature box_sig { box/1; }
calculus NEC over box_sig { rule nec: x1 |- box(x1); }
";

fn translation_round_trip() -> Check {
    let lib = Library::parse(MIXED)?;
    let (pn, nec) = (lib.calculus("PN")?, lib.calculus("NEC")?);
    let s = FibringSession::open(pn, nec, Fuel::default())?;
    let formulas = enumerate_formulas(s.union_signature(), 4, 2)?;
    for phi in &formulas {
        for side in [Side::Left, Side::Right] {
            let t = s.translate(side, phi)?;
            if let Some(sym) = t.foreign_symbol(s.calculus(side).signature()) {
                return fail(format!("translating {phi} to {side:?} kept {sym}"));
            }
            let back = s.substitute_back(&t)?;
            if &back != phi {
                return fail(format!("{phi} came back as {back}"));
            }
        }
    }
    Ok(format!("{} formulas x 2 sides, {} interned", formulas.len(), s.interning().len()))
}

fn conservation() -> Check {
    let fuel = Fuel::default();
    let (cpl, conj) = (fixtures::cpl(), fixtures::conj());
    let s = FibringSession::open(&cpl, &conj, fuel)?;
    let left = Corpus::new(cpl.signature(), 3, 1)?;
    let right = Corpus::new(conj.signature(), 3, 2)?;
    let mut out = Vec::new();
    for (side, corpus) in [(Side::Left, &left), (Side::Right, &right)] {
        let line = check_conservation(&s, side, corpus, &fuel)?;
        if line.status != Status::Pass {
            return fail(line.to_string());
        }
        out.push(line.to_string().replace('\t', " "));
    }
    let gamma = parse_formula_set("{and(x1, x2), imp(x1, x3)}", s.union_signature())?;
    let phi = parse_formula("x3", s.union_signature())?;
    match s.fibred_derives(&gamma, &phi)? {
        Verdict::Derived(n) if n <= 2 => out.push(format!("worked example round={n}")),
        v => return fail(format!("worked example: {v}")),
    }
    Ok(out.join("; "))
}

const SMALL_BASES: &[&str] = &["CPL", "IMP", "CONJ", "BI", "TOY", "A_PART", "B_PART", "RF", "EMPTY"];

fn random_ontology(lib: &Library, rng: &mut ChaCha8Rng, name: &str) -> Result<Ontology, Box<dyn StdError>> {
    let base = lib.calculus(SMALL_BASES.choose(rng).expect("non-empty"))?;
    let onto_sig = Signature::from_symbols(base.signature().symbols().filter(|_| rng.random_bool(0.5)).cloned());
    let pool: Vec<_> =
        Corpus::new(base.signature(), 2, 2)?.formulas().iter().filter(|f| !f.is_var()).cloned().collect();
    let count = if pool.is_empty() { 0 } else { rng.random_range(0..=2) };
    let axioms: Vec<_> = pool.choose_multiple(rng, count).cloned().collect();
    Ok(make_ontology(base, onto_sig, axioms, name)?)
}

fn connection_validity() -> Check {
    let lib = fixtures::library();
    let settings = Settings::default();
    let fuel = settings.fuel;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut axioms = 0;
    let mut pairs = Vec::new();
    for i in 0..10 {
        let o1 = random_ontology(&lib, &mut rng, &format!("L{i}"))?;
        let o2 = random_ontology(&lib, &mut rng, &format!("R{i}"))?;
        let joint = connect(&o1, &o2, &format!("J{i}"), &fuel)?;
        let r = validate_ontology(&joint, &settings)?;
        if let Some(l) = r.failures().next() {
            return fail(format!("J{i} = {} + {}: {l}", o1.base().name(), o2.base().name()));
        }
        let s = FibringSession::open(o1.effective(), o2.effective(), fuel)?;
        for a in joint.axioms() {
            if !s.fibred_derives_with(&[], a, &fuel.with_rounds(2))?.is_derived() {
                return fail(format!("J{i}: {a} not fibred-derivable from {{}} in 2 rounds"));
            }
            axioms += 1;
        }
        pairs.push(format!("{}+{}", o1.base().name(), o2.base().name()));
    }
    Ok(format!("10 pairs ({}), {axioms} substituted axioms", pairs.join(" ")))
}

fn weakness() -> Check {
    let fuel = Fuel::default();
    let (imp, cpl, rf) = (fixtures::imp_fragment(), fixtures::cpl(), fixtures::rule_free());
    let up = weaker_than(&imp, &cpl, 3, &fuel)?;
    if !up.full.is_verified() {
        return fail(format!("IMP <= CPL: {}", up.full));
    }
    let down = weaker_than(&cpl, &rf, 2, &fuel)?;
    let Weakness::Refuted { gamma, phi, .. } = &down.full else {
        return fail(format!("CPL <= RF: {}", down.full));
    };
    let mp = parse_formula_set("{x1, imp(x1, x2)}", cpl.signature())?;
    if *gamma != mp || phi.to_string() != "x2" {
        return fail(format!("CPL <= RF refuted with an unexpected witness: {}", down.full));
    }
    Ok(format!("IMP <= CPL {}; CPL <= RF {}", up.full, down.full))
}

fn principles() -> Check {
    let fuel = Fuel::default();
    let (cpl, rf) = (fixtures::cpl(), fixtures::rule_free());
    let corpus = Corpus::new(cpl.signature(), 2, Corpus::DEFAULT_VARS)?;
    let pps = probe_pps(&cpl, &corpus, &fuel)?;
    if pps.status != Status::Pass {
        return fail(format!("CPL {pps}"));
    }
    let pnt = probe_pnt(&rf, &corpus, &fuel)?;
    let rf_pps = probe_pps(&rf, &corpus, &fuel)?;
    if pnt.status != Status::Found || rf_pps.status != Status::Fail {
        return fail(format!("RF {pnt} / {rf_pps}"));
    }
    Ok(format!("CPL PPS pass; RF PNT {}; RF PPS counter-instance {}", pnt.witness, rf_pps.witness))
}

const INCLUSIONS: &str = "
morphism ina: a_sig -> toy_sig { }
morphism inb: b_sig -> toy_sig { }
morphism idt: toy_sig -> toy_sig { }
";

/// Random mutations over renamed copies of the toy split ontologies.
fn random_mutations(settings: &Settings) -> Check {
    let mut split = fixtures::split();
    split.load(INCLUSIONS)?;
    let protos: Vec<Ontology> = split.ontologies().cloned().collect();
    let splittings: Vec<String> = split.splittings().map(|s| s.name.clone()).collect();
    let morphisms: Vec<String> = split.morphisms().map(|m| m.name.clone()).collect();
    let mut g = DevGraph::new();
    g.declare(&split)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut ok, mut rejected, mut fresh) = (0, 0, 0);
    for step in 0..1000 {
        let names: Vec<String> = g.nodes().map(|o| o.name().to_string()).collect();
        let outcome = if names.len() < 2 || rng.random_bool(0.12) {
            fresh += 1;
            let proto = protos.choose(&mut rng).expect("non-empty");
            g.add_node(proto.renamed(&format!("N{fresh}"))?, settings).map(|_| ())
        } else {
            let from = names.choose(&mut rng).expect("non-empty").clone();
            let to = names.choose(&mut rng).expect("non-empty").clone();
            let link = match rng.random_range(0..3) {
                0 => Link::theorem(&from, &to),
                1 => Link::splitting(&from, &to, splittings.choose(&mut rng).expect("non-empty")),
                _ => Link::definition(&from, &to, morphisms.choose(&mut rng).expect("non-empty")),
            };
            let assert = link.kind == LinkKind::Theorem && rng.random_bool(0.3);
            g.add_link(link, settings, assert).map(|_| ())
        };
        match outcome {
            Ok(()) => ok += 1,
            Err(_) => rejected += 1,
        }
        if !g.is_acyclic() {
            return fail(format!("cyclic after step {step}"));
        }
        let text = g.save();
        if DevGraph::load(&text)? != g {
            return fail(format!("save/load differs after step {step}"));
        }
    }
    Ok(format!(
        "1000 ops ({ok} applied, {rejected} rejected, {} nodes, {} links)",
        g.nodes().count(),
        g.links().count()
    ))
}

/// Holds on the full graph and fails once any single edge is gone.
fn edge_sensitive(
    name: &str,
    g: &DevGraph,
    verify: impl Fn(&DevGraph) -> Result<bool, Box<dyn StdError>>,
) -> Result<usize, Box<dyn StdError>> {
    if !verify(g)? {
        return fail(format!("{name} does not hold on the full fixture"));
    }
    let links: Vec<Link> = g.links().map(|(l, _)| l.clone()).collect();
    for l in &links {
        let mut cut = g.clone();
        cut.remove_link(l);
        if verify(&cut)? {
            return fail(format!("{name} still holds without {l}"));
        }
    }
    Ok(links.len())
}

fn graph_integrity() -> Check {
    let settings = Settings::default();
    let mutations = random_mutations(&settings)?;
    let refinement = fixtures::refinement_graph(&settings)?;
    let mut homogeneous = refinement.clone();
    homogeneous.remove_link(&Link::definition("BI_ONTO", "CPL_ONTO", "bi_in"));
    let hom = edge_sensitive("homogeneous refinement", &homogeneous, |g| {
        Ok(g.verify_homogeneous_refinement("IMP_O", "CPL_ONTO")?)
    })?;
    let het = edge_sensitive("heterogeneous refinement", &refinement, |g| {
        Ok(g.verify_heterogeneous_refinement("IMP_O", "BI_ONTO", "CPL_ONTO")?)
    })?;
    let integration = fixtures::integration_graph(&settings)?;
    let int = edge_sensitive("integration", &integration, |g| {
        Ok(g.verify_integration("BI_ONTO", "IMP_O", "CONJ_ONTO", false)?)
    })?;
    let decomposition = fixtures::decomposition_graph(&settings)?;
    let dec = edge_sensitive("decomposition", &decomposition, |g| {
        match g.verify_decomposition("TOY_O", &["A_O", "B_O"], &settings) {
            Ok(r) => Ok(r.passed()),
            Err(ecsy_core::Error::MissingSplittingLink(_)) => Ok(false),
            Err(e) => Err(e.into()),
        }
    })?;
    Ok(format!("{mutations}; edge deletions flip refinement ({hom}+{het}), integration ({int}), decomposition ({dec})"))
}

fn determinism() -> Check {
    let (a, b) = (tempfile::tempdir()?, tempfile::tempdir()?);
    let first = common::run_suite(a.path())?;
    let second = common::run_suite(b.path())?;
    if first != second {
        let at = first.bytes().zip(second.bytes()).take_while(|(x, y)| x == y).count();
        return fail(format!("transcripts differ at byte {at}"));
    }
    Ok(format!("{} commands, {} identical bytes", common::SUITE.len(), first.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("operator laws", operator_laws),
        ("translation round-trip", translation_round_trip),
        ("fibring conservation", conservation),
        ("connection validity", connection_validity),
        ("weakness evidence", weakness),
        ("principle probes", principles),
        ("graph integrity", graph_integrity),
        ("determinism", determinism),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {n} {name}: PASS [{secs:.1}s] {detail}"),
            Err(e) => {
                failed += 1;
                println!("criterion {n} {name}: FAIL [{secs:.1}s] {e}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

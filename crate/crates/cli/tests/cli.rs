mod common;

use common::{ecsy, prepare, run_suite};
use ecsy_core::devgraph::DevGraph;
use ecsy_core::dsl::Library;
use tempfile::TempDir;

fn workdir() -> TempDir {
    let d = tempfile::tempdir().unwrap();
    prepare(d.path());
    d
}

#[test]
fn check_reports() {
    let d = workdir();
    let ok = ecsy(d.path(), &["check", "cpl.ecsy"]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert!(ok.stdout.contains("# ontology CPL_ONTO\ncondition-1\tPASS"), "{}", ok.stdout);

    let bad = ecsy(d.path(), &["check", "arity.ecsy"]);
    assert_eq!(bad.code, 1);
    assert!(bad.stderr.contains("ArityError: `imp` at 4:12"), "{}", bad.stderr);

    let loose = ecsy(d.path(), &["check", "loose.ecsy"]);
    assert_eq!(loose.code, 1);
    assert!(loose.stderr.contains("condition-3\tFAIL\tx1 not derivable"), "{}", loose.stderr);

    assert_eq!(ecsy(d.path(), &["check", "missing.ecsy"]).code, 1);
    assert_eq!(ecsy(d.path(), &["check"]).code, 2);
}

#[test]
fn derive_verdicts() {
    let d = workdir();
    let r = ecsy(d.path(), &["derive", "--calc", "CPL", "--gamma", "mp.gamma", "x2"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "DERIVED depth=1\n"));
    let r = ecsy(d.path(), &["derive", "--calc", "CPL", "x1"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.stderr, "UNKNOWN bound=rounds:6,size:31,set:512\n");
    let r = ecsy(d.path(), &["--fuel-rounds", "3", "derive", "--calc", "CPL", "x1"]);
    assert!(r.stderr.starts_with("UNKNOWN bound=rounds:3"), "{}", r.stderr);
    assert_eq!(ecsy(d.path(), &["derive", "--calc", "NOPE", "x1"]).code, 2);
    assert_eq!(ecsy(d.path(), &["derive", "--calc", "CPL", "and(x1, x1)"]).code, 2);
    assert_eq!(ecsy(d.path(), &["--fuel-set", "0", "derive", "--calc", "CPL", "x1"]).code, 2);
    assert_eq!(ecsy(d.path(), &["derive", "--calc", "CPL", "--bogus", "x1"]).code, 2);
}

#[test]
fn fibre_and_dump() {
    let d = workdir();
    let args = ["fibre", "--left", "CPL", "--right", "CONJ", "--gamma", "worked.gamma", "--phi", "x3"];
    let r = ecsy(d.path(), &[&args[..], &["--rounds", "2", "--dump", "s.dump"]].concat());
    assert_eq!((r.code, r.stdout.as_str()), (0, "DERIVED round=2\n"), "{}", r.stderr);
    let dump = std::fs::read_to_string(d.path().join("s.dump")).unwrap();
    assert!(dump.starts_with("union { bot/0; not/1; and/2; imp/2; }\nfuel 2 31 512\n"), "{dump}");

    let r = ecsy(d.path(), &[&args[..], &["--rounds", "1"]].concat());
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("UNKNOWN"), "{}", r.stderr);
}

#[test]
fn connect_writes_a_valid_block() {
    let d = workdir();
    let r = ecsy(
        d.path(),
        &["--lib", "cpl.ecsy", "--lib", "conj.ecsy", "connect", "CPL_ONTO", "CONJ_ONTO", "--name", "JOINT"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(
        r.stdout.contains("ontology JOINT {\n  base JOINT_base;\n  onto_signature { bot/0; and/2; }"),
        "{}",
        r.stdout
    );
    assert!(r.stdout.contains("# validate JOINT\n"));
    let (block, report) = r.stdout.split_once("# validate JOINT\n").unwrap();
    let lib = Library::parse(block).unwrap();
    assert_eq!(lib.ontology("JOINT").unwrap().axioms().len(), 1);
    assert!(report.lines().all(|l| l.contains("\tPASS")), "{report}");
}

#[test]
fn graph_session() {
    let d = workdir();
    let dir = d.path();
    let manifest_round_trips = || {
        let text = std::fs::read_to_string(dir.join("ecsy.graph")).unwrap();
        assert_eq!(DevGraph::load(&text).unwrap().save(), text);
    };
    assert_eq!(ecsy(dir, &["graph", "add-node", "split.ecsy"]).code, 0);
    manifest_round_trips();
    for (to, m) in [("A_O", "pa"), ("B_O", "pb"), ("TOY_O", "m")] {
        let r = ecsy(dir, &["graph", "add-link", "splitting", "TOY_O", to, "--morphism", m]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        manifest_round_trips();
    }
    let r = ecsy(dir, &["graph", "verify-decomposition", "TOY_O", "A_O", "B_O"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);

    assert_eq!(ecsy(dir, &["graph", "add-link", "theorem", "TOY_O", "DUP"]).code, 0);
    let before = std::fs::read_to_string(dir.join("ecsy.graph")).unwrap();
    let r = ecsy(dir, &["graph", "add-link", "theorem", "DUP", "TOY_O"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("CycleError"), "{}", r.stderr);
    assert_eq!(std::fs::read_to_string(dir.join("ecsy.graph")).unwrap(), before);

    let r = ecsy(dir, &["graph", "add-link", "splitting", "TOY_O", "DUP", "--morphism", "m", "--assert"]);
    assert_eq!(r.code, 2);
    assert_eq!(ecsy(dir, &["graph", "add-link", "theorem", "TOY_O", "NOPE"]).code, 2);
    assert_eq!(ecsy(dir, &["graph", "add-link", "lemma", "TOY_O", "DUP"]).code, 2);
    assert_eq!(ecsy(dir, &["graph", "add-node", "loose.ecsy"]).code, 1);

    let r = ecsy(dir, &["graph", "add-node", "split.ecsy"]);
    assert_eq!((r.code, r.stdout.as_str()), (0, ""));
    assert_eq!(ecsy(dir, &["graph", "add-node", "cpl.ecsy", "--only", "NOPE"]).code, 2);

    let saved = ecsy(dir, &["graph", "save"]).stdout;
    assert_eq!(saved, before);
    std::fs::write(dir.join("broken.graph"), &saved[..saved.len() / 2]).unwrap();
    assert_eq!(ecsy(dir, &["--manifest", "x.graph", "graph", "load", "broken.graph"]).code, 2);
    assert!(!dir.join("x.graph").exists());
}

#[test]
fn suite_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run_suite(a.path()).unwrap();
    assert_eq!(first, run_suite(b.path()).unwrap());
}

//! Small calculi and ontologies used by tests, benches and the CLI examples.

use crate::consequence::Calculus;
use crate::devgraph::{DevGraph, Link};
use crate::dsl::{Library, Named};
use crate::error::Result;
use crate::morphisms::SignatureMorphism;
use crate::ontology::{connect, Ontology};
use crate::Settings;

/// Classical propositional logic over `not`, `imp` and the constant `bot`
/// (which no axiom mentions), the implicational fragment, a conjunction
/// calculus, and two degenerate calculi.
pub const BASICS: &str = "\
signature cpl_sig { bot/0; not/1; imp/2; }

calculus CPL over cpl_sig {
  axiom k: imp(x1, imp(x2, x1));
  axiom s: imp(imp(x1, imp(x2, x3)), imp(imp(x1, x2), imp(x1, x3)));
  axiom efq: imp(not(x1), imp(x1, x2));
  axiom clavius: imp(imp(not(x1), x1), x1);
  rule mp: x1, imp(x1, x2) |- x2;
  negation not;
}

signature imp_sig { imp/2; }

calculus IMP over imp_sig {
  axiom k: imp(x1, imp(x2, x1));
  axiom s: imp(imp(x1, imp(x2, x3)), imp(imp(x1, x2), imp(x1, x3)));
  rule mp: x1, imp(x1, x2) |- x2;
}

signature conj_sig { and/2; }

calculus CONJ over conj_sig {
  rule ande1: and(x1, x2) |- x1;
  rule ande2: and(x1, x2) |- x2;
  rule andi: x1, x2 |- and(x1, x2);
}

# nothing follows except the premises
calculus RF over cpl_sig {
  negation not;
}

signature empty_sig { }

calculus EMPTY over empty_sig { }

ontology CPL_ONTO {
  base CPL;
  onto_signature { bot/0; }
  axioms { imp(bot, x1); }
}

ontology CONJ_ONTO {
  base CONJ;
  onto_signature { and/2; }
  axioms { }
}

ontology EMPTY_ONTO {
  base EMPTY;
  onto_signature { }
  axioms { }
}
";

/// A toy calculus with two independent unary connectives, split into one
/// fragment per connective. `DUP` is a second cone over the two fragments
/// and `m` mediates it through `TOY`.
pub const SPLIT: &str = "\
signature toy_sig { a/1; b/1; }
signature a_sig { a/1; }
signature b_sig { b/1; }

calculus TOY over toy_sig {
  rule elim_a: a(x1) |- x1;
  rule elim_b: b(x1) |- x1;
}

calculus A_PART over a_sig {
  rule elim_a: a(x1) |- x1;
}

calculus B_PART over b_sig {
  rule elim_b: b(x1) |- x1;
}

splitting pa: toy_sig -> a_sig { b/1 -> a(x1); }
splitting pb: toy_sig -> b_sig { a/1 -> b(x1); }
splitting m: toy_sig -> toy_sig { }
splitting skew: toy_sig -> toy_sig { a/1 -> a(a(x1)); }

ontology TOY_O { base TOY; onto_signature { } axioms { } }
ontology A_O { base A_PART; onto_signature { } axioms { } }
ontology B_O { base B_PART; onto_signature { } axioms { } }
ontology DUP { base TOY; onto_signature { } axioms { } }
";

/// Extra nodes for the refinement and integration patterns: an implicational
/// calculus with `bot`, embedded in the classical one.
pub const PATTERNS: &str = "\
signature bi_sig { bot/0; imp/2; }

calculus BI over bi_sig {
  axiom k: imp(x1, imp(x2, x1));
  axiom s: imp(imp(x1, imp(x2, x3)), imp(imp(x1, x2), imp(x1, x3)));
  rule mp: x1, imp(x1, x2) |- x2;
}

morphism bi_in: bi_sig -> cpl_sig { }

ontology BI_ONTO {
  base BI;
  onto_signature { bot/0; }
  axioms { imp(bot, x1); }
}

ontology IMP_O {
  base IMP;
  onto_signature { }
  axioms { }
}
";

pub fn basics() -> Library {
    Library::parse(BASICS).expect("fixture parses")
}

pub fn split() -> Library {
    Library::parse(SPLIT).expect("fixture parses")
}

/// Every fixture block in one library.
pub fn library() -> Library {
    let mut lib = basics();
    lib.load(SPLIT).expect("fixture parses");
    lib.load(PATTERNS).expect("fixture parses");
    lib
}

pub fn cpl() -> Calculus {
    basics().calculus("CPL").expect("fixture").clone()
}

pub fn imp_fragment() -> Calculus {
    basics().calculus("IMP").expect("fixture").clone()
}

pub fn conj() -> Calculus {
    basics().calculus("CONJ").expect("fixture").clone()
}

pub fn rule_free() -> Calculus {
    basics().calculus("RF").expect("fixture").clone()
}

pub fn empty() -> Calculus {
    basics().calculus("EMPTY").expect("fixture").clone()
}

pub fn ontology(name: &str) -> Ontology {
    basics().ontology(name).expect("fixture").clone()
}

fn graph_with(lib: &Library, nodes: &[&str], settings: &Settings) -> Result<DevGraph> {
    let mut g = DevGraph::new();
    g.declare(lib)?;
    for n in nodes {
        g.add_node(lib.ontology(n)?.clone(), settings)?;
    }
    Ok(g)
}

fn patterns() -> Library {
    let mut lib = basics();
    lib.load(PATTERNS).expect("fixture parses");
    lib
}

/// `IMP_O ⇢ CPL_ONTO` and `BI_ONTO → CPL_ONTO` along an inclusion: the
/// heterogeneous refinement of `IMP_O` by `BI_ONTO`.
pub fn refinement_graph(settings: &Settings) -> Result<DevGraph> {
    let mut g = graph_with(&patterns(), &["IMP_O", "BI_ONTO", "CPL_ONTO"], settings)?;
    g.add_link(Link::theorem("IMP_O", "CPL_ONTO"), settings, false)?;
    g.add_link(Link::definition("BI_ONTO", "CPL_ONTO", "bi_in"), settings, false)?;
    Ok(g)
}

/// `BI_ONTO` integrates `IMP_O` and `CONJ_ONTO` through `CPL_ONTO` and the
/// connection `JOINT` of the classical and conjunction ontologies.
pub fn integration_graph(settings: &Settings) -> Result<DevGraph> {
    let mut lib = patterns();
    let joint = connect(lib.ontology("CPL_ONTO")?, lib.ontology("CONJ_ONTO")?, "JOINT", &settings.fuel)?;
    let bi = lib.signature("bi_sig")?.clone();
    let value = SignatureMorphism::inclusion(&bi, joint.signature())?;
    lib.add_ontology(joint)?;
    lib.add_morphism(Named { name: "bi_joint".into(), source: "bi_sig".into(), target: "JOINT_sig".into(), value })?;
    let mut g = graph_with(&lib, &["BI_ONTO", "IMP_O", "CONJ_ONTO", "CPL_ONTO", "JOINT"], settings)?;
    g.add_link(Link::theorem("IMP_O", "CPL_ONTO"), settings, false)?;
    g.add_link(Link::theorem("CONJ_ONTO", "JOINT"), settings, false)?;
    g.add_link(Link::definition("BI_ONTO", "CPL_ONTO", "bi_in"), settings, false)?;
    g.add_link(Link::definition("BI_ONTO", "JOINT", "bi_joint"), settings, false)?;
    Ok(g)
}

/// `TOY_O` split into `A_O` and `B_O`, with the identity as its own
/// mediating link.
pub fn decomposition_graph(settings: &Settings) -> Result<DevGraph> {
    let mut g = graph_with(&split(), &["TOY_O", "A_O", "B_O", "DUP"], settings)?;
    g.add_link(Link::splitting("TOY_O", "A_O", "pa"), settings, false)?;
    g.add_link(Link::splitting("TOY_O", "B_O", "pb"), settings, false)?;
    g.add_link(Link::splitting("TOY_O", "TOY_O", "m"), settings, false)?;
    Ok(g)
}

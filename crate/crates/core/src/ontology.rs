//! Ontologies: a calculus with an ontological sub-signature and an axiomatic
//! theory, their validation, morphisms between them, and connection by
//! fibring.

use std::collections::BTreeSet;

use crate::consequence::{check_operator_laws, weaker_on, Calculus, Corpus, Fuel, Rule, Weakness};
use crate::error::{Error, Result};
use crate::fibring::FibringSession;
use crate::morphisms::SignatureMorphism;
use crate::report::{Report, Status};
use crate::syntax::{show_set, Formula, Signature};
use crate::Settings;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontology {
    name: String,
    base: Calculus,
    onto_sig: Signature,
    axioms: Vec<Formula>,
    /// The axioms are premise-free rules of the effective calculus. When
    /// false the theory is only claimed to follow from the base.
    adjoined: bool,
    effective: Calculus,
}

fn check_onto_sig(onto_sig: &Signature, base: &Calculus) -> Result<()> {
    match onto_sig.symbols().find(|s| !base.signature().contains(s)) {
        Some(s) => Err(Error::OntoSig(format!(
            "{s} is in the ontological signature but not in {} of calculus {}",
            base.signature(),
            base.name()
        ))),
        None => Ok(()),
    }
}

fn prepare(base: &Calculus, onto_sig: &Signature, axioms: impl IntoIterator<Item = Formula>) -> Result<Vec<Formula>> {
    check_onto_sig(onto_sig, base)?;
    let axioms: BTreeSet<Formula> = axioms.into_iter().collect();
    for a in &axioms {
        a.check_language(base.signature())?;
    }
    Ok(axioms.into_iter().collect())
}

/// Ontology whose effective calculus is `base` plus one premise-free rule
/// per axiom, so every axiom is derivable from the empty set in one round.
pub fn make_ontology(
    base: &Calculus,
    onto_sig: Signature,
    axioms: impl IntoIterator<Item = Formula>,
    name: &str,
) -> Result<Ontology> {
    crate::syntax::check_identifier(name)?;
    let axioms = prepare(base, &onto_sig, axioms)?;
    let taken: BTreeSet<&str> = base.all_rules().map(|r| r.name.as_str()).collect();
    let mut extra = Vec::new();
    let mut k = 0;
    for a in &axioms {
        let rule_name = loop {
            k += 1;
            let candidate = format!("onto{k}");
            if !taken.contains(candidate.as_str()) {
                break candidate;
            }
        };
        extra.push(Rule::axiom(&rule_name, a.clone()));
    }
    let effective = base.with_axioms(name, extra)?;
    Ok(Ontology { name: name.to_string(), base: base.clone(), onto_sig, axioms, adjoined: true, effective })
}

impl Ontology {
    /// Ontology over `base` as is: the theory is claimed to be derivable,
    /// which [`validate_ontology`] checks.
    pub fn with_theory(
        base: &Calculus,
        onto_sig: Signature,
        theory: impl IntoIterator<Item = Formula>,
        name: &str,
    ) -> Result<Ontology> {
        crate::syntax::check_identifier(name)?;
        let axioms = prepare(base, &onto_sig, theory)?;
        let effective = base.renamed(name, base.signature_name())?;
        Ok(Ontology { name: name.to_string(), base: base.clone(), onto_sig, axioms, adjoined: false, effective })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &Calculus {
        &self.base
    }

    pub fn onto_sig(&self) -> &Signature {
        &self.onto_sig
    }

    /// The ontological theory, in canonical order.
    pub fn axioms(&self) -> &[Formula] {
        &self.axioms
    }

    pub fn adjoined(&self) -> bool {
        self.adjoined
    }

    /// The calculus whose consequences the ontology has.
    pub fn effective(&self) -> &Calculus {
        &self.effective
    }

    pub fn signature(&self) -> &Signature {
        self.base.signature()
    }

    /// Same content under another name.
    pub fn renamed(&self, name: &str) -> Result<Ontology> {
        if self.adjoined {
            make_ontology(&self.base, self.onto_sig.clone(), self.axioms.clone(), name)
        } else {
            Ontology::with_theory(&self.base, self.onto_sig.clone(), self.axioms.clone(), name)
        }
    }
}

/// Re-checks the three conditions: operator laws on random samples, the
/// ontological signature inside the base one, and every axiom derivable
/// from the empty set within the fuel.
pub fn validate_ontology(o: &Ontology, settings: &Settings) -> Result<Report> {
    let mut report = Report::new();
    let cal = o.effective();
    let corpus = Corpus::new(cal.signature(), settings.corpus_depth, Corpus::DEFAULT_VARS)?;
    let laws = if corpus.is_empty() {
        Report::new()
    } else {
        check_operator_laws(cal, &corpus, settings.samples, &settings.fuel, settings.seed)?
    };
    let status = if laws.passed() { Status::Pass } else { Status::Fail };
    report.push("condition-1", status, format!("operator laws on {} samples", settings.samples));
    report.extend(laws);

    match check_onto_sig(&o.onto_sig, &o.base) {
        Ok(()) => report.push("condition-2", Status::Pass, format!("{} <= {}", o.onto_sig, o.signature())),
        Err(e) => report.push("condition-2", Status::Fail, e.to_string()),
    }

    let mut missing = None;
    for a in &o.axioms {
        if !cal.derives(&[], a, &settings.fuel)?.is_derived() {
            missing = Some(a);
            break;
        }
    }
    match missing {
        None => report.push("condition-3", Status::Pass, format!("{} axioms derivable", o.axioms.len())),
        Some(a) => {
            report.push("condition-3", Status::Fail, format!("{a} not derivable from {{}} within ({})", settings.fuel))
        }
    }
    Ok(report)
}

/// Evidence that `h` is a morphism of ontologies `a → b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismEvidence {
    /// `h(C(Γ)) ⊆ C'(h(Γ))` on the corpus.
    pub consequence: Weakness,
    /// First symmetric-difference element of `h(Γ_a)` and `Γ_b`, if any.
    pub theory_mismatch: Option<String>,
}

impl MorphismEvidence {
    pub fn holds(&self) -> bool {
        self.consequence.is_verified() && self.theory_mismatch.is_none()
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        let status = if self.consequence.is_verified() { Status::Pass } else { Status::Fail };
        r.push("consequence-morphism", status, self.consequence.to_string());
        match &self.theory_mismatch {
            None => r.push("theory-image", Status::Pass, "h(axioms) equals target axioms"),
            Some(w) => r.push("theory-image", Status::Fail, w.clone()),
        }
        r
    }
}

/// The effective calculus of `b` seen through `h`: queries over the source
/// language are mapped along `h` first.
struct Along<'a> {
    h: &'a SignatureMorphism,
    target: &'a Calculus,
}

impl crate::consequence::Consequence for Along<'_> {
    fn label(&self) -> String {
        format!("h*{}", self.target.name())
    }

    fn signature(&self) -> &Signature {
        self.h.source()
    }

    fn derives(&self, gamma: &[Formula], phi: &Formula, fuel: &Fuel) -> Result<crate::consequence::Verdict> {
        let gamma = gamma.iter().map(|g| self.h.apply(g)).collect::<Result<Vec<_>>>()?;
        self.target.derives(&gamma, &self.h.apply(phi)?, fuel)
    }
}

/// Checks `h(C(Γ)) ⊆ C'(h(Γ))` for corpus `Γ` with at most two members,
/// and `h(Γ_a) = Γ_b` exactly.
pub fn check_ecsy_morphism(
    h: &SignatureMorphism,
    a: &Ontology,
    b: &Ontology,
    corpus_depth: usize,
    fuel: &Fuel,
) -> Result<MorphismEvidence> {
    if h.source() != a.signature() || h.target() != b.signature() {
        return Err(Error::Signature(format!(
            "morphism {} -> {} does not run from {} to {}",
            h.source(),
            h.target(),
            a.name(),
            b.name()
        )));
    }
    let corpus = Corpus::new(a.signature(), corpus_depth, Corpus::DEFAULT_VARS)?;
    let along = Along { h, target: b.effective() };
    let consequence = weaker_on(a.effective(), &along, &corpus, fuel)?.full;
    let image: BTreeSet<Formula> = a.axioms.iter().map(|f| h.apply(f)).collect::<Result<_>>()?;
    let target: BTreeSet<Formula> = b.axioms.iter().cloned().collect();
    let theory_mismatch = if let Some(f) = target.difference(&image).next() {
        Some(format!("{f} in {} has no preimage; h(axioms)={}", b.name(), show_set(&image)))
    } else {
        image.difference(&target).next().map(|f| format!("{f} missing from {}", b.name()))
    };
    Ok(MorphismEvidence { consequence, theory_mismatch })
}

/// Connection of two ontologies: the fibred calculus materialized over the
/// union signature, the union of the ontological signatures, and exactly
/// the images of both theories.
pub fn connect(o1: &Ontology, o2: &Ontology, name: &str, fuel: &Fuel) -> Result<Ontology> {
    let session = FibringSession::open(o1.base(), o2.base(), *fuel)?;
    let base = session.materialize(&format!("{name}_base"), &format!("{name}_sig"))?;
    let mut axioms = Vec::new();
    for a in o1.axioms() {
        axioms.push(normalize(&session.carry_left(a)?));
    }
    for a in o2.axioms() {
        axioms.push(normalize(&session.carry_right(a)?));
    }
    make_ontology(&base, o1.onto_sig().union(o2.onto_sig()), axioms, name)
}

/// Renames variables to `x1..xn` in order of first occurrence.
pub fn normalize(phi: &Formula) -> Formula {
    let order = phi.vars_in_order();
    phi.map_vars(&mut |v| order.iter().position(|&w| w == v).map(|i| Formula::var(i as u64 + 1)))
}

//! Executable, bounded versions of the closure-operator laws, structurality,
//! the weakness relation and the PNT/PNC/PPS principles.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::calculus::{Calculus, Fuel, Verdict};
use super::corpus::{show_query, Corpus};
use super::engine::{close_with, close_within, Closure, Seed, Universe};
use crate::error::{Error, Result};
use crate::report::{Line, Report, Status};
use crate::syntax::{show_set, Formula, SchemaVar, Signature, Substitution};

/// Anything that computes bounded closures over an explicit universe.
pub trait ClosureOperator {
    fn signature(&self) -> &Signature;

    /// Universe generated by `formulas`.
    fn universe(&self, formulas: &[Formula]) -> Universe;

    fn close(&self, gamma: &[Formula], universe: &Universe, fuel: &Fuel) -> Result<Closure>;

    /// Closure of the whole of `prior`, a closure over the same universe at
    /// the same fuel.
    fn close_again(&self, prior: &Closure, universe: &Universe, fuel: &Fuel) -> Result<Closure> {
        self.close(prior.sorted(), universe, fuel)
    }
}

impl ClosureOperator for Calculus {
    fn signature(&self) -> &Signature {
        Calculus::signature(self)
    }

    fn universe(&self, formulas: &[Formula]) -> Universe {
        self.universe_for(formulas)
    }

    fn close(&self, gamma: &[Formula], universe: &Universe, fuel: &Fuel) -> Result<Closure> {
        close_within(self, gamma, universe, fuel, None)
    }

    /// `prior` already holds `Ax(U)`; only its explicit members are passed
    /// on, with the axiom instances present from the start.
    fn close_again(&self, prior: &Closure, universe: &Universe, fuel: &Fuel) -> Result<Closure> {
        let gamma: Vec<Formula> = prior.explicit().cloned().collect();
        let seed = Seed { extra: None, with_axioms: true };
        close_with(self, &gamma, seed, universe, fuel, None)
    }
}

/// Bounded derivability, for checks that compare systems.
pub trait Consequence {
    fn label(&self) -> String;
    fn signature(&self) -> &Signature;
    fn derives(&self, gamma: &[Formula], phi: &Formula, fuel: &Fuel) -> Result<Verdict>;
}

impl Consequence for Calculus {
    fn label(&self) -> String {
        self.name().to_string()
    }

    fn signature(&self) -> &Signature {
        Calculus::signature(self)
    }

    fn derives(&self, gamma: &[Formula], phi: &Formula, fuel: &Fuel) -> Result<Verdict> {
        Calculus::derives(self, gamma, phi, fuel)
    }
}

fn dedup(mut v: Vec<Formula>) -> Vec<Formula> {
    v.sort();
    v.dedup();
    v
}

#[derive(Default)]
struct Tally {
    checked: usize,
    inconclusive: usize,
    vacuous: usize,
    failures: Vec<String>,
}

impl Tally {
    fn record(&mut self, outcome: Option<std::result::Result<(), String>>) {
        match outcome {
            None => self.inconclusive += 1,
            Some(Ok(())) => self.checked += 1,
            Some(Err(w)) => {
                self.checked += 1;
                self.failures.push(w);
            }
        }
    }

    fn report(self, law: &str, out: &mut Report) {
        const SHOWN: usize = 5;
        let status = if !self.failures.is_empty() {
            Status::Fail
        } else if self.checked == 0 && self.inconclusive > 0 {
            Status::Inconclusive
        } else {
            Status::Pass
        };
        let mut summary =
            format!("checked={} failed={} inconclusive={}", self.checked, self.failures.len(), self.inconclusive);
        if self.vacuous > 0 {
            summary.push_str(&format!(" vacuous={}", self.vacuous));
        }
        out.push(law, status, summary);
        for w in self.failures.into_iter().take(SHOWN) {
            out.push(law, Status::Fail, w);
        }
    }
}

/// Ok(None) when the set cap was hit.
fn bounded(r: Result<Closure>) -> Result<Option<Closure>> {
    match r {
        Ok(c) => Ok(Some(c)),
        Err(Error::CapExceeded(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn first_missing<'a>(items: impl IntoIterator<Item = &'a Formula>, cl: &Closure) -> Option<&'a Formula> {
    items.into_iter().find(|f| !cl.contains(f))
}

/// Samples `samples` random `(Γ, Δ, A, B)` with `Δ ⊆ Γ` from the corpus
/// and checks, over the universe generated by `Γ ∪ {A}`:
///
/// * extensivity: `Γ ⊆ C(Γ)`;
/// * monotonicity: `C(Δ) ⊆ C(Γ)`;
/// * cut: `Δ ⊢ A` and `Γ ∪ {A} ⊢ B` give `Δ ∪ Γ ⊢ B` at doubled fuel;
/// * idempotence: `C(C(Γ)) ⊆ C(Γ)` with the right side at doubled fuel.
///
/// `A` is drawn from `Δ` a third of the time and `B` from the closure of
/// `Γ ∪ {A}` half of the time, so cut is rarely vacuous.
pub fn check_operator_laws(
    op: &dyn ClosureOperator,
    corpus: &Corpus,
    samples: usize,
    fuel: &Fuel,
    seed: u64,
) -> Result<Report> {
    fuel.validate()?;
    if samples == 0 {
        return Err(Error::Config("at least one sample is needed".into()));
    }
    let pool = corpus.formulas();
    if pool.is_empty() {
        return Err(Error::Config("empty corpus".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let big = fuel.doubled();
    let (mut ext, mut mono, mut cut, mut idem) =
        (Tally::default(), Tally::default(), Tally::default(), Tally::default());

    for _ in 0..samples {
        let n = rng.random_range(1..=3);
        let gamma = dedup((0..n).map(|_| pool.choose(&mut rng).expect("non-empty").clone()).collect());
        let delta: Vec<Formula> = gamma.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
        let a = match delta.choose(&mut rng) {
            Some(d) if rng.random_bool(1.0 / 3.0) => d.clone(),
            _ => pool.choose(&mut rng).expect("non-empty").clone(),
        };
        let mut seeds = gamma.clone();
        seeds.push(a.clone());
        let u = op.universe(&seeds);

        let cg = bounded(op.close(&gamma, &u, fuel))?;
        ext.record(cg.as_ref().map(|cl| match first_missing(&gamma, cl) {
            None => Ok(()),
            Some(m) => Err(format!("gamma={} missing={m}", show_set(&gamma))),
        }));

        let cd = bounded(op.close(&delta, &u, fuel))?;
        mono.record(match (&cd, &cg) {
            (Some(d), Some(g)) => Some(if d.is_subset_of(g) {
                Ok(())
            } else {
                let m = d.sorted().iter().find(|f| !g.contains(f)).expect("not a subset");
                Err(format!("delta={} gamma={} missing={m}", show_set(&delta), show_set(&gamma)))
            }),
            _ => None,
        });

        let gamma_a = dedup(seeds.clone());
        let cga = bounded(op.close(&gamma_a, &u, fuel))?;
        let b = match &cga {
            Some(cl) if rng.random_bool(0.5) => {
                let members: Vec<&Formula> = cl.explicit().collect();
                (*members.choose(&mut rng).expect("premises are members")).clone()
            }
            _ => pool.choose(&mut rng).expect("non-empty").clone(),
        };
        match (&cd, &cga) {
            (Some(d), Some(ga)) if d.contains(&a) && ga.contains(&b) => {
                let union = dedup(delta.iter().chain(&gamma).cloned().collect());
                cut.record(bounded(op.close(&union, &u, &big))?.map(|cl| {
                    if cl.contains(&b) {
                        Ok(())
                    } else {
                        Err(format!("delta={} A={a} gamma={} B={b}", show_set(&delta), show_set(&gamma)))
                    }
                }));
            }
            (Some(_), Some(_)) => cut.vacuous += 1,
            _ => cut.inconclusive += 1,
        }

        match &cg {
            Some(g) => {
                let again = bounded(op.close_again(g, &u, fuel))?;
                let wide = bounded(op.close(&gamma, &u, &big))?;
                idem.record(match (again, wide) {
                    (Some(again), Some(wide)) => Some(match again.sorted().iter().find(|f| !wide.contains(f)) {
                        None => Ok(()),
                        Some(m) => Err(format!("gamma={} missing={m}", show_set(&gamma))),
                    }),
                    _ => None,
                });
            }
            None => idem.inconclusive += 1,
        }
    }

    let mut report = Report::new();
    ext.report("extensivity", &mut report);
    mono.report("monotonicity", &mut report);
    cut.report("cut", &mut report);
    idem.report("idempotence", &mut report);
    Ok(report)
}

/// A random substitution on `x1..x{vars}`: a permutation when `renaming`,
/// otherwise each variable goes to a random corpus formula.
fn random_substitution(rng: &mut ChaCha8Rng, vars: u64, renaming: bool, pool: &[Formula]) -> Substitution {
    let mut sigma = Substitution::new();
    if renaming {
        let mut image: Vec<u64> = (1..=vars + 1).collect();
        for i in (1..image.len()).rev() {
            let j = rng.random_range(0..=i);
            image.swap(i, j);
        }
        for v in 1..=vars {
            sigma.insert(SchemaVar::new(v), Formula::var(image[v as usize - 1]));
        }
    } else {
        for v in 1..=vars {
            if rng.random_bool(0.75) {
                sigma.insert(SchemaVar::new(v), pool.choose(rng).expect("non-empty").clone());
            }
        }
    }
    sigma
}

/// Structurality, `σ(C(Γ)) ⊆ C(σ(Γ))`, on random `Γ` and random renamings
/// and general substitutions. The right side runs over the universe
/// generated by `σ(U)` with rounds and set bound doubled and the size bound
/// scaled by the largest value of `σ` (at least doubled), since `σ` can
/// grow every formula of a derivation by that factor.
pub fn check_structural(cal: &Calculus, corpus: &Corpus, samples: usize, fuel: &Fuel, seed: u64) -> Result<Report> {
    fuel.validate()?;
    let pool = corpus.formulas();
    if pool.is_empty() {
        return Err(Error::Config("empty corpus".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut renamings = Tally::default();
    let mut general = Tally::default();
    for k in 0..samples {
        let n = rng.random_range(1..=2);
        let gamma = dedup((0..n).map(|_| pool.choose(&mut rng).expect("non-empty").clone()).collect());
        let renaming = k % 2 == 0;
        let vars = gamma.iter().map(Formula::max_var).max().unwrap_or(0).max(cal.base_vars());
        let sigma = random_substitution(&mut rng, vars, renaming, pool);
        let tally = if renaming { &mut renamings } else { &mut general };
        tally.record(structural_instance(cal, &gamma, &sigma, fuel)?);
    }
    let mut report = Report::new();
    renamings.report("structural-renaming", &mut report);
    general.report("structural-general", &mut report);
    Ok(report)
}

/// One structurality instance; `None` when a set cap was hit.
pub fn structural_instance(
    cal: &Calculus,
    gamma: &[Formula],
    sigma: &Substitution,
    fuel: &Fuel,
) -> Result<Option<std::result::Result<(), String>>> {
    let u = cal.universe_for(gamma);
    let Some(cl) = bounded(close_within(cal, gamma, &u, fuel, None))? else {
        return Ok(None);
    };
    let image: Vec<Formula> = gamma.iter().map(|g| g.substitute(sigma)).collect();
    let u2 = u.map(|f| f.substitute(sigma), cal.base_vars());
    let factor = sigma.max_value_size().max(2);
    let escalated = Fuel { max_formula_size: fuel.max_formula_size.saturating_mul(factor), ..fuel.doubled() };
    let Some(target) = bounded(close_within(cal, &image, &u2, &escalated, None))? else {
        return Ok(None);
    };
    let missing = cl.explicit().map(|f| f.substitute(sigma)).find(|f| !target.contains(f));
    Ok(Some(match missing {
        None => Ok(()),
        Some(m) => Err(format!("gamma={} sigma={sigma} missing={m}", show_set(gamma))),
    }))
}

/// Outcome of a weakness check in one direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Weakness {
    /// Every corpus query derivable in the first system was derivable in the
    /// second (possibly only at the escalated fuel).
    VerifiedUpTo { depth: usize, fuel: Fuel },
    /// The first system derives `phi` from `gamma` at depth `depth`; the
    /// second does not even at `escalation`.
    Refuted { gamma: Vec<Formula>, phi: Formula, depth: u32, escalation: Fuel },
}

impl Weakness {
    pub fn is_verified(&self) -> bool {
        matches!(self, Weakness::VerifiedUpTo { .. })
    }
}

impl std::fmt::Display for Weakness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Weakness::VerifiedUpTo { depth, fuel } => write!(f, "VERIFIED depth={depth} fuel=({fuel})"),
            Weakness::Refuted { gamma, phi, depth, escalation } => {
                write!(f, "REFUTED {} depth={depth} escalation=({escalation})", show_query(gamma, phi))
            }
        }
    }
}

/// Evidence for `first ≤ second`, plus the partial variant that only looks
/// at consequences of the empty set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeaknessEvidence {
    pub full: Weakness,
    pub partial: Weakness,
    /// Queries the first system derived.
    pub derived: usize,
    /// Of those, queries the second system needed escalated fuel for.
    pub escalated: usize,
}

impl WeaknessEvidence {
    pub fn to_report(&self, law: &str) -> Report {
        let mut r = Report::new();
        let status = |w: &Weakness| if w.is_verified() { Status::Pass } else { Status::Fail };
        r.push(law, status(&self.full), self.full.to_string());
        r.push(format!("{law}-partial"), status(&self.partial), self.partial.to_string());
        r
    }
}

/// Bounded check that `first` is weaker than `second`: every `Γ ⊢ φ` with
/// `|Γ| ≤ 2` over the corpus of `first`'s language that `first` derives
/// within `fuel` is derived by `second` within `fuel`, or failing that
/// within doubled fuel. A refutation is reported for the query with the
/// shallowest derivation, then the earliest premise set and formula.
pub fn weaker_than(
    first: &dyn Consequence,
    second: &dyn Consequence,
    corpus_depth: usize,
    fuel: &Fuel,
) -> Result<WeaknessEvidence> {
    if !first.signature().leq(second.signature()) {
        return Err(Error::Signature(format!(
            "{} is over {} which is not included in {} of {}",
            first.label(),
            first.signature(),
            second.signature(),
            second.label()
        )));
    }
    let corpus = Corpus::new(first.signature(), corpus_depth, Corpus::DEFAULT_VARS)?;
    weaker_on(first, second, &corpus, fuel)
}

pub fn weaker_on(
    first: &dyn Consequence,
    second: &dyn Consequence,
    corpus: &Corpus,
    fuel: &Fuel,
) -> Result<WeaknessEvidence> {
    let escalation = fuel.doubled();
    // (depth, set index, formula index, gamma, phi)
    let mut worst: Option<(u32, usize, usize, Vec<Formula>, Formula)> = None;
    let mut worst_partial: Option<(u32, usize, usize, Vec<Formula>, Formula)> = None;
    let (mut derived, mut escalated) = (0, 0);
    for (gi, gamma) in corpus.premise_sets(2).enumerate() {
        for (fi, phi) in corpus.formulas().iter().enumerate() {
            let Verdict::Derived(d) = first.derives(&gamma, phi, fuel)? else {
                continue;
            };
            derived += 1;
            if second.derives(&gamma, phi, fuel)?.is_derived() {
                continue;
            }
            escalated += 1;
            if second.derives(&gamma, phi, &escalation)?.is_derived() {
                continue;
            }
            let key = (d, gi, fi);
            if worst.as_ref().is_none_or(|w| key < (w.0, w.1, w.2)) {
                worst = Some((d, gi, fi, gamma.clone(), phi.clone()));
            }
            if gamma.is_empty() && worst_partial.as_ref().is_none_or(|w| key < (w.0, w.1, w.2)) {
                worst_partial = Some((d, gi, fi, gamma.clone(), phi.clone()));
            }
        }
    }
    let verdict = |w: Option<(u32, usize, usize, Vec<Formula>, Formula)>| match w {
        None => Weakness::VerifiedUpTo { depth: corpus.depth(), fuel: *fuel },
        Some((depth, _, _, gamma, phi)) => Weakness::Refuted { gamma, phi, depth, escalation },
    };
    Ok(WeaknessEvidence { full: verdict(worst), partial: verdict(worst_partial), derived, escalated })
}

fn negate(cal: &Calculus, phi: &Formula) -> Result<Formula> {
    let neg =
        cal.negation().ok_or_else(|| Error::Config(format!("calculus {} has no designated negation", cal.name())))?;
    Ok(Formula::app(neg.clone(), vec![phi.clone()]))
}

/// PNT: some `Γ ⊬ B` within the bound.
pub fn probe_pnt(cal: &Calculus, corpus: &Corpus, fuel: &Fuel) -> Result<Line> {
    for gamma in corpus.premise_sets(2) {
        for b in corpus.formulas() {
            if !cal.derives(&gamma, b, fuel)?.is_derived() {
                return Ok(line("PNT", Status::Found, format!("{} within ({fuel})", show_query(&gamma, b))));
            }
        }
    }
    Ok(line("PNT", Status::NotFound, bound_text(corpus, fuel)))
}

/// PNC: some `Γ` and `φ` with neither `φ` nor its negation derivable.
pub fn probe_pnc(cal: &Calculus, corpus: &Corpus, fuel: &Fuel) -> Result<Line> {
    for gamma in corpus.premise_sets(2) {
        for phi in corpus.formulas() {
            let neg = negate(cal, phi)?;
            if !cal.derives(&gamma, phi, fuel)?.is_derived() && !cal.derives(&gamma, &neg, fuel)?.is_derived() {
                return Ok(line("PNC", Status::Found, format!("gamma={} phi={phi} within ({fuel})", show_set(&gamma))));
            }
        }
    }
    negate(cal, &Formula::var(1))?;
    Ok(line("PNC", Status::NotFound, bound_text(corpus, fuel)))
}

/// PPS: `Γ ∪ {A, ¬A} ⊢ B` for every corpus `Γ` (at most one premise), `A`
/// and `B`.
pub fn probe_pps(cal: &Calculus, corpus: &Corpus, fuel: &Fuel) -> Result<Line> {
    negate(cal, &Formula::var(1))?;
    for gamma in corpus.premise_sets(1) {
        for a in corpus.formulas() {
            let mut premises = gamma.clone();
            premises.push(a.clone());
            premises.push(negate(cal, a)?);
            let premises = dedup(premises);
            for b in corpus.formulas() {
                if !cal.derives(&premises, b, fuel)?.is_derived() {
                    return Ok(line(
                        "PPS",
                        Status::Fail,
                        format!("gamma={} A={a} B={b} within ({fuel})", show_set(&gamma)),
                    ));
                }
            }
        }
    }
    Ok(line("PPS", Status::Pass, bound_text(corpus, fuel)))
}

/// All three probes; `ConfigError` without a designated negation.
pub fn check_principles(cal: &Calculus, corpus: &Corpus, fuel: &Fuel) -> Result<Report> {
    let mut r = Report::new();
    for l in [probe_pnt(cal, corpus, fuel)?, probe_pnc(cal, corpus, fuel)?, probe_pps(cal, corpus, fuel)?] {
        r.push(l.law, l.status, l.witness);
    }
    Ok(r)
}

fn line(law: &str, status: Status, witness: String) -> Line {
    Line { law: law.to_string(), status, witness }
}

fn bound_text(corpus: &Corpus, fuel: &Fuel) -> String {
    format!("up to depth={} vars={} fuel=({fuel})", corpus.depth(), corpus.vars())
}

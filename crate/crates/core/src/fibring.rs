//! Fibring of two calculi: both component closures run on translations of
//! the current set into their own language, and the results are mapped back
//! into the combined language until nothing changes or the fuel runs out.

use std::cell::{OnceCell, RefCell};
use std::collections::HashSet;

use rustc_hash::FxHashMap;

use crate::consequence::{
    close_with, show_query, AxiomSet, Calculus, Closure, Consequence, Corpus, ExtraPremises, Fuel, Rule, Seed,
    Universe, Verdict,
};
use crate::error::{Error, Result};
use crate::morphisms::{substitute_back_with, translate_frozen, translate_with, Interning};
use crate::report::{Line, Status};
use crate::syntax::{Cursor, Formula, Signature, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Two calculi, their union signature and one interning table shared by
/// both translations. The table only grows, so a session has a single
/// writer.
#[derive(Debug)]
pub struct FibringSession {
    left: Calculus,
    right: Calculus,
    union_sig: Signature,
    fuel: Fuel,
    base_vars: u64,
    interning: RefCell<Interning>,
}

/// A component closure mapped back into the combined language. Axiom
/// instances stay symbolic.
#[derive(Debug)]
pub struct SideClosure {
    side: Side,
    explicit: Vec<Formula>,
    set: HashSet<Formula>,
    closure: Closure,
}

impl SideClosure {
    pub fn side(&self) -> Side {
        self.side
    }

    /// Premises and rule conclusions, mapped back.
    pub fn explicit(&self) -> &[Formula] {
        &self.explicit
    }

    pub fn contains(&self, s: &FibringSession, f: &Formula) -> bool {
        self.set.contains(f) || s.translate_existing(self.side, f).is_some_and(|t| self.closure.contains(&t))
    }

    /// Every member in canonical order, axiom instances included.
    pub fn materialize(&self, s: &FibringSession) -> Result<Vec<Formula>> {
        let mut out = self.closure.sorted().iter().map(|f| s.substitute_back(f)).collect::<Result<Vec<_>>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl FibringSession {
    pub fn open(left: &Calculus, right: &Calculus, fuel: Fuel) -> Result<Self> {
        fuel.validate()?;
        Ok(FibringSession {
            union_sig: left.signature().union(right.signature()),
            base_vars: left.base_vars().max(right.base_vars()),
            left: left.clone(),
            right: right.clone(),
            fuel,
            interning: RefCell::new(Interning::new()),
        })
    }

    pub fn left(&self) -> &Calculus {
        &self.left
    }

    pub fn right(&self) -> &Calculus {
        &self.right
    }

    pub fn calculus(&self, side: Side) -> &Calculus {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn union_signature(&self) -> &Signature {
        &self.union_sig
    }

    pub fn fuel(&self) -> Fuel {
        self.fuel
    }

    /// Snapshot of the shared table.
    pub fn interning(&self) -> Interning {
        self.interning.borrow().clone()
    }

    fn small(&self, side: Side) -> &Signature {
        self.calculus(side).signature()
    }

    /// `τ` for `side`, registering foreign subformulas.
    pub fn translate(&self, side: Side, phi: &Formula) -> Result<Formula> {
        phi.check_language(&self.union_sig)?;
        Ok(translate_with(self.small(side), &mut self.interning.borrow_mut(), phi))
    }

    /// `τ` for `side` without registering; `None` when some foreign
    /// subformula has no number yet.
    fn translate_existing(&self, side: Side, phi: &Formula) -> Option<Formula> {
        translate_frozen(self.small(side), &self.interning.borrow(), phi).ok()
    }

    /// `τ⁻¹`, shared by both sides.
    pub fn substitute_back(&self, phi: &Formula) -> Result<Formula> {
        substitute_back_with(&self.interning.borrow(), phi)
    }

    /// The closure of `gamma` under one component: translate, close, map
    /// back. Schema variables range over the subformulas of `gamma` and
    /// `x1..xn` for the larger schema arity of the two calculi.
    pub fn h_closure(&self, side: Side, gamma: &[Formula]) -> Result<SideClosure> {
        let u = Universe::new(gamma, self.base_vars);
        let tu = self.translate_universe(side, &u)?;
        let premises = gamma.iter().map(|g| self.translate(side, g)).collect::<Result<Vec<_>>>()?;
        let closure = close_with(self.calculus(side), &premises, Seed::default(), &tu, &self.fuel, None)?;
        self.side_closure(side, closure)
    }

    fn side_closure(&self, side: Side, closure: Closure) -> Result<SideClosure> {
        let explicit = closure.explicit().map(|f| self.substitute_back(f)).collect::<Result<Vec<_>>>()?;
        let set = explicit.iter().cloned().collect();
        Ok(SideClosure { side, explicit, set, closure })
    }

    fn translate_universe(&self, side: Side, u: &Universe) -> Result<Universe> {
        let items = u.items().iter().map(|f| self.translate(side, f)).collect::<Result<Vec<_>>>()?;
        Ok(Universe::new(&items, 0))
    }

    /// Bounded fibred derivability with the session fuel.
    pub fn fibred_derives(&self, gamma: &[Formula], phi: &Formula) -> Result<Verdict> {
        self.fibred_derives_with(gamma, phi, &self.fuel)
    }

    /// Alternation `S₀ = Γ`, `S_{n+1} = S_n ∪ h_left(S_n) ∪ h_right(S_n)`,
    /// for at most `fuel.max_closure_rounds` alternations; each component
    /// closure runs with the whole of `fuel`. `Derived(n)` means `phi ∈ S_n`.
    ///
    /// Schema variables of both calculi range over the subformulas of
    /// `gamma ∪ {phi}` throughout. `CapExceeded` when `S_n` outgrows
    /// `fuel.max_set_size` or a component closure does.
    pub fn fibred_derives_with(&self, gamma: &[Formula], phi: &Formula, fuel: &Fuel) -> Result<Verdict> {
        Ok(self.alternate(gamma, Some(phi), fuel)?.verdict)
    }

    /// The explicit part of `S_n` for each alternation round run, for
    /// inspecting the sequence.
    pub fn fibred_sequence(&self, gamma: &[Formula], fuel: &Fuel) -> Result<Vec<Vec<Formula>>> {
        Ok(self.alternate(gamma, None, fuel)?.stages)
    }

    fn alternate(&self, gamma: &[Formula], goal: Option<&Formula>, fuel: &Fuel) -> Result<Alternation> {
        fuel.validate()?;
        for f in gamma.iter().chain(goal) {
            f.check_language(&self.union_sig)?;
        }
        let mut current: Vec<Formula> = gamma.to_vec();
        current.sort();
        current.dedup();
        let mut stages = vec![current.clone()];
        if goal.is_some_and(|g| current.contains(g)) {
            return Ok(Alternation { verdict: Verdict::Derived(0), stages });
        }
        let u = Universe::new(gamma.iter().chain(goal), self.base_vars);
        let sides = [Side::Left, Side::Right];
        let universes = [self.translate_universe(Side::Left, &u)?, self.translate_universe(Side::Right, &u)?];
        let axioms = [
            AxiomSet::new(&self.left, &universes[0], fuel.max_formula_size),
            AxiomSet::new(&self.right, &universes[1], fuel.max_formula_size),
        ];
        let mut known: HashSet<Formula> = current.iter().cloned().collect();
        for round in 1..=fuel.max_closure_rounds {
            let mut next = current.clone();
            for (k, &side) in sides.iter().enumerate() {
                let premises = current.iter().map(|f| self.translate(side, f)).collect::<Result<Vec<_>>>()?;
                let target = goal.map(|g| self.translate(side, g)).transpose()?;
                let other = OtherAxioms { session: self, this: side, axioms: &axioms[1 - k], index: OnceCell::new() };
                // Both sides' axiom instances are in S_n from round 2 on.
                let seed =
                    Seed { extra: (round >= 2).then_some(&other as &dyn ExtraPremises), with_axioms: round >= 2 };
                let cl = close_with(self.calculus(side), &premises, seed, &universes[k], fuel, target.as_ref())?;
                if target.as_ref().is_some_and(|t| cl.contains(t)) {
                    stages.push(next);
                    return Ok(Alternation { verdict: Verdict::Derived(round), stages });
                }
                for f in cl.explicit() {
                    let back = self.substitute_back(f)?;
                    if known.insert(back.clone()) {
                        next.push(back);
                    }
                }
            }
            if next.len() > fuel.max_set_size + gamma.len() {
                return Err(Error::CapExceeded(format!(
                    "fibred set reached {} formulas by round {round} (set cap {})",
                    next.len(),
                    fuel.max_set_size
                )));
            }
            let grew = next.len() > current.len();
            next.sort();
            stages.push(next.clone());
            current = next;
            // Round 1 adds the axiom instances, which round 2 must see.
            if !grew && round >= 2 {
                break;
            }
        }
        Ok(Alternation { verdict: Verdict::NotDerivedWithin(*fuel), stages })
    }

    /// A formula of one side's language carried into the combined language
    /// through that side's translation and substitution.
    pub fn carry(&self, side: Side, phi: &Formula) -> Result<Formula> {
        phi.check_language(self.small(side))?;
        let t = self.translate(side, phi)?;
        self.substitute_back(&t)
    }

    pub fn carry_left(&self, phi: &Formula) -> Result<Formula> {
        self.carry(Side::Left, phi)
    }

    pub fn carry_right(&self, phi: &Formula) -> Result<Formula> {
        self.carry(Side::Right, phi)
    }

    /// The fibred system as one calculus over the union signature: every
    /// schema of both sides carried into the combined language. Rule names
    /// get an `l_` or `r_` prefix; the negation is the left one if any.
    pub fn materialize(&self, name: &str, sig_name: &str) -> Result<Calculus> {
        let mut axioms = Vec::new();
        let mut rules = Vec::new();
        for (side, prefix) in [(Side::Left, "l_"), (Side::Right, "r_")] {
            for r in self.calculus(side).all_rules() {
                let premises = r.premises.iter().map(|p| self.carry(side, p)).collect::<Result<Vec<_>>>()?;
                let carried = Rule::new(&format!("{prefix}{}", r.name), premises, self.carry(side, &r.conclusion)?);
                if carried.is_axiom() {
                    axioms.push(carried);
                } else {
                    rules.push(carried);
                }
            }
        }
        let negation = self.left.negation().or(self.right.negation()).cloned();
        Calculus::new(name, sig_name, self.union_sig.clone(), axioms, rules, negation)
    }

    /// Union signature, fuel and interning table, one per line section.
    pub fn dump(&self) -> String {
        let decls: Vec<String> = self.union_sig.symbols().map(|s| format!("{s};")).collect();
        let f = self.fuel;
        format!(
            "union {{ {} }}\nfuel {} {} {}\n{}",
            decls.join(" "),
            f.max_closure_rounds,
            f.max_formula_size,
            f.max_set_size,
            self.interning.borrow().serialize()
        )
    }

    /// Reopens a dumped session over the same two calculi.
    pub fn restore(left: &Calculus, right: &Calculus, text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Format(format!("session dump: {m}"));
        let mut lines = text.splitn(3, '\n');
        let union_line = lines.next().ok_or_else(|| bad("missing union line"))?;
        let fuel_line = lines.next().ok_or_else(|| bad("missing fuel line"))?;
        let table = lines.next().unwrap_or("");

        let mut c = Cursor::new(union_line.strip_prefix("union").ok_or_else(|| bad("expected `union`"))?)?;
        let sig = crate::dsl::parse_decls(&mut c)?;
        c.finish()?;
        let nums: Vec<u64> = fuel_line
            .strip_prefix("fuel ")
            .ok_or_else(|| bad("expected `fuel`"))?
            .split(' ')
            .map(|t| t.parse().map_err(|_| bad("bad fuel field")))
            .collect::<Result<_>>()?;
        let [rounds, size, set] = nums[..] else {
            return Err(bad("fuel needs three fields"));
        };
        let fuel = Fuel::new(rounds as u32, size as u32, set as usize);
        let session = FibringSession::open(left, right, fuel)?;
        if session.union_sig != sig {
            return Err(bad("union signature does not match the calculi"));
        }
        *session.interning.borrow_mut() = Interning::deserialize(table, &sig)?;
        Ok(session)
    }
}

/// Conservation on one side: every corpus query over that side's language
/// derivable there within `fuel` is fibred-derivable with twice the rounds.
/// Premise sets have at most two members.
pub fn check_conservation(s: &FibringSession, side: Side, corpus: &Corpus, fuel: &Fuel) -> Result<Line> {
    let cal = s.calculus(side);
    let law = match side {
        Side::Left => "conservation-left",
        Side::Right => "conservation-right",
    };
    let wide = Fuel::new(fuel.max_closure_rounds * 2, fuel.max_formula_size, fuel.max_set_size);
    let (mut checked, mut inconclusive) = (0usize, 0usize);
    let mut witness = None;
    for gamma in corpus.premise_sets(2) {
        for phi in corpus.formulas() {
            if !cal.derives(&gamma, phi, fuel)?.is_derived() {
                continue;
            }
            checked += 1;
            match s.fibred_derives_with(&gamma, phi, &wide) {
                Ok(v) if v.is_derived() => {}
                Err(Error::CapExceeded(_)) => inconclusive += 1,
                Ok(_) => {
                    witness.get_or_insert_with(|| show_query(&gamma, phi));
                }
                Err(e) => return Err(e),
            }
        }
    }
    let summary = format!("checked={checked} inconclusive={inconclusive} depth={} fuel=({wide})", corpus.depth());
    Ok(match witness {
        None => Line { law: law.into(), status: Status::Pass, witness: summary },
        Some(w) => Line { law: law.into(), status: Status::Fail, witness: format!("{w} {summary}") },
    })
}

/// Fibring `a` with `b` and `b` with `a` give the same verdicts on the
/// corpus, which must be over the union signature.
pub fn check_symmetry(a: &Calculus, b: &Calculus, corpus: &Corpus, fuel: &Fuel) -> Result<Line> {
    let ab = FibringSession::open(a, b, *fuel)?;
    let ba = FibringSession::open(b, a, *fuel)?;
    let mut checked = 0usize;
    for gamma in corpus.premise_sets(2) {
        for phi in corpus.formulas() {
            checked += 1;
            let x = Consequence::derives(&ab, &gamma, phi, fuel)?.is_derived();
            let y = Consequence::derives(&ba, &gamma, phi, fuel)?.is_derived();
            if x != y {
                let w = format!(
                    "{} fib({},{})={x} fib({},{})={y}",
                    show_query(&gamma, phi),
                    a.name(),
                    b.name(),
                    b.name(),
                    a.name()
                );
                return Ok(Line { law: "symmetry".into(), status: Status::Fail, witness: w });
            }
        }
    }
    Ok(Line {
        law: "symmetry".into(),
        status: Status::Pass,
        witness: format!("checked={checked} depth={}", corpus.depth()),
    })
}

struct Alternation {
    verdict: Verdict,
    stages: Vec<Vec<Formula>>,
}

/// All instances, and the instances grouped by head symbol.
type HeadIndex = (Vec<Formula>, FxHashMap<Symbol, Vec<Formula>>);

/// The other side's axiom instances, translated into this side's language.
/// Membership is decided without building them; they are only listed when
/// a rule needs candidates of a shape they could have.
struct OtherAxioms<'a> {
    session: &'a FibringSession,
    this: Side,
    axioms: &'a AxiomSet,
    index: OnceCell<HeadIndex>,
}

impl OtherAxioms<'_> {
    fn index(&self) -> &HeadIndex {
        self.index.get_or_init(|| {
            let s = self.session;
            let mut all = Vec::new();
            let mut by_head: FxHashMap<Symbol, Vec<Formula>> = FxHashMap::default();
            for a in self.axioms.instances() {
                let Ok(back) = s.substitute_back(&a) else { continue };
                let f = translate_with(s.small(self.this), &mut s.interning.borrow_mut(), &back);
                if let Some(h) = f.head() {
                    by_head.entry(h.clone()).or_default().push(f.clone());
                }
                all.push(f);
            }
            (all, by_head)
        })
    }
}

impl ExtraPremises for OtherAxioms<'_> {
    fn contains(&self, f: &Formula) -> bool {
        if self.axioms.is_empty() {
            return false;
        }
        let s = self.session;
        let Ok(back) = s.substitute_back(f) else { return false };
        if s.translate_existing(self.this, &back).as_ref() != Some(f) {
            return false;
        }
        s.translate_existing(self.this.other(), &back).is_some_and(|a| self.axioms.contains(&a))
    }

    fn candidates(&self, head: Option<&Symbol>) -> &[Formula] {
        if self.axioms.is_empty() {
            return &[];
        }
        let other = self.session.small(self.this.other());
        if let Some(h) = head {
            // An instance keeps its head unless the schema is a bare variable.
            if !other.contains(h) && !self.axioms.has_variable_schema() {
                return &[];
            }
            return self.index().1.get(h).map_or(&[], Vec::as_slice);
        }
        &self.index().0
    }
}

impl Consequence for FibringSession {
    fn label(&self) -> String {
        format!("fib({}, {})", self.left.name(), self.right.name())
    }

    fn signature(&self) -> &Signature {
        &self.union_sig
    }

    /// Hitting a set cap is reported as not derived within the bound.
    fn derives(&self, gamma: &[Formula], phi: &Formula, fuel: &Fuel) -> Result<Verdict> {
        match self.fibred_derives_with(gamma, phi, fuel) {
            Err(Error::CapExceeded(_)) => Ok(Verdict::NotDerivedWithin(*fuel)),
            r => r,
        }
    }
}

//! Bounded forward chaining.
//!
//! A closure is computed relative to a finite instantiation universe `U`, a
//! subformula-closed set of formulas. Round `n` maps `S` to
//! `S ∪ Ax(U) ∪ fire(S)`, where
//!
//! * `Ax(U)` holds every instance of a premise-free schema whose variables
//!   are sent into `U` (within the size bound);
//! * `fire(S)` holds the conclusions of rule instances whose premises lie in
//!   `S`. If the conclusion schema is a subterm of a premise schema the rule
//!   is *analytic* and its conclusions are subformulas of its premises.
//!   Otherwise the instantiated conclusion must itself belong to `U`.
//!
//! For a fixed `U` this is a monotone, extensive operator whose iterates are
//! closed under uniform substitution (mapping `U` along), which is what the
//! law checks rely on.
//!
//! `Ax(U)` grows with the cube of `|U|` for a three-variable schema, so it is
//! never stored. Membership is decided by matching the schemas, and a rule
//! premise that should come from `Ax(U)` is left symbolic: the premise
//! pattern is unified with the schema and the schema variables are then bound
//! to members of `U`. Only conclusions are ever built.

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::calculus::{Calculus, Fuel, Rule, Verdict};
use super::unify::Terms;
use crate::error::{Error, Result};
use crate::syntax::{Formula, Symbol};

#[derive(Debug, Clone)]
enum Pat {
    Var(usize),
    App(Symbol, Box<[Pat]>),
}

impl Pat {
    fn compile(f: &Formula, slots: &mut Vec<u64>) -> Pat {
        match f {
            Formula::Var(v) => {
                let i = slots.iter().position(|&s| s == v.index()).unwrap_or_else(|| {
                    slots.push(v.index());
                    slots.len() - 1
                });
                Pat::Var(i)
            }
            Formula::App(_) => {
                Pat::App(f.head().expect("compound").clone(), f.args().iter().map(|a| Pat::compile(a, slots)).collect())
            }
        }
    }

    fn head(&self) -> Option<&Symbol> {
        match self {
            Pat::Var(_) => None,
            Pat::App(s, _) => Some(s),
        }
    }

    fn matches(&self, f: &Formula, binds: &mut [Option<Formula>], trail: &mut Vec<usize>) -> bool {
        match self {
            Pat::Var(i) => match &binds[*i] {
                Some(g) => g == f,
                None => {
                    binds[*i] = Some(f.clone());
                    trail.push(*i);
                    true
                }
            },
            Pat::App(s, args) => {
                f.head() == Some(s) && args.iter().zip(f.args()).all(|(p, a)| p.matches(a, binds, trail))
            }
        }
    }

    /// Matching that borrows the bindings from `f`.
    fn matches_ref<'f>(&self, f: &'f Formula, binds: &mut [Option<&'f Formula>]) -> bool {
        match self {
            Pat::Var(i) => match binds[*i] {
                Some(g) => g == f,
                None => {
                    binds[*i] = Some(f);
                    true
                }
            },
            Pat::App(s, args) => f.head() == Some(s) && args.iter().zip(f.args()).all(|(p, a)| p.matches_ref(a, binds)),
        }
    }

    /// Size of the instance; every slot must be bound.
    fn size(&self, binds: &[Option<Formula>]) -> u32 {
        match self {
            Pat::Var(i) => binds[*i].as_ref().expect("bound").size(),
            Pat::App(_, args) => args.iter().fold(1u32, |acc, a| acc.saturating_add(a.size(binds))),
        }
    }

    fn is_bound(&self, binds: &[Option<Formula>]) -> bool {
        match self {
            Pat::Var(i) => binds[*i].is_some(),
            Pat::App(_, args) => args.iter().all(|a| a.is_bound(binds)),
        }
    }

    fn instantiate(&self, binds: &[Option<Formula>]) -> Formula {
        match self {
            Pat::Var(i) => binds[*i].clone().expect("bound"),
            Pat::App(s, args) => Formula::app_iter(s.clone(), args.iter().map(|a| a.instantiate(binds))),
        }
    }

    /// Whether `self` could match `f`, ignoring repeated variables.
    fn could_match(&self, f: &Formula) -> bool {
        match self {
            Pat::Var(_) => true,
            Pat::App(s, args) => f.head() == Some(s) && args.iter().zip(f.args()).all(|(p, a)| p.could_match(a)),
        }
    }

    /// Necessary condition for `self` (under `binds`) to unify with the
    /// schema pattern `other`; allocation-free.
    fn compatible(&self, binds: &[Option<Formula>], other: &Pat) -> bool {
        match (self, other) {
            (_, Pat::Var(_)) => true,
            (Pat::Var(i), s) => binds[*i].as_ref().is_none_or(|f| s.could_match(f)),
            (Pat::App(a, xs), Pat::App(b, ys)) => {
                a == b && xs.iter().zip(ys.iter()).all(|(x, y)| x.compatible(binds, y))
            }
        }
    }

    /// Arena term: bound slots become concrete formulas, unbound slot `i`
    /// becomes `vars[i]`.
    fn to_term(&self, binds: &[Option<Formula>], vars: &[u32], terms: &mut Terms) -> u32 {
        match self {
            Pat::Var(i) => match binds.get(*i).and_then(Option::as_ref) {
                Some(f) => terms.fixed(f.clone()),
                None => vars[*i],
            },
            Pat::App(s, args) => {
                let kids: SmallVec<[u32; 4]> = args.iter().map(|a| a.to_term(binds, vars, terms)).collect();
                terms.app(s.clone(), &kids)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Axiom,
    Analytic,
    Synthetic,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledRule {
    kind: Kind,
    nvars: usize,
    /// Premises with compound and larger ones first.
    naive: Vec<Pat>,
    /// Analytic rules: plan `j` puts premise `j` first, to be drawn from the
    /// formulas that are new since the previous round.
    plans: Vec<Vec<Pat>>,
    conclusion: Pat,
    fixed_nodes: u32,
    occurrences: Vec<u32>,
}

impl CompiledRule {
    fn compile(rule: &Rule) -> CompiledRule {
        let kind = if rule.premises.is_empty() {
            Kind::Axiom
        } else if rule.premises.iter().any(|p| rule.conclusion.is_subformula_of(p)) {
            Kind::Analytic
        } else {
            Kind::Synthetic
        };
        let mut slots = Vec::new();
        let conclusion = Pat::compile(&rule.conclusion, &mut slots);
        let premises: Vec<(bool, u32, Pat)> =
            rule.premises.iter().map(|p| (p.is_var(), p.size(), Pat::compile(p, &mut slots))).collect();
        let ordered = |first: Option<usize>| -> Vec<Pat> {
            let mut idx: Vec<usize> = (0..premises.len()).filter(|&i| Some(i) != first).collect();
            idx.sort_by_key(|&i| (premises[i].0, std::cmp::Reverse(premises[i].1)));
            first.into_iter().chain(idx).map(|i| premises[i].2.clone()).collect()
        };
        let plans = match kind {
            Kind::Analytic => (0..premises.len()).map(|j| ordered(Some(j))).collect(),
            _ => Vec::new(),
        };

        let mut occurrences = vec![0u32; slots.len()];
        let mut var_nodes = 0;
        rule.conclusion.walk(&mut |f| {
            if let Formula::Var(v) = f {
                let i = slots.iter().position(|&s| s == v.index()).expect("slot");
                occurrences[i] += 1;
                var_nodes += 1;
            }
        });
        CompiledRule {
            kind,
            nvars: slots.len(),
            naive: ordered(None),
            plans,
            conclusion,
            fixed_nodes: rule.conclusion.size() - var_nodes,
            occurrences,
        }
    }

    /// Instances of a premise-free schema with variables ranging over
    /// `universe`, in lexicographic order of the variable assignment.
    fn instances(&self, universe: &Universe, cap: u32, out: &mut Vec<Formula>) {
        fn go(
            rule: &CompiledRule,
            items: &[Formula],
            slot: usize,
            used: u32,
            cap: u32,
            binds: &mut Vec<Option<Formula>>,
            out: &mut Vec<Formula>,
        ) {
            if slot == rule.nvars {
                out.push(rule.conclusion.instantiate(binds));
                return;
            }
            let occ = rule.occurrences[slot];
            for u in items {
                let used = used + occ * u.size();
                if used > cap {
                    break;
                }
                binds[slot] = Some(u.clone());
                go(rule, items, slot + 1, used, cap, binds, out);
            }
            binds[slot] = None;
        }
        if self.fixed_nodes + self.occurrences.iter().sum::<u32>() > cap {
            return;
        }
        let mut binds = vec![None; self.nvars];
        go(self, universe.items(), 0, self.fixed_nodes, cap, &mut binds, out);
    }
}

/// A calculus compiled for the engine.
#[derive(Debug)]
pub(crate) struct Compiled {
    axioms: Vec<CompiledRule>,
    rules: Vec<CompiledRule>,
}

impl Compiled {
    pub(crate) fn new<'a>(rules: impl IntoIterator<Item = &'a Rule>) -> Arc<Compiled> {
        let (axioms, rules) = rules.into_iter().map(CompiledRule::compile).partition(|r| r.kind == Kind::Axiom);
        Arc::new(Compiled { axioms, rules })
    }
}

#[derive(Debug, Default)]
struct UniverseInner {
    items: Vec<Formula>,
    set: HashSet<Formula>,
}

/// Finite, subformula-closed instantiation universe. Cheap to clone.
#[derive(Debug, Clone, Default)]
pub struct Universe(Arc<UniverseInner>);

impl PartialEq for Universe {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.items == other.0.items
    }
}

impl Eq for Universe {}

impl Universe {
    /// Subformulas of `formulas` together with `x1..x{base_vars}`.
    pub fn new<'a>(formulas: impl IntoIterator<Item = &'a Formula>, base_vars: u64) -> Self {
        let mut set = HashSet::new();
        for f in formulas {
            f.subformulas_into(&mut set);
        }
        for i in 1..=base_vars {
            set.insert(Formula::var(i));
        }
        let mut items: Vec<Formula> = set.iter().cloned().collect();
        items.sort();
        Universe(Arc::new(UniverseInner { items, set }))
    }

    /// Canonical order, so sizes ascend.
    pub fn items(&self) -> &[Formula] {
        &self.0.items
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.0.set.contains(f)
    }

    pub fn len(&self) -> usize {
        self.0.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.items.is_empty()
    }

    /// Universe generated by the images of the members.
    pub fn map(&self, f: impl FnMut(&Formula) -> Formula, base_vars: u64) -> Universe {
        let images: Vec<Formula> = self.0.items.iter().map(f).collect();
        Universe::new(&images, base_vars)
    }
}

/// `Ax(U)` within a size bound, kept symbolic.
#[derive(Debug, Clone)]
pub(crate) struct AxiomSet {
    compiled: Arc<Compiled>,
    universe: Universe,
    cap: u32,
}

impl AxiomSet {
    pub(crate) fn new(cal: &Calculus, universe: &Universe, cap: u32) -> Self {
        AxiomSet { compiled: cal.compiled().clone(), universe: universe.clone(), cap }
    }

    fn schemas(&self) -> &[CompiledRule] {
        &self.compiled.axioms
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.compiled.axioms.is_empty()
    }

    pub(crate) fn contains(&self, f: &Formula) -> bool {
        if f.size() > self.cap {
            return false;
        }
        self.schemas().iter().any(|s| {
            if s.conclusion.head().is_some_and(|h| f.head() != Some(h)) {
                return false;
            }
            let mut binds: SmallVec<[Option<&Formula>; 8]> = SmallVec::from_elem(None, s.nvars);
            s.conclusion.matches_ref(f, &mut binds) && binds.iter().flatten().all(|b| self.universe.contains(b))
        })
    }

    /// Some schema is a bare variable, so instances can have any head.
    pub(crate) fn has_variable_schema(&self) -> bool {
        self.schemas().iter().any(|s| s.conclusion.head().is_none())
    }

    /// Same schemas over the same universe with no larger size bound.
    fn within(&self, other: &AxiomSet) -> bool {
        Arc::ptr_eq(&self.compiled, &other.compiled) && self.universe == other.universe && self.cap <= other.cap
    }

    /// Every member, schema by schema.
    pub(crate) fn instances(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        for s in self.schemas() {
            s.instances(&self.universe, self.cap, &mut out);
        }
        out
    }
}

/// Premises supplied from outside the closure, present from round 0 on.
pub(crate) trait ExtraPremises {
    fn contains(&self, f: &Formula) -> bool;
    /// Members a premise headed by `head` could match; every member when
    /// `head` is `None`.
    fn candidates(&self, head: Option<&Symbol>) -> &[Formula];
}

/// Result of a bounded closure. Members are the premises and rule
/// conclusions stored explicitly, plus, from round 1 on, the axiom instances.
#[derive(Debug, Clone, Default)]
pub struct Closure {
    members: FxHashMap<Formula, u32>,
    all: Vec<Formula>,
    /// `all[round_start[n]..round_start[n + 1]]` holds round `n` additions.
    round_start: Vec<usize>,
    by_head: FxHashMap<Symbol, Vec<Formula>>,
    by_first: FxHashMap<(Symbol, Formula), Vec<Formula>>,
    axioms: Option<AxiomSet>,
    axiom_round: u32,
    derived: usize,
    rounds: u32,
    saturated: bool,
    materialized: OnceLock<Vec<Formula>>,
}

impl Closure {
    fn insert(&mut self, f: Formula, round: u32) -> bool {
        if self.members.contains_key(&f) {
            return false;
        }
        if let Some(h) = f.head() {
            self.by_head.entry(h.clone()).or_default().push(f.clone());
            if let Some(a) = f.args().first() {
                self.by_first.entry((h.clone(), a.clone())).or_default().push(f.clone());
            }
        }
        self.all.push(f.clone());
        self.members.insert(f, round);
        true
    }

    fn in_axioms(&self, f: &Formula) -> bool {
        self.axioms.as_ref().is_some_and(|a| a.contains(f))
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.members.contains_key(f) || self.in_axioms(f)
    }

    /// Round in which `f` first appeared (0 for premises).
    pub fn round_of(&self, f: &Formula) -> Option<u32> {
        match self.members.get(f) {
            Some(&r) => Some(r),
            None if self.in_axioms(f) => Some(self.axiom_round),
            None => None,
        }
    }

    /// Premises and rule conclusions, in insertion order.
    pub fn explicit(&self) -> impl Iterator<Item = &Formula> {
        self.all.iter()
    }

    /// Every member in canonical order. Axiom instances are enumerated on
    /// first use.
    pub fn sorted(&self) -> &[Formula] {
        self.materialized.get_or_init(|| {
            let mut set: HashSet<Formula> = self.all.iter().cloned().collect();
            if let Some(ax) = &self.axioms {
                set.extend(ax.instances());
            }
            let mut v: Vec<Formula> = set.into_iter().collect();
            v.sort();
            v
        })
    }

    pub fn to_set(&self) -> HashSet<Formula> {
        self.sorted().iter().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.sorted().len()
    }

    pub fn is_empty(&self) -> bool {
        self.all.is_empty() && self.axioms.as_ref().is_none_or(|a| a.instances().is_empty())
    }

    /// Formulas added by rule firings (premises and axiom instances are not
    /// counted).
    pub fn derived(&self) -> usize {
        self.derived
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    /// A round added nothing, so more rounds would not help.
    pub fn saturated(&self) -> bool {
        self.saturated
    }

    pub fn is_subset_of(&self, other: &Closure) -> bool {
        if !self.all.iter().all(|f| other.contains(f)) {
            return false;
        }
        match (&self.axioms, &other.axioms) {
            (None, _) => true,
            (Some(a), Some(b)) if a.within(b) => true,
            (Some(a), _) => a.instances().iter().all(|f| other.contains(f)),
        }
    }

    fn candidates(&self, p: &Pat, binds: &[Option<Formula>]) -> &[Formula] {
        match p {
            Pat::Var(_) => &self.all,
            Pat::App(s, args) => {
                if let Some(first) = args.first().filter(|a| a.is_bound(binds)) {
                    let key = (s.clone(), first.instantiate(binds));
                    return self.by_first.get(&key).map_or(&[], Vec::as_slice);
                }
                self.by_head.get(s).map_or(&[], Vec::as_slice)
            }
        }
    }
}

/// Everything a round may draw premises from.
#[derive(Clone, Copy)]
struct Pool<'a> {
    explicit: &'a Closure,
    /// `Ax(U)`, once it has entered the closure.
    axioms: Option<&'a AxiomSet>,
    extra: Option<&'a dyn ExtraPremises>,
    universe: &'a Universe,
    cap: u32,
}

impl Pool<'_> {
    fn contains(&self, f: &Formula) -> bool {
        self.explicit.members.contains_key(f)
            || self.axioms.is_some_and(|a| a.contains(f))
            || self.extra.is_some_and(|e| e.contains(f))
    }
}

struct Firing<'a> {
    rule: &'a CompiledRule,
    premises: &'a [Pat],
    pool: Pool<'a>,
    /// When set, the first premise must have been added in this round.
    delta: Option<u32>,
    binds: Vec<Option<Formula>>,
    trail: Vec<usize>,
    /// Premises left symbolic: (position, axiom schema).
    deferred: Vec<(usize, usize)>,
    terms: Terms,
}

impl<'a> Firing<'a> {
    fn new(rule: &'a CompiledRule, premises: &'a [Pat], pool: Pool<'a>, delta: Option<u32>) -> Self {
        Firing {
            rule,
            premises,
            pool,
            delta,
            binds: vec![None; rule.nvars],
            trail: Vec::new(),
            deferred: Vec::new(),
            terms: Terms::default(),
        }
    }

    fn undo(&mut self, to: usize) {
        while self.trail.len() > to {
            let i = self.trail.pop().expect("trail");
            self.binds[i] = None;
        }
    }

    fn try_candidates(&mut self, i: usize, cands: &[Formula], out: &mut Vec<Formula>) {
        let p = &self.premises[i];
        for f in cands {
            if f.size() > self.pool.cap {
                continue;
            }
            let mark = self.trail.len();
            if p.matches(f, &mut self.binds, &mut self.trail) {
                self.search(i + 1, out);
            }
            self.undo(mark);
        }
    }

    fn search(&mut self, i: usize, out: &mut Vec<Formula>) {
        if i == self.premises.len() {
            if self.deferred.is_empty() {
                let c = &self.rule.conclusion;
                if c.size(&self.binds) <= self.pool.cap {
                    out.push(c.instantiate(&self.binds));
                }
            } else {
                self.solve_deferred(out);
            }
            return;
        }
        let pool = self.pool;
        let p = &self.premises[i];
        let first_new = if i == 0 { self.delta } else { None };
        if p.is_bound(&self.binds) {
            if p.size(&self.binds) > pool.cap {
                return;
            }
            let f = p.instantiate(&self.binds);
            let ok = match first_new {
                Some(r) => pool.explicit.members.get(&f) == Some(&r),
                None => pool.contains(&f),
            };
            if ok {
                self.search(i + 1, out);
            }
            return;
        }
        if let Some(r) = first_new {
            let cl = pool.explicit;
            let start = cl.round_start[r as usize];
            let end = cl.round_start.get(r as usize + 1).copied().unwrap_or(cl.all.len());
            self.try_candidates(i, &cl.all[start..end], out);
            return;
        }
        self.try_candidates(i, pool.explicit.candidates(p, &self.binds), out);
        if let Some(extra) = pool.extra {
            self.try_candidates(i, extra.candidates(p.head()), out);
        }
        if let Some(ax) = pool.axioms {
            for (k, s) in ax.schemas().iter().enumerate() {
                if !p.compatible(&self.binds, &s.conclusion) {
                    continue;
                }
                self.deferred.push((i, k));
                self.search(i + 1, out);
                self.deferred.pop();
            }
        }
    }

    /// Completes an instance in which some premises are axiom instances yet
    /// to be chosen.
    fn solve_deferred(&mut self, out: &mut Vec<Formula>) {
        let ax = self.pool.axioms.expect("deferred premises need axioms");
        let mut terms = std::mem::take(&mut self.terms);
        terms.clear();
        let rule_vars: SmallVec<[u32; 8]> = (0..self.rule.nvars).map(|_| terms.var()).collect();
        let mut schema_vars: SmallVec<[u32; 16]> = SmallVec::new();
        let mut premises: SmallVec<[u32; 4]> = SmallVec::new();
        let mut ok = true;
        for &(i, k) in &self.deferred {
            let schema = &ax.schemas()[k];
            let vars: SmallVec<[u32; 8]> = (0..schema.nvars).map(|_| terms.var()).collect();
            let lhs = self.premises[i].to_term(&self.binds, &rule_vars, &mut terms);
            let rhs = schema.conclusion.to_term(&[], &vars, &mut terms);
            schema_vars.extend_from_slice(&vars);
            premises.push(lhs);
            if !terms.unify(lhs, rhs) {
                ok = false;
                break;
            }
        }
        let universe = self.pool.universe;
        let mut constraints: SmallVec<[u32; 16]> = SmallVec::new();
        if ok {
            for &v in &schema_vars {
                match terms.as_fixed(v) {
                    Some(f) if !universe.contains(f) => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => constraints.push(v),
                }
            }
        }
        if ok {
            constraints.sort_by_key(|&t| terms.rank(t));
            let conclusion = self.rule.conclusion.to_term(&self.binds, &rule_vars, &mut terms);
            let mut join = Join {
                terms: &terms,
                constraints: &constraints,
                premises: &premises,
                conclusion,
                universe,
                cap: self.pool.cap,
                env: vec![None; terms.len()],
                trail: Vec::new(),
            };
            join.run(0, out);
        }
        self.terms = terms;
    }
}

/// Binds the remaining schema variables to members of the universe.
struct Join<'a> {
    terms: &'a Terms,
    constraints: &'a [u32],
    premises: &'a [u32],
    conclusion: u32,
    universe: &'a Universe,
    cap: u32,
    env: Vec<Option<Formula>>,
    trail: Vec<u32>,
}

impl Join<'_> {
    fn run(&mut self, k: usize, out: &mut Vec<Formula>) {
        let terms = self.terms;
        if k == self.constraints.len() {
            let fits = |t: u32| terms.size(t, &self.env).is_some_and(|s| s <= self.cap);
            if self.premises.iter().all(|&t| fits(t)) && fits(self.conclusion) {
                out.push(terms.build(self.conclusion, &self.env));
            }
            return;
        }
        let t = self.constraints[k];
        // bound to a subformula of a universe member, hence a member
        if terms.is_var(t) && self.env[terms.walk(t) as usize].is_some() {
            self.run(k + 1, out);
            return;
        }
        for item in self.universe.items() {
            if item.size() > self.cap {
                break;
            }
            let mark = self.trail.len();
            if terms.matches(t, item, &mut self.env, &mut self.trail) {
                self.run(k + 1, out);
            }
            while self.trail.len() > mark {
                let v = self.trail.pop().expect("trail");
                self.env[v as usize] = None;
            }
        }
    }
}

fn fire(rule: &CompiledRule, pool: Pool<'_>, round: u32, out: &mut Vec<Formula>) {
    match rule.kind {
        Kind::Axiom => {}
        // The first two rounds run naively: round 2 is the first to see the
        // axiom instances, and all of them count as new there.
        Kind::Analytic if round <= 2 => Firing::new(rule, &rule.naive, pool, None).search(0, out),
        Kind::Analytic => {
            for plan in &rule.plans {
                Firing::new(rule, plan, pool, Some(round - 1)).search(0, out);
            }
        }
        Kind::Synthetic => {
            let mut st = Firing::new(rule, &rule.naive, pool, None);
            for u in pool.universe.items() {
                if u.size() > pool.cap {
                    break;
                }
                let mark = st.trail.len();
                if rule.conclusion.matches(u, &mut st.binds, &mut st.trail) {
                    st.search(0, out);
                }
                st.undo(mark);
            }
        }
    }
}

/// Forward chaining from `gamma` within `universe`, stopping early once
/// `goal` (if any) is a member.
///
/// Errors with `CapExceeded` when rule firings add more than
/// `fuel.max_set_size` formulas.
pub fn close_within(
    cal: &Calculus,
    gamma: &[Formula],
    universe: &Universe,
    fuel: &Fuel,
    goal: Option<&Formula>,
) -> Result<Closure> {
    close_with(cal, gamma, Seed::default(), universe, fuel, goal)
}

/// What a closure starts from besides its premises.
#[derive(Clone, Copy, Default)]
pub(crate) struct Seed<'a> {
    pub(crate) extra: Option<&'a dyn ExtraPremises>,
    /// `Ax(U)` is already among the premises, as when closing a closure.
    pub(crate) with_axioms: bool,
}

pub(crate) fn close_with(
    cal: &Calculus,
    gamma: &[Formula],
    seed: Seed<'_>,
    universe: &Universe,
    fuel: &Fuel,
    goal: Option<&Formula>,
) -> Result<Closure> {
    let extra = seed.extra;
    fuel.validate()?;
    for f in gamma.iter().chain(goal) {
        f.check_language(cal.signature())?;
    }
    let cap = fuel.max_formula_size;
    let axioms = AxiomSet::new(cal, universe, cap);
    let mut cl = Closure::default();
    cl.round_start.push(0);
    for g in gamma {
        if !(seed.with_axioms && axioms.contains(g)) {
            cl.insert(g.clone(), 0);
        }
    }
    cl.axiom_round = 1;
    if seed.with_axioms {
        cl.axioms = Some(axioms.clone());
        cl.axiom_round = 0;
    }
    let reached = |cl: &Closure| goal.is_some_and(|g| cl.contains(g));
    if reached(&cl) {
        return Ok(cl);
    }
    let mut fresh = Vec::new();
    for round in 1..=fuel.max_closure_rounds {
        fresh.clear();
        let pool =
            Pool { explicit: &cl, axioms: (round >= 2 || seed.with_axioms).then_some(&axioms), extra, universe, cap };
        for r in &cal.compiled().rules {
            fire(r, pool, round, &mut fresh);
        }
        cl.round_start.push(cl.all.len());
        let mut grew = round == 1 && !seed.with_axioms && !axioms.is_empty();
        for f in fresh.drain(..) {
            if axioms.contains(&f) || extra.is_some_and(|e| e.contains(&f)) {
                continue;
            }
            if cl.insert(f, round) {
                cl.derived += 1;
                grew = true;
            }
        }
        if round == 1 {
            cl.axioms = Some(axioms.clone());
        }
        cl.rounds = round;
        if cl.derived > fuel.max_set_size {
            return Err(Error::CapExceeded(format!(
                "closure added {} formulas by round {round} (set cap {})",
                cl.derived, fuel.max_set_size
            )));
        }
        if !grew {
            cl.saturated = true;
            break;
        }
        if reached(&cl) {
            break;
        }
    }
    Ok(cl)
}

impl Calculus {
    /// Universe used for queries about `formulas`.
    pub fn universe_for<'a>(&self, formulas: impl IntoIterator<Item = &'a Formula>) -> Universe {
        Universe::new(formulas, self.base_vars())
    }

    /// Closure of `gamma` over its own universe (subformulas of `gamma` plus
    /// the schema variables of the calculus).
    pub fn closure_bounded(&self, gamma: &[Formula], fuel: &Fuel) -> Result<Closure> {
        let u = self.universe_for(gamma);
        close_within(self, gamma, &u, fuel, None)
    }

    pub fn closure_within(&self, gamma: &[Formula], universe: &Universe, fuel: &Fuel) -> Result<Closure> {
        close_within(self, gamma, universe, fuel, None)
    }

    /// Bounded `gamma ⊢ phi`, over the universe of `gamma ∪ {phi}`.
    pub fn derives(&self, gamma: &[Formula], phi: &Formula, fuel: &Fuel) -> Result<Verdict> {
        let u = self.universe_for(gamma.iter().chain([phi]));
        self.derives_within(gamma, phi, &u, fuel)
    }

    /// Bounded `gamma ⊢ phi` over an explicit universe. Hitting the set cap
    /// yields `NotDerivedWithin`.
    pub fn derives_within(
        &self,
        gamma: &[Formula],
        phi: &Formula,
        universe: &Universe,
        fuel: &Fuel,
    ) -> Result<Verdict> {
        match close_within(self, gamma, universe, fuel, Some(phi)) {
            Ok(cl) => Ok(match cl.round_of(phi) {
                Some(d) => Verdict::Derived(d),
                None => Verdict::NotDerivedWithin(*fuel),
            }),
            Err(Error::CapExceeded(_)) => Ok(Verdict::NotDerivedWithin(*fuel)),
            Err(e) => Err(e),
        }
    }
}

/// Eager closure used as an oracle: `Ax(U)` is materialized and every rule
/// instance is found by plain backtracking over the whole set.
#[cfg(test)]
pub(crate) mod reference {
    use std::collections::{BTreeMap, BTreeSet};

    use super::*;

    fn instances(
        rule: &CompiledRule,
        set: &BTreeSet<Formula>,
        universe: &Universe,
        cap: u32,
        out: &mut BTreeSet<Formula>,
    ) {
        fn go(
            rule: &CompiledRule,
            i: usize,
            set: &BTreeSet<Formula>,
            universe: &Universe,
            cap: u32,
            binds: &mut Vec<Option<Formula>>,
            out: &mut BTreeSet<Formula>,
        ) {
            if i == rule.naive.len() {
                if let Some(slot) = binds.iter().position(Option::is_none) {
                    for u in universe.items() {
                        binds[slot] = Some(u.clone());
                        go(rule, i, set, universe, cap, binds, out);
                    }
                    binds[slot] = None;
                    return;
                }
                let c = rule.conclusion.instantiate(binds);
                if c.size() <= cap && (rule.kind != Kind::Synthetic || universe.contains(&c)) {
                    out.insert(c);
                }
                return;
            }
            for f in set.iter().filter(|f| f.size() <= cap) {
                let mut trail = Vec::new();
                if rule.naive[i].matches(f, binds, &mut trail) {
                    go(rule, i + 1, set, universe, cap, binds, out);
                }
                for t in trail {
                    binds[t] = None;
                }
            }
        }
        let mut binds = vec![None; rule.nvars];
        go(rule, 0, set, universe, cap, &mut binds, out);
    }

    /// Members with the round they first appear in.
    pub(crate) fn closure(
        cal: &Calculus,
        gamma: &[Formula],
        universe: &Universe,
        fuel: &Fuel,
    ) -> Result<BTreeMap<Formula, u32>> {
        let cap = fuel.max_formula_size;
        let axioms: BTreeSet<Formula> = AxiomSet::new(cal, universe, cap).instances().into_iter().collect();
        let base: BTreeSet<Formula> = gamma.iter().cloned().chain(axioms.iter().cloned()).collect();
        let mut first: BTreeMap<Formula, u32> = gamma.iter().map(|g| (g.clone(), 0)).collect();
        let mut set: BTreeSet<Formula> = gamma.iter().cloned().collect();
        for round in 1..=fuel.max_closure_rounds {
            let mut next = set.clone();
            if round == 1 {
                next.extend(axioms.iter().cloned());
            }
            for r in &cal.compiled().rules {
                instances(r, &set, universe, cap, &mut next);
            }
            for f in &next {
                first.entry(f.clone()).or_insert(round);
            }
            let derived = next.iter().filter(|f| !base.contains(*f)).count();
            if derived > fuel.max_set_size {
                return Err(Error::CapExceeded(format!("{derived}")));
            }
            if next == set {
                break;
            }
            set = next;
        }
        Ok(first)
    }
}

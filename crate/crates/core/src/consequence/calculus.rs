use std::collections::BTreeSet;
use std::fmt;

use std::sync::Arc;

use super::engine::Compiled;
use crate::error::{Error, Result};
use crate::syntax::{check_identifier, Formula, Signature, Symbol};

/// Inference rule schema; with no premises it is an axiom schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

impl Rule {
    pub fn new(name: &str, premises: Vec<Formula>, conclusion: Formula) -> Self {
        Rule { name: name.to_string(), premises, conclusion }
    }

    pub fn axiom(name: &str, conclusion: Formula) -> Self {
        Rule::new(name, Vec::new(), conclusion)
    }

    pub fn is_axiom(&self) -> bool {
        self.premises.is_empty()
    }

    fn max_var(&self) -> u64 {
        self.premises.iter().chain([&self.conclusion]).map(Formula::max_var).max().unwrap_or(0)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_axiom() {
            return write!(f, "axiom {}: {};", self.name, self.conclusion);
        }
        write!(f, "rule {}: ", self.name)?;
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, " |- {};", self.conclusion)
    }
}

/// Hilbert-style presentation: axiom schemas, rules, and an optional
/// designated negation.
#[derive(Debug, Clone)]
pub struct Calculus {
    name: String,
    sig_name: String,
    sig: Signature,
    axioms: Vec<Rule>,
    rules: Vec<Rule>,
    negation: Option<Symbol>,
    compiled: Arc<Compiled>,
    base_vars: u64,
}

impl PartialEq for Calculus {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.sig_name == other.sig_name
            && self.sig == other.sig
            && self.axioms == other.axioms
            && self.rules == other.rules
            && self.negation == other.negation
    }
}

impl Eq for Calculus {}

impl Calculus {
    /// Validates names, schema languages and the negation symbol. Rules
    /// without premises are treated as axioms wherever they are listed.
    pub fn new(
        name: &str,
        sig_name: &str,
        sig: Signature,
        axioms: Vec<Rule>,
        rules: Vec<Rule>,
        negation: Option<Symbol>,
    ) -> Result<Self> {
        check_identifier(name)?;
        check_identifier(sig_name)?;
        let mut names = BTreeSet::new();
        for r in axioms.iter().chain(&rules) {
            check_identifier(&r.name)?;
            if !names.insert(r.name.as_str()) {
                return Err(Error::DuplicateName(format!("rule `{}` in calculus `{name}`", r.name)));
            }
            for f in r.premises.iter().chain([&r.conclusion]) {
                f.check_language(&sig)?;
            }
        }
        if let Some(a) = axioms.iter().find(|a| !a.is_axiom()) {
            return Err(Error::Config(format!("axiom `{}` has premises", a.name)));
        }
        if let Some(n) = &negation {
            if n.arity() != 1 || !sig.contains(n) {
                return Err(Error::Config(format!("negation {n} must be a unary symbol of the signature")));
            }
        }
        let compiled = Compiled::new(axioms.iter().chain(&rules));
        let base_vars = axioms.iter().chain(&rules).map(Rule::max_var).max().unwrap_or(0);
        Ok(Calculus {
            name: name.to_string(),
            sig_name: sig_name.to_string(),
            sig,
            axioms,
            rules,
            negation,
            compiled,
            base_vars,
        })
    }

    /// No axioms and no rules: the closure of a set is the set itself.
    pub fn rule_free(name: &str, sig_name: &str, sig: Signature, negation: Option<Symbol>) -> Result<Self> {
        Calculus::new(name, sig_name, sig, Vec::new(), Vec::new(), negation)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature_name(&self) -> &str {
        &self.sig_name
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn axioms(&self) -> &[Rule] {
        &self.axioms
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn all_rules(&self) -> impl Iterator<Item = &Rule> {
        self.axioms.iter().chain(&self.rules)
    }

    pub fn negation(&self) -> Option<&Symbol> {
        self.negation.as_ref()
    }

    pub(crate) fn compiled(&self) -> &Arc<Compiled> {
        &self.compiled
    }

    /// Largest variable index used by any schema. Queries always let
    /// `x1..x{base_vars}` instantiate schema variables, so generic instances
    /// such as `imp(x1, imp(x2, x1))` are reachable from the empty set.
    pub fn base_vars(&self) -> u64 {
        self.base_vars
    }

    /// Copy with extra axiom schemas appended.
    pub fn with_axioms(&self, name: &str, extra: Vec<Rule>) -> Result<Calculus> {
        let mut axioms = self.axioms.clone();
        axioms.extend(extra);
        Calculus::new(name, &self.sig_name, self.sig.clone(), axioms, self.rules.clone(), self.negation.clone())
    }

    /// Renames the calculus and its signature.
    pub fn renamed(&self, name: &str, sig_name: &str) -> Result<Calculus> {
        Calculus::new(name, sig_name, self.sig.clone(), self.axioms.clone(), self.rules.clone(), self.negation.clone())
    }
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "calculus {} over {} {{", self.name, self.sig_name)?;
        for r in self.all_rules() {
            writeln!(f, "  {r}")?;
        }
        if let Some(n) = &self.negation {
            writeln!(f, "  negation {};", n.name())?;
        }
        f.write_str("}")
    }
}

/// Resource bounds for every derivability query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fuel {
    pub max_closure_rounds: u32,
    pub max_formula_size: u32,
    /// Bound on the formulas a closure may add by rule firings. Premises and
    /// axiom instances are not counted.
    pub max_set_size: usize,
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel { max_closure_rounds: 6, max_formula_size: 31, max_set_size: 512 }
    }
}

impl Fuel {
    pub fn new(rounds: u32, size: u32, set: usize) -> Self {
        Fuel { max_closure_rounds: rounds, max_formula_size: size, max_set_size: set }
    }

    pub fn with_rounds(self, rounds: u32) -> Self {
        Fuel { max_closure_rounds: rounds, ..self }
    }

    /// Every field doubled.
    pub fn doubled(self) -> Self {
        self.scaled(2)
    }

    pub fn scaled(self, factor: u32) -> Self {
        Fuel {
            max_closure_rounds: self.max_closure_rounds.saturating_mul(factor),
            max_formula_size: self.max_formula_size.saturating_mul(factor),
            max_set_size: self.max_set_size.saturating_mul(factor as usize),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_closure_rounds == 0 || self.max_formula_size == 0 || self.max_set_size == 0 {
            return Err(Error::Config(format!("fuel fields must be positive: {self}")));
        }
        Ok(())
    }
}

impl fmt::Display for Fuel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rounds={} size={} set={}", self.max_closure_rounds, self.max_formula_size, self.max_set_size)
    }
}

/// Outcome of a bounded derivability query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Found in the closure after this many rounds (0: a premise).
    Derived(u32),
    /// Not found within the bound. Says nothing about unbounded derivability.
    NotDerivedWithin(Fuel),
}

impl Verdict {
    pub fn is_derived(&self) -> bool {
        matches!(self, Verdict::Derived(_))
    }

    pub fn depth(&self) -> Option<u32> {
        match self {
            Verdict::Derived(d) => Some(*d),
            Verdict::NotDerivedWithin(_) => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Derived(d) => write!(f, "DERIVED depth={d}"),
            Verdict::NotDerivedWithin(fuel) => write!(
                f,
                "UNKNOWN bound=rounds:{},size:{},set:{}",
                fuel.max_closure_rounds, fuel.max_formula_size, fuel.max_set_size
            ),
        }
    }
}

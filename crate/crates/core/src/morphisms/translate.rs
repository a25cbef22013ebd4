//! Translations between a combined language and one of its component
//! languages. Variables `xi` become `x(2i+1)`; every maximal subformula headed
//! by a symbol outside the component becomes the even variable `x(2n)`, where
//! `n` is the formula's number in an interning table.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::syntax::{parse_formula, Formula, SchemaVar, Signature};

/// Growable numbering of formulas, handing out 1, 2, 3, ... on first
/// registration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interning {
    formulas: Vec<Formula>,
    index: HashMap<Formula, u64>,
}

impl Interning {
    pub fn new() -> Self {
        Interning::default()
    }

    pub fn register(&mut self, phi: &Formula) -> u64 {
        if let Some(&n) = self.index.get(phi) {
            return n;
        }
        self.formulas.push(phi.clone());
        let n = self.formulas.len() as u64;
        self.index.insert(phi.clone(), n);
        n
    }

    pub fn index_of(&self, phi: &Formula) -> Option<u64> {
        self.index.get(phi).copied()
    }

    pub fn formula_of(&self, n: u64) -> Option<&Formula> {
        usize::try_from(n).ok().and_then(|n| n.checked_sub(1)).and_then(|i| self.formulas.get(i))
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, &Formula)> {
        self.formulas.iter().enumerate().map(|(i, f)| (i as u64 + 1, f))
    }

    /// One `index<TAB>formula` line per entry, by index.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (n, f) in self.entries() {
            let _ = writeln!(out, "{n}\t{f}");
        }
        out
    }

    /// Inverse of [`Interning::serialize`]; indices must run 1, 2, 3, ...
    pub fn deserialize(text: &str, sig: &Signature) -> Result<Self> {
        let mut table = Interning::new();
        for (lineno, line) in text.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
            let bad = |msg: &str| Error::Format(format!("interning line {}: {msg}", lineno + 1));
            let (idx, formula) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
            let idx: u64 = idx.parse().map_err(|_| bad("bad index"))?;
            let phi = parse_formula(formula, sig).map_err(|e| bad(&e.to_string()))?;
            if idx != table.len() as u64 + 1 || table.index.contains_key(&phi) {
                return Err(bad("indices must be consecutive and formulas distinct"));
            }
            table.register(&phi);
        }
        Ok(table)
    }

    /// Read-only view that can be shared across threads.
    pub fn freeze(self) -> Arc<Interning> {
        Arc::new(self)
    }
}

fn odd(v: SchemaVar) -> Formula {
    let n = v.index().checked_mul(2).and_then(|n| n.checked_add(1)).expect("variable index overflow");
    Formula::var(n)
}

fn even(n: u64) -> Formula {
    Formula::var(n.checked_mul(2).expect("intern index overflow"))
}

/// Translates `phi` into the language of `small`, registering foreign
/// subformulas left to right, outermost first.
pub fn translate_with(small: &Signature, table: &mut Interning, phi: &Formula) -> Formula {
    match phi {
        Formula::Var(v) => odd(*v),
        Formula::App(_) => {
            let head = phi.head().expect("compound formula");
            if small.contains(head) {
                let args = phi.args().iter().map(|a| translate_with(small, table, a)).collect();
                Formula::app(head.clone(), args)
            } else {
                even(table.register(phi))
            }
        }
    }
}

/// Like [`translate_with`] against a frozen table; an unregistered foreign
/// subformula is an error instead of a new entry.
pub fn translate_frozen(small: &Signature, table: &Interning, phi: &Formula) -> Result<Formula> {
    match phi {
        Formula::Var(v) => Ok(odd(*v)),
        Formula::App(_) => {
            let head = phi.head().expect("compound formula");
            if small.contains(head) {
                let args = phi.args().iter().map(|a| translate_frozen(small, table, a)).collect::<Result<Vec<_>>>()?;
                Ok(Formula::app(head.clone(), args))
            } else {
                table
                    .index_of(phi)
                    .map(even)
                    .ok_or_else(|| Error::Language(format!("{phi} is not registered in the frozen table")))
            }
        }
    }
}

/// Inverse of translation: `x(2i+1) ↦ xi`, `x(2n) ↦` formula number `n`.
pub fn substitute_back_with(table: &Interning, phi: &Formula) -> Result<Formula> {
    let mut err = None;
    let out = phi.map_vars(&mut |v| {
        let n = v.index();
        if n % 2 == 1 {
            if n == 1 {
                err.get_or_insert(Error::Language("x1 is not in the image of a translation".into()));
                return None;
            }
            Some(Formula::var(n / 2))
        } else {
            match table.formula_of(n / 2) {
                Some(f) => Some(f.clone()),
                None => {
                    err.get_or_insert(Error::UnknownInternIndex(n / 2));
                    None
                }
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// A component translation owning its interning table.
#[derive(Debug, Clone)]
pub struct Translation {
    small: Signature,
    big: Signature,
    table: Interning,
}

impl Translation {
    pub fn new(small: Signature, big: Signature) -> Result<Self> {
        if !small.leq(&big) {
            return Err(Error::Signature(format!("{small} is not included in {big}")));
        }
        Ok(Translation { small, big, table: Interning::new() })
    }

    pub fn small(&self) -> &Signature {
        &self.small
    }

    pub fn big(&self) -> &Signature {
        &self.big
    }

    pub fn interning(&self) -> &Interning {
        &self.table
    }

    pub fn translate(&mut self, phi: &Formula) -> Formula {
        translate_with(&self.small, &mut self.table, phi)
    }

    pub fn substitute_back(&self, phi: &Formula) -> Result<Formula> {
        substitute_back_with(&self.table, phi)
    }
}

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// A connective. Two symbols are the same iff name and arity agree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Symbol {
    name: Arc<str>,
    arity: usize,
    // function of (name, arity), cached for formula hashing
    hash: u64,
}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash);
    }
}

impl Symbol {
    /// Builds a symbol after checking the identifier grammar.
    ///
    /// Names spelled like schema variables (`x1`, `x27`) are rejected since
    /// the formula grammar could not tell them apart.
    pub fn new(name: &str, arity: usize) -> Result<Self> {
        check_identifier(name)?;
        if is_var_spelling(name) {
            return Err(Error::syntax(0, 0, format!("`{name}` is reserved for schema variables")));
        }
        let mut h = DefaultHasher::new();
        name.hash(&mut h);
        arity.hash(&mut h);
        Ok(Symbol { name: Arc::from(name), arity, hash: h.finish() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub(crate) fn hash_code(&self) -> u64 {
        self.hash
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

pub(crate) fn check_identifier(name: &str) -> Result<()> {
    let mut chars = name.chars();
    let ok = match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::syntax(0, 0, format!("malformed identifier `{name}`")))
    }
}

/// `x` followed by a positive decimal without leading zero.
pub(crate) fn is_var_spelling(name: &str) -> bool {
    let Some(digits) = name.strip_prefix('x') else { return false };
    !digits.is_empty() && !digits.starts_with('0') && digits.bytes().all(|b| b.is_ascii_digit())
}

/// Arity-indexed family of finite connective sets. Empty levels are never
/// stored, so structural equality is set equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    levels: BTreeMap<usize, BTreeSet<Symbol>>,
}

impl Signature {
    pub fn empty() -> Self {
        Signature::default()
    }

    /// Duplicate declarations collapse to one symbol.
    pub fn new<'a>(decls: impl IntoIterator<Item = (&'a str, usize)>) -> Result<Self> {
        let mut sig = Signature::empty();
        for (name, arity) in decls {
            sig.insert(Symbol::new(name, arity)?);
        }
        Ok(sig)
    }

    pub fn from_symbols(symbols: impl IntoIterator<Item = Symbol>) -> Self {
        let mut sig = Signature::empty();
        for s in symbols {
            sig.insert(s);
        }
        sig
    }

    pub fn insert(&mut self, symbol: Symbol) {
        self.levels.entry(symbol.arity).or_default().insert(symbol);
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.levels.get(&symbol.arity).is_some_and(|l| l.contains(symbol))
    }

    pub fn lookup(&self, name: &str, arity: usize) -> Option<&Symbol> {
        self.levels.get(&arity)?.iter().find(|s| s.name() == name)
    }

    /// Arities at which `name` is declared.
    pub fn arities_of(&self, name: &str) -> Vec<usize> {
        self.levels.iter().filter(|(_, l)| l.iter().any(|s| s.name() == name)).map(|(k, _)| *k).collect()
    }

    pub fn level(&self, arity: usize) -> impl Iterator<Item = &Symbol> {
        self.levels.get(&arity).into_iter().flatten()
    }

    pub fn constants(&self) -> impl Iterator<Item = &Symbol> {
        self.level(0)
    }

    /// All symbols ordered by arity, then name.
    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.levels.values().flatten()
    }

    pub fn arities(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.levels.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn union(&self, other: &Signature) -> Signature {
        let mut out = self.clone();
        for s in other.symbols() {
            out.insert(s.clone());
        }
        out
    }

    /// Componentwise inclusion of `self` into `other`.
    pub fn leq(&self, other: &Signature) -> bool {
        self.symbols().all(|s| other.contains(s))
    }
}

/// Prints as `{ bot/0; not/1; imp/2; }`.
impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for s in self.symbols() {
            write!(f, " {s};")?;
        }
        f.write_str(" }")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(decls: &[(&str, usize)]) -> Signature {
        Signature::new(decls.iter().copied()).unwrap()
    }

    #[test]
    fn construction_and_dedup() {
        assert!(sig(&[]).is_empty());
        let cpl = sig(&[("not", 1), ("imp", 2), ("bot", 0)]);
        assert_eq!(cpl.level(0).map(Symbol::name).collect::<Vec<_>>(), ["bot"]);
        assert_eq!(cpl.level(2).map(Symbol::name).collect::<Vec<_>>(), ["imp"]);
        assert_eq!(sig(&[("not", 1), ("not", 1)]), sig(&[("not", 1)]));
    }

    #[test]
    fn identifiers() {
        assert!(Symbol::new("and_2", 2).is_ok());
        assert!(Symbol::new("_p", 0).is_ok());
        assert!(Symbol::new("x", 0).is_ok());
        assert!(Symbol::new("x0", 0).is_ok());
        for bad in ["", "2a", "a-b", "x1", "x12"] {
            assert!(matches!(Symbol::new(bad, 1), Err(Error::Syntax { .. })), "{bad}");
        }
    }

    #[test]
    fn union_keeps_arity_distinct() {
        let u = sig(&[("not", 1)]).union(&sig(&[("not", 2)]));
        assert_eq!(u.len(), 2);
        assert_eq!(u.arities_of("not"), [1, 2]);
        let and_or = sig(&[("and", 2)]).union(&sig(&[("or", 2)]));
        assert_eq!(and_or, sig(&[("and", 2), ("or", 2)]));
    }

    #[test]
    fn ordering() {
        let small = sig(&[("not", 1)]);
        let big = sig(&[("not", 1), ("imp", 2)]);
        assert!(small.leq(&big));
        assert!(!big.leq(&small));
        assert!(big.leq(&big));
        assert!(!sig(&[("and", 2)]).leq(&sig(&[("or", 2)])));
    }
}

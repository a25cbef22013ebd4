use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use smallvec::SmallVec;

use super::signature::{Signature, Symbol};
use crate::error::{Error, Result};

/// Schema variable `ξn`, printed `xn`. Indices start at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SchemaVar(u64);

impl SchemaVar {
    /// Panics on index 0.
    pub fn new(index: u64) -> Self {
        assert!(index >= 1, "schema variable indices start at 1");
        SchemaVar(index)
    }

    pub fn index(self) -> u64 {
        self.0
    }
}

impl fmt::Display for SchemaVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A formula tree. Compound nodes are shared behind `Arc` and carry their
/// size, depth and hash, so cloning and hashing are O(1).
#[derive(Clone)]
pub enum Formula {
    Var(SchemaVar),
    App(Arc<Node>),
}

pub struct Node {
    symbol: Symbol,
    args: SmallVec<[Formula; 2]>,
    size: u32,
    depth: u32,
    hash: u64,
}

impl Formula {
    pub fn var(index: u64) -> Formula {
        Formula::Var(SchemaVar::new(index))
    }

    /// Panics if the argument count differs from the arity; use
    /// [`Formula::try_app`] for unchecked input.
    pub fn app(symbol: Symbol, args: Vec<Formula>) -> Formula {
        Formula::app_iter(symbol, args)
    }

    /// [`Formula::app`] without an intermediate vector.
    pub fn app_iter(symbol: Symbol, args: impl IntoIterator<Item = Formula>) -> Formula {
        let args: SmallVec<[Formula; 2]> = args.into_iter().collect();
        assert_eq!(symbol.arity(), args.len(), "arity mismatch for {symbol}");
        let mut h = symbol.hash_code();
        let mut size = 1u32;
        let mut depth = 0u32;
        for a in &args {
            h = mix(h, a.hash_code());
            size = size.saturating_add(a.size());
            depth = depth.max(a.depth());
        }
        Formula::App(Arc::new(Node { symbol, args, size, depth: depth + 1, hash: h }))
    }

    fn hash_code(&self) -> u64 {
        match self {
            Formula::Var(v) => mix(0x9e37_79b9_7f4a_7c15, v.0),
            Formula::App(n) => n.hash,
        }
    }

    pub fn try_app(symbol: Symbol, args: Vec<Formula>) -> Result<Formula> {
        if symbol.arity() != args.len() {
            return Err(Error::Arity(format!("{} applied to {} argument(s)", symbol, args.len())));
        }
        Ok(Formula::app(symbol, args))
    }

    pub fn constant(symbol: Symbol) -> Formula {
        Formula::app(symbol, Vec::new())
    }

    /// Node count.
    pub fn size(&self) -> u32 {
        match self {
            Formula::Var(_) => 1,
            Formula::App(n) => n.size,
        }
    }

    /// Leaves have depth 1.
    pub fn depth(&self) -> u32 {
        match self {
            Formula::Var(_) => 1,
            Formula::App(n) => n.depth,
        }
    }

    pub fn as_var(&self) -> Option<SchemaVar> {
        match self {
            Formula::Var(v) => Some(*v),
            Formula::App(_) => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Formula::Var(_))
    }

    pub fn head(&self) -> Option<&Symbol> {
        match self {
            Formula::Var(_) => None,
            Formula::App(n) => Some(&n.symbol),
        }
    }

    pub fn args(&self) -> &[Formula] {
        match self {
            Formula::Var(_) => &[],
            Formula::App(n) => &n.args,
        }
    }

    pub fn vars(&self) -> BTreeSet<SchemaVar> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<SchemaVar>) {
        match self {
            Formula::Var(v) => {
                out.insert(*v);
            }
            Formula::App(n) => n.args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Largest variable index, 0 for closed formulas.
    pub fn max_var(&self) -> u64 {
        match self {
            Formula::Var(v) => v.0,
            Formula::App(n) => n.args.iter().map(Formula::max_var).max().unwrap_or(0),
        }
    }

    /// Variables in first-occurrence order (left to right).
    pub fn vars_in_order(&self) -> Vec<SchemaVar> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Var(v) = f {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        for a in self.args() {
            a.walk(visit);
        }
    }

    pub fn subformulas_into(&self, out: &mut HashSet<Formula>) {
        if out.insert(self.clone()) {
            for a in self.args() {
                a.subformulas_into(out);
            }
        }
    }

    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut set = HashSet::new();
        self.subformulas_into(&mut set);
        set.into_iter().collect()
    }

    pub fn is_subformula_of(&self, other: &Formula) -> bool {
        if self.size() > other.size() {
            return false;
        }
        self == other || other.args().iter().any(|a| self.is_subformula_of(a))
    }

    /// First symbol not in `sig`, if any.
    pub fn foreign_symbol(&self, sig: &Signature) -> Option<&Symbol> {
        match self {
            Formula::Var(_) => None,
            Formula::App(n) if !sig.contains(&n.symbol) => Some(&n.symbol),
            Formula::App(n) => n.args.iter().find_map(|a| a.foreign_symbol(sig)),
        }
    }

    pub fn in_language(&self, sig: &Signature) -> bool {
        self.foreign_symbol(sig).is_none()
    }

    pub fn check_language(&self, sig: &Signature) -> Result<()> {
        match self.foreign_symbol(sig) {
            None => Ok(()),
            Some(s) => Err(Error::Language(format!("{self} uses {s}, outside {sig}"))),
        }
    }

    /// Simultaneous substitution.
    pub fn substitute(&self, sigma: &Substitution) -> Formula {
        if sigma.is_empty() {
            return self.clone();
        }
        self.map_vars(&mut |v| sigma.get(v).cloned())
    }

    /// Rebuilds the tree replacing each variable `v` by `f(v)` when it
    /// returns `Some`. Untouched subtrees are shared, not copied.
    pub fn map_vars(&self, f: &mut impl FnMut(SchemaVar) -> Option<Formula>) -> Formula {
        match self {
            Formula::Var(v) => f(*v).unwrap_or_else(|| self.clone()),
            Formula::App(n) => {
                let mut changed = false;
                let args: Vec<Formula> = n
                    .args
                    .iter()
                    .map(|a| {
                        let b = a.map_vars(f);
                        changed |= !b.ptr_eq(a);
                        b
                    })
                    .collect();
                if changed {
                    Formula::app(n.symbol.clone(), args)
                } else {
                    self.clone()
                }
            }
        }
    }

    fn ptr_eq(&self, other: &Formula) -> bool {
        match (self, other) {
            (Formula::Var(a), Formula::Var(b)) => a == b,
            (Formula::App(a), Formula::App(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    /// Lexicographic comparison of the pre-order token streams, with
    /// variables before symbols, variables by index and symbols by
    /// (name, arity).
    fn token_cmp(&self, other: &Formula) -> Ordering {
        match (self, other) {
            (Formula::Var(a), Formula::Var(b)) => a.cmp(b),
            (Formula::Var(_), Formula::App(_)) => Ordering::Less,
            (Formula::App(_), Formula::Var(_)) => Ordering::Greater,
            (Formula::App(a), Formula::App(b)) => {
                if Arc::ptr_eq(a, b) {
                    return Ordering::Equal;
                }
                a.symbol.cmp(&b.symbol).then_with(|| {
                    for (x, y) in a.args.iter().zip(b.args.iter()) {
                        let o = x.token_cmp(y);
                        if o != Ordering::Equal {
                            return o;
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Formula::Var(a), Formula::Var(b)) => a == b,
            (Formula::App(a), Formula::App(b)) => {
                Arc::ptr_eq(a, b) || (a.hash == b.hash && a.size == b.size && a.symbol == b.symbol && a.args == b.args)
            }
            _ => false,
        }
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash_code());
    }
}

fn mix(h: u64, x: u64) -> u64 {
    (h.rotate_left(5) ^ x).wrapping_mul(0x517c_c1b7_2722_0a95)
}

/// Canonical order: node count, then token-wise lexicographic.
impl Ord for Formula {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size().cmp(&other.size()).then_with(|| self.token_cmp(other))
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical print: `imp(x1, not(bot))`.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(v) => write!(f, "{v}"),
            Formula::App(n) => {
                f.write_str(n.symbol.name())?;
                if n.args.is_empty() {
                    return Ok(());
                }
                f.write_str("(")?;
                for (i, a) in n.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Finite map from variables to formulas; unlisted variables are fixed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<SchemaVar, Formula>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn insert(&mut self, v: SchemaVar, f: Formula) {
        self.map.insert(v, f);
    }

    pub fn with(mut self, v: u64, f: Formula) -> Self {
        self.insert(SchemaVar::new(v), f);
        self
    }

    pub fn get(&self, v: SchemaVar) -> Option<&Formula> {
        self.map.get(&v)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SchemaVar, &Formula)> {
        self.map.iter()
    }

    /// True when every listed value is a variable.
    pub fn is_renaming(&self) -> bool {
        self.map.values().all(Formula::is_var)
    }

    /// Inverse of an injective renaming.
    pub fn inverse_renaming(&self) -> Option<Substitution> {
        let mut inv = Substitution::new();
        for (v, f) in &self.map {
            let w = f.as_var()?;
            if inv.map.insert(w, Formula::Var(*v)).is_some() {
                return None;
            }
        }
        Some(inv)
    }

    /// Largest formula size among the values (1 for an empty map).
    pub fn max_value_size(&self) -> u32 {
        self.map.values().map(Formula::size).max().unwrap_or(1)
    }
}

impl FromIterator<(SchemaVar, Formula)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (SchemaVar, Formula)>>(iter: I) -> Self {
        Substitution { map: iter.into_iter().collect() }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} := {t}")?;
        }
        f.write_str("}")
    }
}

/// Prints a set as `{a, b}` in canonical order.
pub fn show_set<'a>(items: impl IntoIterator<Item = &'a Formula>) -> String {
    let mut v: Vec<&Formula> = items.into_iter().collect();
    v.sort();
    let body: Vec<String> = v.iter().map(|f| f.to_string()).collect();
    format!("{{{}}}", body.join(", "))
}

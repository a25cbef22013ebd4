use crate::error::Result;
use crate::syntax::{enumerate_formulas, show_set, Formula, Signature};

/// Enumerated formulas and premise sets that bounded checks quantify over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    depth: usize,
    vars: u64,
    formulas: Vec<Formula>,
}

impl Corpus {
    /// Two variables unless stated otherwise: enough to tell `x1 ⊢ x2` from
    /// reflexivity.
    pub const DEFAULT_VARS: u64 = 2;

    pub fn new(sig: &Signature, depth: usize, vars: u64) -> Result<Corpus> {
        Ok(Corpus { depth, vars, formulas: enumerate_formulas(sig, depth, vars)? })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn vars(&self) -> u64 {
        self.vars
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    /// Premise sets of at most `max` members (at most 2): the empty set,
    /// then singletons, then pairs, each in index order.
    pub fn premise_sets(&self, max: usize) -> impl Iterator<Item = Vec<Formula>> + '_ {
        let n = self.formulas.len();
        let f = &self.formulas;
        let empty = std::iter::once(Vec::new());
        let singles = (0..n).filter(move |_| max >= 1).map(move |i| vec![f[i].clone()]);
        let pairs = (0..n)
            .filter(move |_| max >= 2)
            .flat_map(move |i| (i + 1..n).map(move |j| vec![f[i].clone(), f[j].clone()]));
        empty.chain(singles).chain(pairs)
    }

    /// Number of premise sets `premise_sets(max)` yields.
    pub fn premise_set_count(&self, max: usize) -> usize {
        let n = self.formulas.len();
        1 + if max >= 1 { n } else { 0 } + if max >= 2 { n * n.saturating_sub(1) / 2 } else { 0 }
    }
}

/// `{a, b} ⊢ c` in canonical printing.
pub fn show_query(gamma: &[Formula], phi: &Formula) -> String {
    format!("{} |- {phi}", show_set(gamma))
}

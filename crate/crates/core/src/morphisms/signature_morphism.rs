use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::syntax::{Formula, Signature, Symbol};

/// Arity-preserving symbol relabeling between signatures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureMorphism {
    source: Signature,
    target: Signature,
    map: BTreeMap<Symbol, Symbol>,
}

impl SignatureMorphism {
    /// Fails unless the map is total on `source`, arity preserving, and lands
    /// in `target`.
    pub fn new(source: Signature, target: Signature, map: BTreeMap<Symbol, Symbol>) -> Result<Self> {
        for s in source.symbols() {
            let Some(t) = map.get(s) else {
                return Err(Error::Signature(format!("morphism does not map {s}")));
            };
            if t.arity() != s.arity() {
                return Err(Error::Signature(format!("{s} mapped to {t} changes arity")));
            }
            if !target.contains(t) {
                return Err(Error::Signature(format!("image {t} of {s} is not in the target")));
            }
        }
        if let Some(extra) = map.keys().find(|s| !source.contains(s)) {
            return Err(Error::Signature(format!("{extra} is not in the source")));
        }
        Ok(SignatureMorphism { source, target, map })
    }

    pub fn identity(sig: &Signature) -> Self {
        let map = sig.symbols().map(|s| (s.clone(), s.clone())).collect();
        SignatureMorphism { source: sig.clone(), target: sig.clone(), map }
    }

    /// Inclusion of `source` into a larger `target`.
    pub fn inclusion(source: &Signature, target: &Signature) -> Result<Self> {
        let map = source.symbols().map(|s| (s.clone(), s.clone())).collect();
        SignatureMorphism::new(source.clone(), target.clone(), map)
    }

    pub fn source(&self) -> &Signature {
        &self.source
    }

    pub fn target(&self) -> &Signature {
        &self.target
    }

    pub fn image(&self, s: &Symbol) -> Option<&Symbol> {
        self.map.get(s)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Symbol, &Symbol)> {
        self.map.iter()
    }

    /// Homomorphic extension; variables are fixed.
    pub fn apply(&self, phi: &Formula) -> Result<Formula> {
        match phi {
            Formula::Var(_) => Ok(phi.clone()),
            Formula::App(_) => {
                let head = phi.head().expect("compound formula");
                let Some(t) = self.map.get(head) else {
                    return Err(Error::UnknownSymbol(format!("{head} is outside the morphism source")));
                };
                let args = phi.args().iter().map(|a| self.apply(a)).collect::<Result<Vec<_>>>()?;
                Ok(Formula::app(t.clone(), args))
            }
        }
    }

    /// Injective on every arity level.
    pub fn is_monomorphic(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.map.values().all(|t| seen.insert(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn sig(decls: &[(&str, usize)]) -> Signature {
        Signature::new(decls.iter().copied()).unwrap()
    }

    fn sym(name: &str, k: usize) -> Symbol {
        Symbol::new(name, k).unwrap()
    }

    fn morphism(src: &Signature, tgt: &Signature, pairs: &[(&str, &str, usize)]) -> Result<SignatureMorphism> {
        let map = pairs.iter().map(|(a, b, k)| (sym(a, *k), sym(b, *k))).collect();
        SignatureMorphism::new(src.clone(), tgt.clone(), map)
    }

    #[test]
    fn relabels_homomorphically() {
        let and = sig(&[("and", 2)]);
        let or = sig(&[("or", 2)]);
        let h = morphism(&and, &or, &[("and", "or", 2)]).unwrap();
        let f = parse_formula("and(x1, x2)", &and).unwrap();
        assert_eq!(h.apply(&f).unwrap().to_string(), "or(x1, x2)");

        let not = sig(&[("not", 1)]);
        let neg = sig(&[("neg", 1)]);
        let h = morphism(&not, &neg, &[("not", "neg", 1)]).unwrap();
        let f = parse_formula("not(not(x1))", &not).unwrap();
        assert_eq!(h.apply(&f).unwrap().to_string(), "neg(neg(x1))");

        let id = SignatureMorphism::identity(&not);
        assert_eq!(id.apply(&f).unwrap(), f);
        let stray = parse_formula("and(x1, x1)", &and).unwrap();
        assert!(matches!(id.apply(&stray), Err(Error::UnknownSymbol(_))));
    }

    #[test]
    fn validation() {
        let and = sig(&[("and", 2)]);
        let or = sig(&[("or", 2)]);
        assert!(matches!(morphism(&and, &or, &[]), Err(Error::Signature(_))));
        assert!(matches!(morphism(&and, &and, &[("and", "or", 2)]), Err(Error::Signature(_))));
    }

    #[test]
    fn monomorphism() {
        let src = sig(&[("and", 2), ("nand", 2)]);
        let tgt = sig(&[("or", 2)]);
        let h = morphism(&src, &tgt, &[("and", "or", 2), ("nand", "or", 2)]).unwrap();
        assert!(!h.is_monomorphic());
        let src = sig(&[("a", 1), ("b", 1)]);
        let tgt = sig(&[("p", 1), ("q", 1)]);
        assert!(morphism(&src, &tgt, &[("a", "p", 1), ("b", "q", 1)]).unwrap().is_monomorphic());
        assert!(SignatureMorphism::identity(&src).is_monomorphic());
    }
}

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::syntax::{Formula, SchemaVar, Signature, Substitution, Symbol};

/// True iff `phi` is over `sig` and its variables are exactly `x1..xk`.
pub fn in_k_restricted(phi: &Formula, sig: &Signature, k: usize) -> bool {
    if !phi.in_language(sig) {
        return false;
    }
    let vars = phi.vars();
    vars.len() == k && vars.iter().enumerate().all(|(i, v)| v.index() == i as u64 + 1)
}

/// Maps each connective of arity k to a target formula in exactly `x1..xk`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingMorphism {
    source: Signature,
    target: Signature,
    assign: BTreeMap<Symbol, Formula>,
}

impl SplittingMorphism {
    pub fn new(source: Signature, target: Signature, assign: BTreeMap<Symbol, Formula>) -> Result<Self> {
        for s in source.symbols() {
            let Some(f) = assign.get(s) else {
                return Err(Error::Signature(format!("splitting does not assign {s}")));
            };
            if !in_k_restricted(f, &target, s.arity()) {
                return Err(Error::Signature(format!(
                    "{s} assigned {f}, which is not a target formula in exactly x1..x{}",
                    s.arity()
                )));
            }
        }
        if let Some(extra) = assign.keys().find(|s| !source.contains(s)) {
            return Err(Error::Signature(format!("{extra} is not in the source")));
        }
        Ok(SplittingMorphism { source, target, assign })
    }

    /// `c ↦ c(x1, ..., xk)`.
    pub fn identity(sig: &Signature) -> Self {
        let assign = sig
            .symbols()
            .map(|s| {
                let args = (1..=s.arity() as u64).map(Formula::var).collect();
                (s.clone(), Formula::app(s.clone(), args))
            })
            .collect();
        SplittingMorphism { source: sig.clone(), target: sig.clone(), assign }
    }

    pub fn source(&self) -> &Signature {
        &self.source
    }

    pub fn target(&self) -> &Signature {
        &self.target
    }

    pub fn assignment(&self, s: &Symbol) -> Option<&Formula> {
        self.assign.get(s)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Symbol, &Formula)> {
        self.assign.iter()
    }

    /// Largest assigned formula; bounds how much the unfolding can grow a
    /// formula.
    pub fn expansion(&self) -> u32 {
        self.assign.values().map(Formula::size).max().unwrap_or(1)
    }

    /// The induced unfolding: each node `c(a1..ak)` becomes `assign(c)` with
    /// `xi` replaced by the unfolded `ai`.
    pub fn apply(&self, phi: &Formula) -> Result<Formula> {
        match phi {
            Formula::Var(_) => Ok(phi.clone()),
            Formula::App(_) => {
                let head = phi.head().expect("compound formula");
                let Some(body) = self.assign.get(head) else {
                    return Err(Error::UnknownSymbol(format!("{head} is not assigned by the splitting")));
                };
                let mut sigma = Substitution::new();
                for (i, a) in phi.args().iter().enumerate() {
                    sigma.insert(SchemaVar::new(i as u64 + 1), self.apply(a)?);
                }
                Ok(body.substitute(&sigma))
            }
        }
    }

    /// `g · self`, defined when `self.target == g.source`.
    pub fn then(&self, g: &SplittingMorphism) -> Result<SplittingMorphism> {
        compose_splitting(g, self)
    }
}

/// `(g · f)(c) = ĝ(f(c))`.
pub fn compose_splitting(g: &SplittingMorphism, f: &SplittingMorphism) -> Result<SplittingMorphism> {
    if f.target != g.source {
        return Err(Error::Composition(format!(
            "cannot compose: target {} differs from source {}",
            f.target, g.source
        )));
    }
    let assign = f.assign.iter().map(|(s, body)| Ok((s.clone(), g.apply(body)?))).collect::<Result<_>>()?;
    Ok(SplittingMorphism { source: f.source.clone(), target: g.target.clone(), assign })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn sig(decls: &[(&str, usize)]) -> Signature {
        Signature::new(decls.iter().copied()).unwrap()
    }

    fn splitting(src: &Signature, tgt: &Signature, pairs: &[(&str, usize, &str)]) -> SplittingMorphism {
        let assign =
            pairs.iter().map(|(n, k, body)| (Symbol::new(n, *k).unwrap(), parse_formula(body, tgt).unwrap())).collect();
        SplittingMorphism::new(src.clone(), tgt.clone(), assign).unwrap()
    }

    #[test]
    fn k_restricted_means_exactly() {
        let cpl = sig(&[("bot", 0), ("not", 1), ("imp", 2)]);
        let p = |s| parse_formula(s, &cpl).unwrap();
        assert!(in_k_restricted(&p("imp(x1, x2)"), &cpl, 2));
        assert!(!in_k_restricted(&p("imp(x1, x1)"), &cpl, 2));
        assert!(!in_k_restricted(&p("imp(x2, x3)"), &cpl, 2));
        assert!(in_k_restricted(&p("bot"), &cpl, 0));
        assert!(in_k_restricted(&p("x1"), &cpl, 1));
    }

    #[test]
    fn unfolding() {
        let src = sig(&[("nand", 2)]);
        let tgt = sig(&[("not", 1), ("and", 2)]);
        let f = splitting(&src, &tgt, &[("nand", 2, "not(and(x1, x2))")]);
        let p = |s| parse_formula(s, &src).unwrap();
        assert_eq!(f.apply(&p("nand(x1, x2)")).unwrap().to_string(), "not(and(x1, x2))");
        assert_eq!(f.apply(&p("nand(nand(x1, x1), x2)")).unwrap().to_string(), "not(and(not(and(x1, x1)), x2))");
        let id = SplittingMorphism::identity(&src);
        assert_eq!(id.apply(&p("nand(nand(x1, x1), x2)")).unwrap(), p("nand(nand(x1, x1), x2)"));
    }

    #[test]
    fn rejects_bad_assignments() {
        let src = sig(&[("nand", 2)]);
        let tgt = sig(&[("not", 1), ("and", 2)]);
        let assign = [(Symbol::new("nand", 2).unwrap(), parse_formula("not(x1)", &tgt).unwrap())];
        assert!(SplittingMorphism::new(src.clone(), tgt.clone(), assign.into_iter().collect()).is_err());
        assert!(SplittingMorphism::new(src, tgt, BTreeMap::new()).is_err());
    }

    #[test]
    fn composition() {
        let src = sig(&[("nand", 2)]);
        let mid = sig(&[("not", 1), ("and", 2)]);
        let tgt = sig(&[("neg", 1), ("meet", 2)]);
        let f = splitting(&src, &mid, &[("nand", 2, "not(and(x1, x2))")]);
        let g = splitting(&mid, &tgt, &[("not", 1, "neg(x1)"), ("and", 2, "meet(x1, x2)")]);
        let gf = compose_splitting(&g, &f).unwrap();
        let nand = Symbol::new("nand", 2).unwrap();
        assert_eq!(gf.assignment(&nand).unwrap().to_string(), "neg(meet(x1, x2))");
        assert_eq!(compose_splitting(&SplittingMorphism::identity(&mid), &f).unwrap(), f);
        assert_eq!(compose_splitting(&f, &SplittingMorphism::identity(&src)).unwrap(), f);
        assert!(matches!(compose_splitting(&f, &g), Err(Error::Composition(_))));
    }
}

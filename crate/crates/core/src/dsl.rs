//! Block DSL for signatures, calculi, morphisms, splittings and ontologies,
//! and the [`Library`] of named declarations it parses into.
//!
//! ```text
//! signature cpl_sig { bot/0; not/1; imp/2; }
//! calculus CPL over cpl_sig {
//!   axiom k: imp(x1, imp(x2, x1));
//!   rule mp: x1, imp(x1, x2) |- x2;
//!   negation not;
//! }
//! morphism h: conj_sig -> meet_sig { and/2 -> meet; }
//! splitting f: nand_sig -> cpl_sig { nand/2 -> not(and(x1, x2)); }
//! ontology O { base CPL; onto_signature { bot/0; } axioms { imp(bot, x1); } }
//! ```
//!
//! Writing `theory { ... }` instead of `axioms { ... }` declares an ontology
//! whose theory must already follow from the base calculus.

use std::collections::BTreeMap;
use std::fmt;

use crate::consequence::{Calculus, Rule};
use crate::error::{Error, Result};
use crate::morphisms::{SignatureMorphism, SplittingMorphism};
use crate::ontology::{make_ontology, Ontology};
use crate::syntax::lexer::Tok;
use crate::syntax::{check_identifier, Cursor, Formula, Signature, Symbol};

/// A morphism together with the names of its endpoint signatures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Named<T> {
    pub name: String,
    pub source: String,
    pub target: String,
    pub value: T,
}

/// Declarations by name. Each kind has its own namespace; declaring a name
/// twice is fine when both declarations agree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Library {
    signatures: BTreeMap<String, Signature>,
    calculi: BTreeMap<String, Calculus>,
    morphisms: BTreeMap<String, Named<SignatureMorphism>>,
    splittings: BTreeMap<String, Named<SplittingMorphism>>,
    ontologies: BTreeMap<String, Ontology>,
}

fn insert<T: PartialEq>(map: &mut BTreeMap<String, T>, kind: &str, name: &str, value: T) -> Result<()> {
    match map.get(name) {
        Some(old) if *old != value => Err(Error::DuplicateName(format!("{kind} `{name}` declared twice"))),
        Some(_) => Ok(()),
        None => {
            map.insert(name.to_string(), value);
            Ok(())
        }
    }
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, kind: &str, name: &str) -> Result<&'a T> {
    map.get(name).ok_or_else(|| Error::UnknownName(format!("no {kind} named `{name}`")))
}

impl Library {
    pub fn new() -> Self {
        Library::default()
    }

    pub fn parse(text: &str) -> Result<Library> {
        let mut lib = Library::new();
        lib.load(text)?;
        Ok(lib)
    }

    /// Adds every block of `text`. Blocks may refer to earlier blocks and to
    /// anything already in the library.
    pub fn load(&mut self, text: &str) -> Result<()> {
        let mut c = Cursor::new(text)?;
        while !c.at_end() {
            self.block(&mut c)?;
        }
        Ok(())
    }

    pub(crate) fn block(&mut self, c: &mut Cursor) -> Result<()> {
        let at = c.here();
        let kw = c.ident()?;
        match kw.as_str() {
            "signature" => {
                let name = c.ident()?;
                let sig = parse_decls(c)?;
                self.add_signature(&name, sig)
            }
            "calculus" => {
                let cal = self.parse_calculus(c)?;
                self.add_calculus(cal)
            }
            "morphism" => {
                let m = self.parse_morphism(c)?;
                self.add_morphism(m)
            }
            "splitting" => {
                let s = self.parse_splitting(c)?;
                self.add_splitting(s)
            }
            "ontology" => {
                let o = self.parse_ontology(c)?;
                self.add_ontology(o)
            }
            _ => Err(Error::syntax(at.0, at.1, format!("unknown block `{kw}`"))),
        }
    }

    fn parse_calculus(&self, c: &mut Cursor) -> Result<Calculus> {
        let name = c.ident()?;
        c.keyword("over")?;
        let sig_name = c.ident()?;
        let sig = self.signature(&sig_name)?.clone();
        c.expect(&Tok::LBrace)?;
        let (mut axioms, mut rules, mut negation) = (Vec::new(), Vec::new(), None);
        while !c.eat(&Tok::RBrace) {
            let at = c.here();
            match c.ident()?.as_str() {
                "axiom" => {
                    let n = c.ident()?;
                    c.expect(&Tok::Colon)?;
                    axioms.push(Rule::axiom(&n, c.formula(&sig)?));
                }
                "rule" => {
                    let n = c.ident()?;
                    c.expect(&Tok::Colon)?;
                    let mut premises = Vec::new();
                    if !c.eat(&Tok::Turnstile) {
                        loop {
                            premises.push(c.formula(&sig)?);
                            if c.eat(&Tok::Turnstile) {
                                break;
                            }
                            c.expect(&Tok::Comma)?;
                        }
                    }
                    let rule = Rule::new(&n, premises, c.formula(&sig)?);
                    if rule.is_axiom() {
                        axioms.push(rule);
                    } else {
                        rules.push(rule);
                    }
                }
                "negation" => {
                    let n = c.ident()?;
                    let sym = sig
                        .lookup(&n, 1)
                        .ok_or_else(|| Error::UnknownSymbol(format!("negation `{n}/1` at {}:{}", at.0, at.1)))?;
                    negation = Some(sym.clone());
                }
                other => return Err(Error::syntax(at.0, at.1, format!("unknown calculus item `{other}`"))),
            }
            c.expect(&Tok::Semi)?;
        }
        Calculus::new(&name, &sig_name, sig, axioms, rules, negation)
    }

    fn endpoints(&self, c: &mut Cursor) -> Result<(String, String, String)> {
        let name = c.ident()?;
        check_identifier(&name)?;
        c.expect(&Tok::Colon)?;
        let source = c.ident()?;
        c.expect(&Tok::Arrow)?;
        let target = c.ident()?;
        self.signature(&source)?;
        self.signature(&target)?;
        Ok((name, source, target))
    }

    /// Symbols left out map to the same symbol of the target.
    fn parse_morphism(&self, c: &mut Cursor) -> Result<Named<SignatureMorphism>> {
        let (name, source, target) = self.endpoints(c)?;
        let (src, tgt) = (self.signature(&source)?, self.signature(&target)?);
        c.expect(&Tok::LBrace)?;
        let mut map = BTreeMap::new();
        while !c.eat(&Tok::RBrace) {
            let s = symbol_in(c, src)?;
            c.expect(&Tok::Arrow)?;
            let at = c.here();
            let t = c.ident()?;
            let t = tgt
                .lookup(&t, s.arity())
                .ok_or_else(|| Error::UnknownSymbol(format!("`{t}/{}` at {}:{}", s.arity(), at.0, at.1)))?;
            map.insert(s, t.clone());
            c.expect(&Tok::Semi)?;
        }
        for s in src.symbols() {
            if !map.contains_key(s) && tgt.contains(s) {
                map.insert(s.clone(), s.clone());
            }
        }
        let value = SignatureMorphism::new(src.clone(), tgt.clone(), map)?;
        Ok(Named { name, source, target, value })
    }

    /// Symbols left out unfold to themselves when the target has them.
    fn parse_splitting(&self, c: &mut Cursor) -> Result<Named<SplittingMorphism>> {
        let (name, source, target) = self.endpoints(c)?;
        let (src, tgt) = (self.signature(&source)?, self.signature(&target)?);
        c.expect(&Tok::LBrace)?;
        let mut assign = BTreeMap::new();
        while !c.eat(&Tok::RBrace) {
            let s = symbol_in(c, src)?;
            c.expect(&Tok::Arrow)?;
            assign.insert(s, c.formula(tgt)?);
            c.expect(&Tok::Semi)?;
        }
        for s in src.symbols() {
            if !assign.contains_key(s) && tgt.contains(s) {
                let args = (1..=s.arity() as u64).map(Formula::var).collect();
                assign.insert(s.clone(), Formula::app(s.clone(), args));
            }
        }
        let value = SplittingMorphism::new(src.clone(), tgt.clone(), assign)?;
        Ok(Named { name, source, target, value })
    }

    fn parse_ontology(&self, c: &mut Cursor) -> Result<Ontology> {
        let name = c.ident()?;
        c.expect(&Tok::LBrace)?;
        c.keyword("base")?;
        let base = self.calculus(&c.ident()?)?.clone();
        c.expect(&Tok::Semi)?;
        c.keyword("onto_signature")?;
        let onto_sig = parse_decls(c)?;
        let adjoined = if c.eat_keyword("axioms") {
            true
        } else if c.eat_keyword("theory") {
            false
        } else {
            return Err(c.error("expected `axioms` or `theory`"));
        };
        c.expect(&Tok::LBrace)?;
        let mut axioms = Vec::new();
        while !c.eat(&Tok::RBrace) {
            axioms.push(c.formula(base.signature())?);
            c.expect(&Tok::Semi)?;
        }
        c.expect(&Tok::RBrace)?;
        if adjoined {
            make_ontology(&base, onto_sig, axioms, &name)
        } else {
            Ontology::with_theory(&base, onto_sig, axioms, &name)
        }
    }

    pub fn add_signature(&mut self, name: &str, sig: Signature) -> Result<()> {
        check_identifier(name)?;
        insert(&mut self.signatures, "signature", name, sig)
    }

    /// Also records the calculus' signature under its name.
    pub fn add_calculus(&mut self, cal: Calculus) -> Result<()> {
        self.add_signature(cal.signature_name(), cal.signature().clone())?;
        let name = cal.name().to_string();
        insert(&mut self.calculi, "calculus", &name, cal)
    }

    pub fn add_morphism(&mut self, m: Named<SignatureMorphism>) -> Result<()> {
        self.check_endpoints(&m.source, &m.target, m.value.source(), m.value.target())?;
        let name = m.name.clone();
        insert(&mut self.morphisms, "morphism", &name, m)
    }

    pub fn add_splitting(&mut self, s: Named<SplittingMorphism>) -> Result<()> {
        self.check_endpoints(&s.source, &s.target, s.value.source(), s.value.target())?;
        let name = s.name.clone();
        insert(&mut self.splittings, "splitting", &name, s)
    }

    fn check_endpoints(&mut self, source: &str, target: &str, src: &Signature, tgt: &Signature) -> Result<()> {
        self.add_signature(source, src.clone())?;
        self.add_signature(target, tgt.clone())
    }

    /// Also records the base calculus.
    pub fn add_ontology(&mut self, o: Ontology) -> Result<()> {
        self.add_calculus(o.base().clone())?;
        let name = o.name().to_string();
        insert(&mut self.ontologies, "ontology", &name, o)
    }

    /// Everything in `other` except its ontologies.
    pub fn merge_declarations(&mut self, other: &Library) -> Result<()> {
        for (n, s) in &other.signatures {
            self.add_signature(n, s.clone())?;
        }
        for c in other.calculi.values() {
            self.add_calculus(c.clone())?;
        }
        for m in other.morphisms.values() {
            self.add_morphism(m.clone())?;
        }
        for s in other.splittings.values() {
            self.add_splitting(s.clone())?;
        }
        Ok(())
    }

    pub fn has_ontology(&self, name: &str) -> bool {
        self.ontologies.contains_key(name)
    }

    pub fn signature(&self, name: &str) -> Result<&Signature> {
        lookup(&self.signatures, "signature", name)
    }

    pub fn calculus(&self, name: &str) -> Result<&Calculus> {
        lookup(&self.calculi, "calculus", name)
    }

    pub fn morphism(&self, name: &str) -> Result<&Named<SignatureMorphism>> {
        lookup(&self.morphisms, "morphism", name)
    }

    pub fn splitting(&self, name: &str) -> Result<&Named<SplittingMorphism>> {
        lookup(&self.splittings, "splitting", name)
    }

    pub fn ontology(&self, name: &str) -> Result<&Ontology> {
        lookup(&self.ontologies, "ontology", name)
    }

    pub fn signatures(&self) -> impl Iterator<Item = (&String, &Signature)> {
        self.signatures.iter()
    }

    pub fn calculi(&self) -> impl Iterator<Item = &Calculus> {
        self.calculi.values()
    }

    pub fn morphisms(&self) -> impl Iterator<Item = &Named<SignatureMorphism>> {
        self.morphisms.values()
    }

    pub fn splittings(&self) -> impl Iterator<Item = &Named<SplittingMorphism>> {
        self.splittings.values()
    }

    pub fn ontologies(&self) -> impl Iterator<Item = &Ontology> {
        self.ontologies.values()
    }

    /// Name of a signature equal to `sig`, if one is declared.
    pub fn name_of_signature(&self, sig: &Signature) -> Option<&str> {
        self.signatures.iter().find(|(_, s)| *s == sig).map(|(n, _)| n.as_str())
    }
}

/// `{ name/k; ... }`
pub(crate) fn parse_decls(c: &mut Cursor) -> Result<Signature> {
    c.expect(&Tok::LBrace)?;
    let mut sig = Signature::empty();
    while !c.eat(&Tok::RBrace) {
        let name = c.ident()?;
        c.expect(&Tok::Slash)?;
        let at = c.here();
        let k = c.number()?;
        let k = usize::try_from(k).map_err(|_| Error::syntax(at.0, at.1, "arity out of range"))?;
        sig.insert(Symbol::new(&name, k)?);
        c.expect(&Tok::Semi)?;
    }
    Ok(sig)
}

fn symbol_in(c: &mut Cursor, sig: &Signature) -> Result<Symbol> {
    let at = c.here();
    let name = c.ident()?;
    c.expect(&Tok::Slash)?;
    let k = c.number()? as usize;
    sig.lookup(&name, k).cloned().ok_or_else(|| Error::UnknownSymbol(format!("`{name}/{k}` at {}:{}", at.0, at.1)))
}

pub fn print_signature(name: &str, sig: &Signature) -> String {
    format!("signature {name} {sig}")
}

impl fmt::Display for Named<SignatureMorphism> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "morphism {}: {} -> {} {{", self.name, self.source, self.target)?;
        for (s, t) in self.value.pairs() {
            writeln!(f, "  {s} -> {};", t.name())?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for Named<SplittingMorphism> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "splitting {}: {} -> {} {{", self.name, self.source, self.target)?;
        for (s, body) in self.value.pairs() {
            writeln!(f, "  {s} -> {body};")?;
        }
        f.write_str("}")
    }
}

/// The ontology block alone; its base calculus is printed separately.
pub fn print_ontology(o: &Ontology) -> String {
    let mut out = format!("ontology {} {{\n  base {};\n  onto_signature {}\n", o.name(), o.base().name(), o.onto_sig());
    out.push_str(if o.adjoined() { "  axioms {\n" } else { "  theory {\n" });
    for a in o.axioms() {
        out.push_str(&format!("    {a};\n"));
    }
    out.push_str("  }\n}");
    out
}

/// Blocks grouped by kind, each group sorted by name, separated by blank
/// lines. Parsing the output gives back an equal library.
impl fmt::Display for Library {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks = self
            .signatures
            .iter()
            .map(|(n, s)| print_signature(n, s))
            .chain(self.calculi.values().map(|c| c.to_string()))
            .chain(self.morphisms.values().map(|m| m.to_string()))
            .chain(self.splittings.values().map(|s| s.to_string()))
            .chain(self.ontologies.values().map(print_ontology));
        for b in blocks {
            writeln!(f, "{b}\n")?;
        }
        Ok(())
    }
}

//! Development graphs: ontologies as nodes, definition, theorem and
//! splitting links between them, each link stored with the evidence its
//! checker produced.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::consequence::{
    check_structural, weaker_on, weaker_than, Calculus, Consequence, Corpus, Fuel, Verdict, Weakness,
};
use crate::dsl::{Library, Named};
use crate::error::{Error, Result};
use crate::morphisms::{SignatureMorphism, SplittingMorphism};
use crate::ontology::{check_ecsy_morphism, validate_ontology, Ontology};
use crate::report::{Report, Status};
use crate::syntax::lexer::{quote, Tok};
use crate::syntax::{Cursor, Formula, Signature};
use crate::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkKind {
    Definition,
    Splitting,
    Theorem,
}

impl LinkKind {
    fn word(self) -> &'static str {
        match self {
            LinkKind::Definition => "definition",
            LinkKind::Splitting => "splitting",
            LinkKind::Theorem => "theorem",
        }
    }

    pub fn parse(word: &str) -> Result<LinkKind> {
        match word {
            "definition" => Ok(LinkKind::Definition),
            "splitting" => Ok(LinkKind::Splitting),
            "theorem" => Ok(LinkKind::Theorem),
            _ => Err(Error::Config(format!("unknown link kind `{word}`"))),
        }
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

/// Definition links name a signature morphism and splitting links a
/// splitting morphism of the graph's declarations; theorem links name none.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub kind: LinkKind,
    pub from: String,
    pub to: String,
    pub morphism: Option<String>,
}

impl Link {
    pub fn theorem(from: &str, to: &str) -> Link {
        Link { kind: LinkKind::Theorem, from: from.into(), to: to.into(), morphism: None }
    }

    pub fn definition(from: &str, to: &str, morphism: &str) -> Link {
        Link { kind: LinkKind::Definition, from: from.into(), to: to.into(), morphism: Some(morphism.into()) }
    }

    pub fn splitting(from: &str, to: &str, morphism: &str) -> Link {
        Link { kind: LinkKind::Splitting, from: from.into(), to: to.into(), morphism: Some(morphism.into()) }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "link {} {} -> {}", self.kind, self.from, self.to)?;
        if let Some(m) = &self.morphism {
            write!(f, " morphism {m}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvidenceStatus {
    VerifiedUpTo {
        corpus_depth: usize,
        fuel: Fuel,
    },
    Refuted(String),
    /// Taken on trust; only theorem links can be asserted.
    Asserted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evidence {
    pub status: EvidenceStatus,
    pub detail: String,
}

impl Evidence {
    pub fn is_refuted(&self) -> bool {
        matches!(self.status, EvidenceStatus::Refuted(_))
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.status {
            EvidenceStatus::VerifiedUpTo { corpus_depth, fuel } => {
                write!(f, "VERIFIED depth={corpus_depth} fuel=({fuel})")
            }
            EvidenceStatus::Refuted(w) => write!(f, "REFUTED {w}"),
            EvidenceStatus::Asserted => f.write_str("ASSERTED"),
        }
    }
}

/// A directed acyclic graph of ontologies. Self-loops do not count as
/// cycles: they carry identities, which decomposition checks need.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DevGraph {
    decls: Library,
    links: BTreeMap<Link, Evidence>,
}

impl DevGraph {
    pub fn new() -> Self {
        DevGraph::default()
    }

    pub fn declarations(&self) -> &Library {
        &self.decls
    }

    /// Makes the signatures, calculi and morphisms of `lib` available to
    /// links. Ontologies in `lib` are ignored; add them with
    /// [`DevGraph::add_node`].
    pub fn declare(&mut self, lib: &Library) -> Result<()> {
        self.decls.merge_declarations(lib)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Ontology> {
        self.decls.ontologies()
    }

    pub fn node(&self, name: &str) -> Result<&Ontology> {
        self.decls.ontology(name).map_err(|_| Error::UnknownNode(name.to_string()))
    }

    pub fn links(&self) -> impl Iterator<Item = (&Link, &Evidence)> {
        self.links.iter()
    }

    pub fn evidence(&self, link: &Link) -> Option<&Evidence> {
        self.links.get(link)
    }

    /// Rejects names in use and ontologies that fail validation.
    pub fn add_node(&mut self, o: Ontology, settings: &Settings) -> Result<Report> {
        if self.decls.has_ontology(o.name()) {
            return Err(Error::DuplicateName(format!("node `{}`", o.name())));
        }
        let report = validate_ontology(&o, settings)?;
        if let Some(l) = report.failures().next() {
            return Err(Error::ValidationFailed(format!("{}: {l}", o.name())));
        }
        self.decls.add_ontology(o)?;
        Ok(report)
    }

    /// Runs the checker for `link` and stores its evidence. Refuted links
    /// are rejected; `assert` stores a theorem link unchecked.
    pub fn add_link(&mut self, link: Link, settings: &Settings, assert: bool) -> Result<Evidence> {
        let (from, to) = (self.node(&link.from)?, self.node(&link.to)?);
        if self.links.contains_key(&link) {
            return Err(Error::DuplicateName(link.to_string()));
        }
        if link.from != link.to && self.reaches(&link.to, &link.from) {
            return Err(Error::Cycle(format!("{link} closes a cycle through {}", link.to)));
        }
        let evidence = if assert {
            if link.kind != LinkKind::Theorem {
                return Err(Error::Config("only theorem links can be asserted".into()));
            }
            Evidence { status: EvidenceStatus::Asserted, detail: String::new() }
        } else {
            check_link(&self.decls, &link, from, to, settings.corpus_depth, &settings.fuel)?
        };
        if let EvidenceStatus::Refuted(w) = &evidence.status {
            return Err(Error::EvidenceRefuted(format!("{link}: {w}")));
        }
        self.links.insert(link, evidence.clone());
        Ok(evidence)
    }

    pub fn remove_link(&mut self, link: &Link) -> Option<Evidence> {
        self.links.remove(link)
    }

    fn successors<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.links.keys().filter(move |l| l.from == node && l.to != node).map(|l| l.to.as_str())
    }

    fn reaches(&self, from: &str, to: &str) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(n) = stack.pop() {
            if n == to {
                return true;
            }
            if seen.insert(n) {
                stack.extend(self.successors(n));
            }
        }
        false
    }

    /// No cycle through distinct nodes.
    pub fn is_acyclic(&self) -> bool {
        let mut indegree: BTreeMap<&str, usize> = self.nodes().map(|o| (o.name(), 0)).collect();
        for l in self.links.keys().filter(|l| l.from != l.to) {
            *indegree.entry(&l.to).or_default() += 1;
        }
        let mut ready: Vec<&str> = indegree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
        let mut done = 0;
        while let Some(n) = ready.pop() {
            done += 1;
            for m in self.successors(n) {
                let d = indegree.get_mut(m).expect("endpoint");
                *d -= 1;
                if *d == 0 {
                    ready.push(m);
                }
            }
        }
        done == indegree.len()
    }

    fn usable<'a>(&'a self, kind: LinkKind, from: &'a str, to: &'a str) -> impl Iterator<Item = &'a Link> + 'a {
        self.links
            .iter()
            .filter(move |(l, e)| l.kind == kind && l.from == from && l.to == to && !e.is_refuted())
            .map(|(l, _)| l)
    }

    fn morphism_of(&self, link: &Link) -> Option<&SignatureMorphism> {
        self.decls.morphism(link.morphism.as_deref()?).ok().map(|m| &m.value)
    }

    fn splitting_of(&self, link: &Link) -> Result<&SplittingMorphism> {
        let name = link.morphism.as_deref().ok_or_else(|| Error::Format(format!("{link} names no splitting")))?;
        Ok(&self.decls.splitting(name)?.value)
    }

    fn has_mono_definition(&self, from: &str, to: &str, mono: bool) -> bool {
        self.usable(LinkKind::Definition, from, to)
            .any(|l| !mono || self.morphism_of(l).is_some_and(SignatureMorphism::is_monomorphic))
    }

    fn require(&self, names: &[&str]) -> Result<()> {
        for n in names {
            self.node(n)?;
        }
        Ok(())
    }

    /// A theorem link `o1 ⇢ o2`.
    pub fn verify_homogeneous_refinement(&self, o1: &str, o2: &str) -> Result<bool> {
        self.require(&[o1, o2])?;
        Ok(self.usable(LinkKind::Theorem, o1, o2).next().is_some())
    }

    /// A theorem link `o1 ⇢ o2p` and a definition link `o2 → o2p` along a
    /// monomorphism.
    pub fn verify_heterogeneous_refinement(&self, o1: &str, o2: &str, o2p: &str) -> Result<bool> {
        self.require(&[o1, o2, o2p])?;
        Ok(self.usable(LinkKind::Theorem, o1, o2p).next().is_some() && self.has_mono_definition(o2, o2p, true))
    }

    /// Intermediate nodes `(o1p, o2p)` with theorem links `o1 ⇢ o1p`,
    /// `o2 ⇢ o2p` and definition links `o → o1p`, `o → o2p`, monomorphic
    /// when `conservative`. The first such pair by name.
    pub fn find_integration(
        &self,
        o: &str,
        o1: &str,
        o2: &str,
        conservative: bool,
    ) -> Result<Option<(String, String)>> {
        self.require(&[o, o1, o2])?;
        let names: Vec<&str> = self.nodes().map(Ontology::name).collect();
        let side = |oi: &str, p: &str| {
            self.usable(LinkKind::Theorem, oi, p).next().is_some() && self.has_mono_definition(o, p, conservative)
        };
        for p1 in &names {
            if !side(o1, p1) {
                continue;
            }
            if let Some(p2) = names.iter().find(|p2| side(o2, p2)) {
                return Ok(Some((p1.to_string(), p2.to_string())));
            }
        }
        Ok(None)
    }

    pub fn verify_integration(&self, o: &str, o1: &str, o2: &str, conservative: bool) -> Result<bool> {
        Ok(self.find_integration(o, o1, o2, conservative)?.is_some())
    }

    /// Checks that `o` splits into `parts`: every splitting link `o → part`
    /// carries verified evidence, and every registered cone (a node with
    /// splitting links to all parts, `o` included) has a mediating splitting
    /// link into `o` whose composites with the projections agree with the
    /// cone on the corpus. Structurality of `o` is sampled as well.
    pub fn verify_decomposition(&self, o: &str, parts: &[&str], settings: &Settings) -> Result<Report> {
        self.require(&[o])?;
        self.require(parts)?;
        if parts.is_empty() {
            return Err(Error::Config("a decomposition needs at least one part".into()));
        }
        let mut report = Report::new();
        let mut projections = Vec::new();
        for p in parts {
            let link = self
                .usable(LinkKind::Splitting, o, p)
                .next()
                .ok_or_else(|| Error::MissingSplittingLink(format!("{o} -> {p}")))?;
            let e = &self.links[link];
            let status =
                if matches!(e.status, EvidenceStatus::VerifiedUpTo { .. }) { Status::Pass } else { Status::Fail };
            report.push(
                format!("projection {o}->{p}"),
                status,
                format!("{} {e}", link.morphism.as_deref().unwrap_or("")),
            );
            projections.push(self.splitting_of(link)?);
        }

        for c in self.nodes().map(Ontology::name) {
            let cone: Vec<&Link> = match parts.iter().map(|p| self.usable(LinkKind::Splitting, c, p).next()).collect() {
                Some(v) => v,
                None => continue,
            };
            let corpus = Corpus::new(self.node(c)?.signature(), settings.corpus_depth, Corpus::DEFAULT_VARS)?;
            let mut verdict = None;
            let mut first_witness = None;
            for m in self.usable(LinkKind::Splitting, c, o) {
                let mediator = self.splitting_of(m)?;
                match self.commutes(mediator, &projections, &cone, &corpus)? {
                    None => {
                        verdict = Some(m.morphism.clone().unwrap_or_default());
                        break;
                    }
                    Some(w) => {
                        first_witness.get_or_insert(w);
                    }
                }
            }
            match (verdict, first_witness) {
                (Some(m), _) => report.push(
                    format!("cone {c}"),
                    Status::Pass,
                    format!("mediating {m} on {} formulas", corpus.len()),
                ),
                (None, Some(w)) => report.push(format!("cone {c}"), Status::Fail, w),
                (None, None) => report.push(format!("cone {c}"), Status::Fail, format!("no splitting link {c} -> {o}")),
            }
        }

        let node = self.node(o)?;
        let corpus = Corpus::new(node.signature(), settings.corpus_depth, Corpus::DEFAULT_VARS)?;
        if !corpus.is_empty() {
            report.extend(check_structural(
                node.effective(),
                &corpus,
                settings.samples,
                &settings.fuel,
                settings.seed,
            )?);
        }
        Ok(report)
    }

    /// First corpus formula on which `projection_i ∘ mediator` and the cone's
    /// `i`th link disagree.
    fn commutes(
        &self,
        mediator: &SplittingMorphism,
        projections: &[&SplittingMorphism],
        cone: &[&Link],
        corpus: &Corpus,
    ) -> Result<Option<String>> {
        for (pi, leg) in projections.iter().zip(cone) {
            let composite = match mediator.then(pi) {
                Ok(c) => c,
                Err(e) => return Ok(Some(e.to_string())),
            };
            let leg_map = self.splitting_of(leg)?;
            for phi in corpus.formulas() {
                let (x, y) = (composite.apply(phi)?, leg_map.apply(phi)?);
                if x != y {
                    return Ok(Some(format!("{phi}: composite gives {x}, {} gives {y}", leg.to)));
                }
            }
        }
        Ok(None)
    }

    /// Canonical manifest: declarations and nodes as DSL blocks, then one
    /// record per link, each group in name order.
    pub fn save(&self) -> String {
        let mut out = self.decls.to_string();
        for (l, e) in &self.links {
            out.push_str(&l.to_string());
            match &e.status {
                EvidenceStatus::VerifiedUpTo { corpus_depth, fuel } => out.push_str(&format!(
                    " verified {corpus_depth} {} {} {}",
                    fuel.max_closure_rounds, fuel.max_formula_size, fuel.max_set_size
                )),
                EvidenceStatus::Asserted => out.push_str(" assert"),
                EvidenceStatus::Refuted(w) => out.push_str(&format!(" refuted {}", quote(w))),
            }
            if !e.detail.is_empty() {
                out.push_str(&format!(" {}", quote(&e.detail)));
            }
            out.push_str(";\n");
        }
        out
    }

    /// Inverse of [`DevGraph::save`]. Anything malformed, including dangling
    /// endpoints and cycles, is a `FormatError`.
    pub fn load(text: &str) -> Result<DevGraph> {
        DevGraph::load_inner(text).map_err(|e| match e {
            Error::Format(_) => e,
            other => Error::Format(other.to_string()),
        })
    }

    fn load_inner(text: &str) -> Result<DevGraph> {
        let mut g = DevGraph::new();
        let mut c = Cursor::new(text)?;
        while !c.at_end() {
            if !c.eat_keyword("link") {
                g.decls.block(&mut c)?;
                continue;
            }
            let kind = LinkKind::parse(&c.ident()?)?;
            let from = c.ident()?;
            c.expect(&Tok::Arrow)?;
            let to = c.ident()?;
            let morphism = if c.eat_keyword("morphism") { Some(c.ident()?) } else { None };
            let status = if c.eat_keyword("verified") {
                let corpus_depth = c.number()? as usize;
                let (r, s, n) = (c.number()?, c.number()?, c.number()?);
                EvidenceStatus::VerifiedUpTo { corpus_depth, fuel: Fuel::new(r as u32, s as u32, n as usize) }
            } else if c.eat_keyword("assert") {
                EvidenceStatus::Asserted
            } else if c.eat_keyword("refuted") {
                EvidenceStatus::Refuted(c.string()?)
            } else {
                return Err(c.error("expected `verified`, `assert` or `refuted`"));
            };
            let detail = if matches!(c.peek(), Some(Tok::Str(_))) { c.string()? } else { String::new() };
            c.expect(&Tok::Semi)?;
            let link = Link { kind, from, to, morphism };
            g.node(&link.from)?;
            g.node(&link.to)?;
            if (kind == LinkKind::Theorem) != link.morphism.is_none() {
                return Err(Error::Format(format!("{link}: wrong payload for a {kind} link")));
            }
            if g.links.insert(link.clone(), Evidence { status, detail }).is_some() {
                return Err(Error::Format(format!("{link} listed twice")));
            }
        }
        if !g.is_acyclic() {
            return Err(Error::Format("links form a cycle".into()));
        }
        Ok(g)
    }
}

/// A calculus seen through a splitting morphism, with the size bound
/// scaled by how much the unfolding can grow a formula.
struct Unfolded<'a> {
    f: &'a SplittingMorphism,
    target: &'a Calculus,
}

impl Consequence for Unfolded<'_> {
    fn label(&self) -> String {
        format!("f*{}", self.target.name())
    }

    fn signature(&self) -> &Signature {
        self.f.source()
    }

    fn derives(&self, gamma: &[Formula], phi: &Formula, fuel: &Fuel) -> Result<Verdict> {
        let gamma = gamma.iter().map(|g| self.f.apply(g)).collect::<Result<Vec<_>>>()?;
        let fuel = Fuel { max_formula_size: fuel.max_formula_size.saturating_mul(self.f.expansion().max(1)), ..*fuel };
        self.target.derives(&gamma, &self.f.apply(phi)?, &fuel)
    }
}

/// `Γ ⊢ φ` in `from` implies `f̂(Γ) ⊢ f̂(φ)` in `to`, on the corpus.
pub fn check_splitting(
    f: &SplittingMorphism,
    from: &Ontology,
    to: &Ontology,
    corpus_depth: usize,
    fuel: &Fuel,
) -> Result<Weakness> {
    if f.source() != from.signature() || f.target() != to.signature() {
        return Err(Error::Signature(format!(
            "splitting {} -> {} does not run from {} to {}",
            f.source(),
            f.target(),
            from.name(),
            to.name()
        )));
    }
    let corpus = Corpus::new(from.signature(), corpus_depth, Corpus::DEFAULT_VARS)?;
    Ok(weaker_on(from.effective(), &Unfolded { f, target: to.effective() }, &corpus, fuel)?.full)
}

/// The evidence a link's checker produces, without touching any graph.
pub fn check_link(
    decls: &Library,
    link: &Link,
    from: &Ontology,
    to: &Ontology,
    corpus_depth: usize,
    fuel: &Fuel,
) -> Result<Evidence> {
    let verified =
        |detail: String| Evidence { status: EvidenceStatus::VerifiedUpTo { corpus_depth, fuel: *fuel }, detail };
    let refuted = |w: String| Evidence { status: EvidenceStatus::Refuted(w.clone()), detail: w };
    let weakness = |w: Weakness| match w {
        Weakness::VerifiedUpTo { .. } => verified(String::new()),
        other => refuted(other.to_string()),
    };
    let payload = || link.morphism.as_deref().ok_or_else(|| Error::Config(format!("{link} needs a morphism")));
    Ok(match link.kind {
        LinkKind::Definition => {
            let Named { value: h, .. } = decls.morphism(payload()?)?;
            let e = check_ecsy_morphism(h, from, to, corpus_depth, fuel)?;
            match (&e.consequence, &e.theory_mismatch) {
                (Weakness::VerifiedUpTo { .. }, None) => verified(String::new()),
                (Weakness::VerifiedUpTo { .. }, Some(w)) => refuted(format!("theory: {w}")),
                (w, _) => refuted(w.to_string()),
            }
        }
        LinkKind::Theorem => {
            if link.morphism.is_some() {
                return Err(Error::Config(format!("{link}: theorem links take no morphism")));
            }
            weakness(weaker_than(from.effective(), to.effective(), corpus_depth, fuel)?.full)
        }
        LinkKind::Splitting => {
            let Named { value: f, .. } = decls.splitting(payload()?)?;
            weakness(check_splitting(f, from, to, corpus_depth, fuel)?)
        }
    })
}

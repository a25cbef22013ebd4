use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ecsy_core::consequence::{check_operator_laws, Calculus, Corpus, Fuel, Verdict};
use ecsy_core::devgraph::{DevGraph, Link, LinkKind};
use ecsy_core::dsl::Library;
use ecsy_core::fibring::FibringSession;
use ecsy_core::ontology::{connect, validate_ontology};
use ecsy_core::report::Report;
use ecsy_core::{fixtures, parse_formula, parse_formula_set, Error, Settings};

#[derive(Parser)]
#[command(name = "ecsy", version, about = "Consequence systems, fibring and ontology development graphs")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Closure rounds per query.
    #[arg(long, global = true, default_value_t = 6)]
    fuel_rounds: u32,
    /// Largest formula, in nodes, a closure may hold.
    #[arg(long, global = true, default_value_t = 31)]
    fuel_size: u32,
    /// Formulas a closure may add by rule firings.
    #[arg(long, global = true, default_value_t = 512)]
    fuel_set: usize,
    #[arg(long, global = true, default_value_t = 2)]
    corpus_depth: usize,
    /// Random samples for the operator-law checks.
    #[arg(long, global = true, default_value_t = 25)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Store theorem links without checking them.
    #[arg(long, global = true)]
    assert: bool,
    /// Development graph manifest used by `graph` subcommands.
    #[arg(long, global = true, default_value = "ecsy.graph")]
    manifest: PathBuf,
    /// Declaration files; the built-in fixtures when none are given.
    #[arg(long = "lib", global = true)]
    libs: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse files, validate their ontologies and check the laws of their calculi.
    Check { paths: Vec<PathBuf> },
    /// Bounded derivability in one calculus (or the effective calculus of an ontology).
    Derive {
        #[arg(long)]
        calc: String,
        /// File holding the premises, e.g. `{x1, imp(x1, x2)}`.
        #[arg(long)]
        gamma: Option<PathBuf>,
        phi: String,
    },
    /// Bounded derivability in the fibring of two calculi.
    Fibre {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        gamma: Option<PathBuf>,
        #[arg(long)]
        phi: String,
        /// Alternation rounds; overrides --fuel-rounds.
        #[arg(long)]
        rounds: Option<u32>,
        /// Write the session (union signature, fuel, interning) here.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Connect two ontologies and validate the result.
    Connect {
        left: String,
        right: String,
        #[arg(long)]
        name: String,
        /// Write the new declarations here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the built-in fixture library.
    Fixtures,
    #[command(subcommand)]
    Graph(GraphCmd),
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Add the ontologies declared in FILES as nodes.
    AddNode {
        files: Vec<PathBuf>,
        /// Only these ontologies.
        #[arg(long = "only")]
        only: Vec<String>,
    },
    /// Check and store a link: `theorem`, `definition` or `splitting`.
    AddLink {
        kind: String,
        from: String,
        to: String,
        #[arg(long)]
        morphism: Option<String>,
    },
    /// Homogeneous refinement of O1 by O2, or heterogeneous through --via.
    VerifyRefinement {
        o1: String,
        o2: String,
        #[arg(long)]
        via: Option<String>,
    },
    VerifyIntegration {
        o: String,
        o1: String,
        o2: String,
        #[arg(long)]
        conservative: bool,
    },
    VerifyDecomposition {
        o: String,
        #[arg(required = true)]
        parts: Vec<String>,
    },
    /// Print the canonical manifest, or write it to --out.
    Save {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replace the manifest with the graph in FILE.
    Load { file: PathBuf },
}

/// Process outcome: 0 success, 1 verification failure, 2 usage or parse error.
enum Failure {
    Verify(String),
    Usage(String),
}

type Outcome = Result<String, Failure>;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. }
            | Error::UnknownSymbol(_)
            | Error::Arity(_)
            | Error::Language(_)
            | Error::OntoSig(_)
            | Error::UnknownName(_)
            | Error::UnknownNode(_)
            | Error::DuplicateName(_)
            | Error::Config(_)
            | Error::Format(_) => Failure::Usage(e.to_string()),
            _ => Failure::Verify(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ws = Workspace::new(&cli.opts);
    let result = match cli.cmd {
        Cmd::Check { paths } => cmd_check(&ws, &paths),
        Cmd::Derive { calc, gamma, phi } => cmd_derive(&ws, &calc, gamma.as_deref(), &phi),
        Cmd::Fibre { left, right, gamma, phi, rounds, dump } => {
            cmd_fibre(&ws, &left, &right, gamma.as_deref(), &phi, rounds, dump.as_deref())
        }
        Cmd::Connect { left, right, name, out } => cmd_connect(&ws, &left, &right, &name, out.as_deref()),
        Cmd::Fixtures => Ok(fixtures::library().to_string()),
        Cmd::Graph(g) => cmd_graph(&ws, g),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}

struct Workspace {
    settings: Settings,
    manifest: PathBuf,
    libs: Vec<PathBuf>,
    assert: bool,
}

impl Workspace {
    fn new(o: &Opts) -> Self {
        let settings = Settings {
            fuel: Fuel::new(o.fuel_rounds, o.fuel_size, o.fuel_set),
            corpus_depth: o.corpus_depth,
            samples: o.samples,
            seed: o.seed,
        };
        Workspace { settings, manifest: o.manifest.clone(), libs: o.libs.clone(), assert: o.assert }
    }

    fn library(&self) -> Result<Library, Failure> {
        if self.libs.is_empty() {
            return Ok(fixtures::library());
        }
        let mut lib = Library::new();
        for p in &self.libs {
            load_into(&mut lib, p)?;
        }
        Ok(lib)
    }

    fn graph(&self) -> Result<DevGraph, Failure> {
        if !self.manifest.exists() {
            return Ok(DevGraph::new());
        }
        Ok(DevGraph::load(&read(&self.manifest)?)?)
    }

    fn store(&self, g: &DevGraph) -> Result<(), Failure> {
        write(&self.manifest, &g.save())
    }
}

fn read(p: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
}

fn write(p: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
}

fn load_into(lib: &mut Library, p: &Path) -> Result<(), Failure> {
    let text = read(p)?;
    lib.load(&text).map_err(|e| match Failure::from(e) {
        Failure::Usage(m) => Failure::Usage(format!("{}: {m}", p.display())),
        Failure::Verify(m) => Failure::Verify(format!("{}: {m}", p.display())),
    })
}

fn calculus<'a>(lib: &'a Library, name: &str) -> Result<&'a Calculus, Failure> {
    match lib.calculus(name) {
        Ok(c) => Ok(c),
        Err(e) => lib.ontology(name).map(|o| o.effective()).map_err(|_| e.into()),
    }
}

fn verdict_or_fail(out: String, v: Verdict) -> Outcome {
    if v.is_derived() {
        Ok(out)
    } else {
        Err(Failure::Verify(out.trim_end().to_string()))
    }
}

fn first_failure(out: &mut String, what: &str, r: &Report, first: &mut Option<String>) {
    let _ = writeln!(out, "# {what}");
    out.push_str(&r.to_string());
    if first.is_none() {
        *first = r.failures().next().map(|l| format!("{what}: {l}"));
    }
}

/// Every file is parsed (into one library, in order) before anything runs.
/// Parse errors count as failed checks here.
fn cmd_check(ws: &Workspace, paths: &[PathBuf]) -> Outcome {
    if paths.is_empty() {
        return Err(Failure::Usage("check: no files given".into()));
    }
    let mut lib = Library::new();
    for p in paths {
        load_into(&mut lib, p).map_err(|f| match f {
            Failure::Usage(m) | Failure::Verify(m) => Failure::Verify(m),
        })?;
    }
    let s = &ws.settings;
    let mut out = String::new();
    let mut first = None;
    for cal in lib.calculi() {
        let corpus = Corpus::new(cal.signature(), s.corpus_depth, Corpus::DEFAULT_VARS)?;
        let r = check_operator_laws(cal, &corpus, s.samples, &s.fuel, s.seed)?;
        first_failure(&mut out, &format!("calculus {}", cal.name()), &r, &mut first);
    }
    for o in lib.ontologies() {
        let r = validate_ontology(o, s)?;
        first_failure(&mut out, &format!("ontology {}", o.name()), &r, &mut first);
    }
    match first {
        None => Ok(out),
        Some(w) => {
            print!("{out}");
            Err(Failure::Verify(w))
        }
    }
}

fn premises(path: Option<&Path>, sig: &ecsy_core::Signature) -> Result<Vec<ecsy_core::Formula>, Failure> {
    match path {
        None => Ok(Vec::new()),
        Some(p) => Ok(parse_formula_set(&read(p)?, sig)?),
    }
}

fn cmd_derive(ws: &Workspace, calc: &str, gamma: Option<&Path>, phi: &str) -> Outcome {
    let lib = ws.library()?;
    let cal = calculus(&lib, calc)?;
    ws.settings.fuel.validate()?;
    let gamma = premises(gamma, cal.signature())?;
    let phi = parse_formula(phi, cal.signature())?;
    let v = cal.derives(&gamma, &phi, &ws.settings.fuel)?;
    verdict_or_fail(format!("{v}\n"), v)
}

fn cmd_fibre(
    ws: &Workspace,
    left: &str,
    right: &str,
    gamma: Option<&Path>,
    phi: &str,
    rounds: Option<u32>,
    dump: Option<&Path>,
) -> Outcome {
    let lib = ws.library()?;
    let (l, r) = (calculus(&lib, left)?, calculus(&lib, right)?);
    let mut fuel = ws.settings.fuel;
    if let Some(n) = rounds {
        fuel = fuel.with_rounds(n);
    }
    fuel.validate()?;
    let session = FibringSession::open(l, r, fuel)?;
    let sig = session.union_signature().clone();
    let gamma = premises(gamma, &sig)?;
    let phi = parse_formula(phi, &sig)?;
    let v = session.fibred_derives(&gamma, &phi)?;
    if let Some(p) = dump {
        write(p, &session.dump())?;
    }
    let line = match v {
        Verdict::Derived(n) => format!("DERIVED round={n}\n"),
        Verdict::NotDerivedWithin(_) => format!("{v}\n"),
    };
    verdict_or_fail(line, v)
}

fn cmd_connect(ws: &Workspace, left: &str, right: &str, name: &str, out: Option<&Path>) -> Outcome {
    let lib = ws.library()?;
    let (o1, o2) = (lib.ontology(left)?, lib.ontology(right)?);
    ws.settings.fuel.validate()?;
    let joint = connect(o1, o2, name, &ws.settings.fuel)?;
    let report = validate_ontology(&joint, &ws.settings)?;
    let mut decls = Library::new();
    decls.add_signature(joint.base().signature_name(), joint.signature().clone())?;
    decls.add_ontology(joint)?;
    let mut text = String::new();
    match out {
        Some(p) => write(p, &decls.to_string())?,
        None => text.push_str(&decls.to_string()),
    }
    let _ = writeln!(text, "# validate {name}");
    text.push_str(&report.to_string());
    let failed = report.failures().next().cloned();
    match failed {
        None => Ok(text),
        Some(l) => {
            print!("{text}");
            Err(Failure::Verify(format!("{name}: {l}")))
        }
    }
}

fn cmd_graph(ws: &Workspace, cmd: GraphCmd) -> Outcome {
    let s = &ws.settings;
    if let GraphCmd::Load { file } = &cmd {
        let g = DevGraph::load(&read(file)?)?;
        ws.store(&g)?;
        return Ok(format!("loaded {} nodes, {} links\n", g.nodes().count(), g.links().count()));
    }
    let mut g = ws.graph()?;
    match cmd {
        GraphCmd::AddNode { files, only } => {
            let mut lib = g.declarations().clone();
            for p in &files {
                load_into(&mut lib, p)?;
            }
            let fresh: Vec<_> = lib
                .ontologies()
                .filter(|o| g.node(o.name()).is_err())
                .filter(|o| only.is_empty() || only.iter().any(|n| n == o.name()))
                .cloned()
                .collect();
            if let Some(n) = only.iter().find(|n| lib.ontology(n).is_err()) {
                return Err(Error::UnknownName(format!("ontology `{n}`")).into());
            }
            g.declare(&lib)?;
            let mut out = String::new();
            for o in fresh {
                let name = o.name().to_string();
                let r = g.add_node(o, s)?;
                let _ = writeln!(out, "# node {name}");
                out.push_str(&r.to_string());
            }
            ws.store(&g)?;
            Ok(out)
        }
        GraphCmd::AddLink { kind, from, to, morphism } => {
            let kind = LinkKind::parse(&kind)?;
            let link = Link { kind, from, to, morphism };
            let e = g.add_link(link.clone(), s, ws.assert)?;
            ws.store(&g)?;
            Ok(format!("{link}\t{e}\n"))
        }
        GraphCmd::VerifyRefinement { o1, o2, via } => {
            let (ok, what) = match &via {
                None => (g.verify_homogeneous_refinement(&o1, &o2)?, format!("refinement {o1} {o2}")),
                Some(v) => (g.verify_heterogeneous_refinement(&o1, &o2, v)?, format!("refinement {o1} {o2} via {v}")),
            };
            holds(what, ok)
        }
        GraphCmd::VerifyIntegration { o, o1, o2, conservative } => {
            let what = format!("integration {o} {o1} {o2}{}", if conservative { " conservative" } else { "" });
            match g.find_integration(&o, &o1, &o2, conservative)? {
                Some((a, b)) => Ok(format!("{what}\tPASS\tthrough {a}, {b}\n")),
                None => holds(what, false),
            }
        }
        GraphCmd::VerifyDecomposition { o, parts } => {
            let parts: Vec<&str> = parts.iter().map(String::as_str).collect();
            let r = g.verify_decomposition(&o, &parts, s)?;
            let failed = r.failures().next().cloned();
            match failed {
                None => Ok(r.to_string()),
                Some(l) => {
                    print!("{r}");
                    Err(Failure::Verify(format!("decomposition {o}: {l}")))
                }
            }
        }
        GraphCmd::Save { out } => match out {
            Some(p) => {
                write(&p, &g.save())?;
                Ok(String::new())
            }
            None => Ok(g.save()),
        },
        GraphCmd::Load { .. } => unreachable!(),
    }
}

fn holds(what: String, ok: bool) -> Outcome {
    if ok {
        Ok(format!("{what}\tPASS\n"))
    } else {
        Err(Failure::Verify(format!("{what}\tFAIL")))
    }
}

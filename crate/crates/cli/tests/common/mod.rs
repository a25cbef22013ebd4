#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Runs the binary inside `dir`, so the default manifest lands there.
pub fn ecsy(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_ecsy")).current_dir(dir).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

/// Every command of the suite with its expected exit code. Paths are
/// relative to the run directory; `prepare` copies the fixtures there.
pub const SUITE: &[(&[&str], i32)] = &[
    (&["check", "cpl.ecsy", "conj.ecsy"], 0),
    (&["check", "arity.ecsy"], 1),
    (&["check", "loose.ecsy"], 1),
    (&["derive", "--calc", "CPL", "--gamma", "mp.gamma", "x2"], 0),
    (&["derive", "--calc", "CPL", "x1"], 1),
    (&["derive", "--calc", "NOPE", "x1"], 2),
    (&["derive", "--lib", "cpl.ecsy", "--calc", "CPL_ONTO", "imp(bot, not(x1))"], 0),
    (
        &[
            "fibre",
            "--left",
            "CPL",
            "--right",
            "CONJ",
            "--gamma",
            "worked.gamma",
            "--phi",
            "x3",
            "--rounds",
            "2",
            "--dump",
            "session.dump",
        ],
        0,
    ),
    (
        &[
            "connect",
            "--lib",
            "cpl.ecsy",
            "--lib",
            "conj.ecsy",
            "CPL_ONTO",
            "CONJ_ONTO",
            "--name",
            "JOINT",
            "--out",
            "joint.ecsy",
        ],
        0,
    ),
    (&["check", "joint.ecsy"], 0),
    (&["graph", "add-node", "split.ecsy"], 0),
    (&["graph", "add-link", "splitting", "TOY_O", "A_O", "--morphism", "pa"], 0),
    (&["graph", "add-link", "splitting", "TOY_O", "B_O", "--morphism", "pb"], 0),
    (&["graph", "add-link", "splitting", "TOY_O", "TOY_O", "--morphism", "m"], 0),
    (&["graph", "verify-decomposition", "TOY_O", "A_O", "B_O"], 0),
    (&["graph", "add-link", "theorem", "TOY_O", "DUP"], 0),
    (&["graph", "add-link", "theorem", "DUP", "TOY_O"], 1),
    (&["graph", "verify-refinement", "TOY_O", "DUP"], 0),
    (&["graph", "verify-refinement", "DUP", "TOY_O"], 1),
    (&["--seed", "11", "--samples", "40", "graph", "add-node", "cpl.ecsy", "conj.ecsy"], 0),
    (&["graph", "verify-integration", "TOY_O", "A_O", "B_O"], 1),
    (&["graph", "save", "--out", "saved.graph"], 0),
    (&["--manifest", "copy.graph", "graph", "load", "saved.graph"], 0),
    (&["--manifest", "copy.graph", "graph", "save"], 0),
];

pub const FIXTURES: &[&str] =
    &["cpl.ecsy", "conj.ecsy", "arity.ecsy", "loose.ecsy", "split.ecsy", "mp.gamma", "worked.gamma"];

pub fn prepare(dir: &Path) {
    for f in FIXTURES {
        std::fs::copy(fixture(f), dir.join(f)).expect("fixture copies");
    }
}

/// Runs the suite in a fresh directory and returns its transcript, or the
/// first command whose exit code was unexpected.
pub fn run_suite(dir: &Path) -> Result<String, String> {
    prepare(dir);
    let mut transcript = String::new();
    for (args, want) in SUITE {
        let r = ecsy(dir, args);
        let _ = writeln!(transcript, "$ ecsy {}\nexit {}\n{}{}", args.join(" "), r.code, r.stdout, r.stderr);
        if r.code != *want {
            return Err(format!("`ecsy {}` exited {} (wanted {want}): {}", args.join(" "), r.code, r.stderr));
        }
    }
    for f in ["session.dump", "joint.ecsy", "ecsy.graph", "copy.graph"] {
        let text = std::fs::read_to_string(dir.join(f)).map_err(|e| format!("{f}: {e}"))?;
        let _ = writeln!(transcript, "== {f}\n{text}");
    }
    Ok(transcript)
}

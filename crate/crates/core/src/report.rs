//! Line-oriented reports shared by every check: `LAW<TAB>status<TAB>witness`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
    /// The fuel ran out before the check could decide.
    Inconclusive,
    /// A searched-for witness exists within the bound.
    Found,
    /// No witness within the bound.
    NotFound,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Found => "FOUND",
            Status::NotFound => "NOT_FOUND",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub law: String,
    pub status: Status,
    pub witness: String,
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", self.law, self.status)?;
        if !self.witness.is_empty() {
            write!(f, "\t{}", self.witness)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    lines: Vec<Line>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, law: impl Into<String>, status: Status, witness: impl Into<String>) {
        self.lines.push(Line { law: law.into(), status, witness: witness.into() });
    }

    pub fn extend(&mut self, other: Report) {
        self.lines.extend(other.lines);
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    /// Lines for `law`, in order.
    pub fn get<'a>(&'a self, law: &'a str) -> impl Iterator<Item = &'a Line> + 'a {
        self.lines.iter().filter(move |l| l.law == law)
    }

    pub fn status_of(&self, law: &str) -> Option<Status> {
        self.get(law).next().map(|l| l.status)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Line> {
        self.lines.iter().filter(|l| l.status == Status::Fail)
    }

    /// No line failed. Inconclusive lines do not count as failures.
    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

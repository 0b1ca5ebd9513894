//! Structured outcome of an identity check.
//!
//! Each relation renders as one line:
//! `RELATION <name> PASS` or `RELATION <name> FAIL <row> <col> <residual>`.

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Pass,
    Fail {
        row: usize,
        col: usize,
        residual: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub name: String,
    pub outcome: Outcome,
}

impl Relation {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            Outcome::Pass => write!(f, "RELATION {} PASS", self.name),
            Outcome::Fail { row, col, residual } => {
                write!(f, "RELATION {} FAIL {} {} {}", self.name, row, col, residual)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub relations: Vec<Relation>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.relations.push(Relation {
            name: name.into(),
            outcome: Outcome::Pass,
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, row: usize, col: usize, residual: impl fmt::Display) {
        self.relations.push(Relation {
            name: name.into(),
            outcome: Outcome::Fail {
                row,
                col,
                residual: residual.to_string(),
            },
        });
    }

    /// Records `name` as passing when `first_failure` is `None`.
    pub fn record<R: fmt::Display>(
        &mut self,
        name: impl Into<String>,
        first_failure: Option<(usize, usize, R)>,
    ) {
        match first_failure {
            None => self.pass(name),
            Some((row, col, res)) => self.fail(name, row, col, res),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, ok: bool) {
        if ok {
            self.pass(name)
        } else {
            self.fail(name, 0, 0, "-")
        }
    }

    pub fn extend(&mut self, other: Report) {
        self.relations.extend(other.relations);
    }

    pub fn all_passed(&self) -> bool {
        self.relations.iter().all(Relation::passed)
    }

    pub fn first_failure(&self) -> Option<&Relation> {
        self.relations.iter().find(|r| !r.passed())
    }

    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.relations {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

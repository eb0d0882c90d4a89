//! Pass/fail reports produced by the checkers.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: String,
    pub witness: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub name: String,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

/// Violations kept in full; beyond this only the count grows.
const KEEP: usize = 50;

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report { name: name.into(), ..Default::default() }
    }

    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// Records one checked condition.
    pub fn check<T: PartialEq + fmt::Display>(&mut self, condition: &str, witness: impl FnOnce() -> String, expected: &T, got: &T) {
        self.checked += 1;
        if expected != got && self.violations.len() < KEEP {
            self.violations.push(Violation {
                condition: condition.to_string(),
                witness: witness(),
                expected: expected.to_string(),
                got: got.to_string(),
            });
        }
    }

    pub fn fail(&mut self, condition: &str, witness: String, expected: String, got: String) {
        self.checked += 1;
        if self.violations.len() < KEEP {
            self.violations.push(Violation { condition: condition.into(), witness, expected, got });
        }
    }

    pub fn absorb(&mut self, other: Report) {
        self.checked += other.checked;
        for v in other.violations {
            if self.violations.len() < KEEP {
                self.violations.push(Violation { condition: format!("{}: {}", other.name, v.condition), ..v });
            }
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.ok() { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({} checks", self.name, self.checked)?;
        if !self.ok() {
            write!(f, ", {} violations", self.violations.len())?;
        }
        write!(f, ")")?;
        for v in self.violations.iter().take(5) {
            write!(f, "\n  {} at [{}]: expected {}, got {}", v.condition, v.witness, v.expected, v.got)?;
        }
        Ok(())
    }
}

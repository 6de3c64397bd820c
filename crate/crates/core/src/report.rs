//! Check reports. Every verification lists the failing instances with
//! their residuals instead of collapsing to a boolean, so a failing
//! identity can be traced to the exact generator combination that
//! broke it.

use std::fmt;

/// One failing instance of a checked identity.
#[derive(Debug, Clone)]
pub struct Violation<R> {
    /// Short name of the identity that failed.
    pub condition: &'static str,
    /// Rendered location, e.g. `(x1,x2,e3)`.
    pub at: String,
    /// The nonzero residual (left side minus right side).
    pub residual: R,
}

/// Outcome of checking one family of identities over all its generator
/// instances.
#[derive(Debug, Clone)]
pub struct CheckReport<R> {
    pub name: &'static str,
    pub violations: Vec<Violation<R>>,
}

impl<R> CheckReport<R> {
    pub fn new(name: &'static str) -> Self {
        CheckReport {
            name,
            violations: Vec::new(),
        }
    }

    pub fn push(&mut self, condition: &'static str, at: String, residual: R) {
        self.violations.push(Violation {
            condition,
            at,
            residual,
        });
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl<R: fmt::Display> fmt::Display for CheckReport<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "{}: ok", self.name);
        }
        writeln!(f, "{}: {} violation(s)", self.name, self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {} at {}: residual {}", v.condition, v.at, v.residual)?;
        }
        Ok(())
    }
}

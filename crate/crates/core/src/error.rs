use std::fmt;

use thiserror::Error;

/// One named inequality of an existence domain with its signed margin.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub id: String,
    pub margin: f64,
    pub satisfied: bool,
}

impl Constraint {
    pub fn new(id: impl Into<String>, margin: f64) -> Self {
        Constraint {
            id: id.into(),
            margin,
            satisfied: margin > 0.0,
        }
    }
}

/// Ordered list of constraints; a spec is buildable iff every margin is positive.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintReport {
    pub constraints: Vec<Constraint>,
}

impl ConstraintReport {
    pub fn push(&mut self, id: impl Into<String>, margin: f64) {
        self.constraints.push(Constraint::new(id, margin));
    }

    pub fn all_satisfied(&self) -> bool {
        self.constraints.iter().all(|c| c.satisfied)
    }

    pub fn violated(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| !c.satisfied)
    }

    pub fn margin(&self, id: &str) -> Option<f64> {
        self.constraints
            .iter()
            .find(|c| c.id == id)
            .map(|c| c.margin)
    }

    /// `constraint_id=margin` lines.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for c in &self.constraints {
            out.push_str(&format!("{}={}\n", c.id, c.margin));
        }
        out
    }
}

impl fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .violated()
            .map(|c| format!("{} (margin {:e})", c.id, c.margin))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("constraint violation: {report}")]
    ConstraintViolation { report: ConstraintReport },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("layout error: {0}")]
    Layout(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("solver abort: {0}")]
    SolverAbort(String),
}

pub type Result<T> = std::result::Result<T, Error>;

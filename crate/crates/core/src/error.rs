use std::fmt;

use thiserror::Error;

/// A single broken invariant reported by [`crate::signal::Validate::validate`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Violation {
    pub invariant: &'static str,
    pub location: String,
}

impl Violation {
    pub(crate) fn new(invariant: &'static str, location: impl Into<String>) -> Self {
        Self {
            invariant,
            location: location.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.invariant, self.location)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid object: {}", join(.0))]
    Invalid(Vec<Violation>),

    #[error("{what} needs {needed} but the cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("partition mismatch: {0}")]
    PartitionMismatch(String),

    #[error("kernel class mismatch: {0}")]
    ClassMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;

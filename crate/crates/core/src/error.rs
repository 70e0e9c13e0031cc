use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Location of a diagnostic inside an input file. Lines and columns are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub file: Option<String>,
    pub line: usize,
    pub column: usize,
    pub end_line: usize,
    pub end_column: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize, end_line: usize, end_column: usize) -> Self {
        debug_assert!((line, column) <= (end_line, end_column));
        SourceSpan {
            file: None,
            line,
            column,
            end_line,
            end_column,
        }
    }

    pub fn with_file(mut self, file: impl Into<String>) -> Self {
        self.file = Some(file.into());
        self
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

/// Conversion hypothesis that a request failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hypothesis {
    UnitaryStepwise,
    ZeroCodedByZeroProfile,
    NeighbourhoodPreserving,
    MinimizationBound,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::UnitaryStepwise => "not unitary stepwise",
            Hypothesis::ZeroCodedByZeroProfile => "level 0 is not coded by the all-zero profile",
            Hypothesis::NeighbourhoodPreserving => "coding is not neighbourhood preserving",
            Hypothesis::MinimizationBound => "formula exceeds the exact minimization bound",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    /// A value violates a type invariant or an operation precondition.
    #[error("specification error: {0}")]
    Spec(String),

    #[error("state space of {product} = {states} states exceeds the enumeration cap of {cap}")]
    Capacity {
        product: String,
        states: u128,
        cap: usize,
    },

    #[error("conversion refused: {hypothesis}: {detail}")]
    Refused {
        hypothesis: Hypothesis,
        detail: String,
    },

    #[error("variable `{0}` has no marker of sign")]
    MarkerCoverage(String),

    #[error("sign unrecoverable for interaction {0} -> {1}: no arc between their markers")]
    SignUnrecoverable(String, String),

    #[error("conflicting marker signs for interaction {0} -> {1}")]
    ConflictingSigns(String, String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn spec(msg: impl Into<String>) -> Self {
        Error::Spec(msg.into())
    }
}

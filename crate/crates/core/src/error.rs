//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Incompatible matrix shapes for an operation.
    #[error("dimension mismatch in {op}: {lhs_rows}x{lhs_cols} vs {rhs_rows}x{rhs_cols}")]
    Dim {
        op: &'static str,
        lhs_rows: usize,
        lhs_cols: usize,
        rhs_rows: usize,
        rhs_cols: usize,
    },

    /// An index outside the valid range.
    #[error("index {index} out of range for {what} (len {len})")]
    Index {
        what: &'static str,
        index: usize,
        len: usize,
    },

    /// Input data violating a documented invariant.
    #[error("validation: {0}")]
    Validation(String),

    /// Inconsistent or unusable configuration.
    #[error("config: {0}")]
    Config(String),

    /// A non-finite value surfaced during computation.
    #[error("non-finite value in {what}{}", .epoch.map(|e| format!(" (epoch {e})")).unwrap_or_default())]
    Numeric { what: String, epoch: Option<usize> },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A parse failure with file/line context.
    #[error("{}:{line}: {msg}", .path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
}

impl Error {
    pub fn dim(op: &'static str, lhs: (usize, usize), rhs: (usize, usize)) -> Self {
        Error::Dim {
            op,
            lhs_rows: lhs.0,
            lhs_cols: lhs.1,
            rhs_rows: rhs.0,
            rhs_cols: rhs.1,
        }
    }

    pub fn numeric(what: impl Into<String>) -> Self {
        Error::Numeric {
            what: what.into(),
            epoch: None,
        }
    }

    pub fn numeric_at(what: impl Into<String>, epoch: usize) -> Self {
        Error::Numeric {
            what: what.into(),
            epoch: Some(epoch),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

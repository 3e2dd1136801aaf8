use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} contains non-finite entries")]
    NonFinite { what: &'static str },

    #[error("SVD of a {rows}x{cols} matrix did not converge")]
    SvdNoConvergence { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator is rank deficient: numerical rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("random draw stayed degenerate after {attempts} attempts: {reason}")]
    DegenerateDraw { attempts: usize, reason: String },

    #[error("equality constraints are infeasible (relative residual {residual:e})")]
    Infeasible { residual: f64 },

    #[error("exhaustive search needs {combinations} subsets, above the guard of {guard}")]
    EnumerationGuard { combinations: u128, guard: u128 },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl ToString) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.to_string(),
        }
    }
}

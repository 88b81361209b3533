use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = LilError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LilError {
    /// An argument is outside the domain of the statistic or probability.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural precondition on inputs does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("source `{source_id}` ends {deficit_bits} bits before the last checkpoint ({available_bits} of {required_bits} bits available)")]
    TruncatedSource {
        source_id: String,
        available_bits: u64,
        required_bits: u64,
        deficit_bits: u64,
    },

    /// Quadrature failed to converge or two independent routes disagree.
    #[error(
        "numerical failure in {context}: achieved residual {residual:e} exceeds {tolerance:e}"
    )]
    Numerical {
        context: String,
        residual: f64,
        tolerance: f64,
    },

    /// Traces or results do not share the same checkpoint layout.
    #[error("structural mismatch: {0}")]
    Structure(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("I/O error writing corpus file {index}: {source}")]
    CorpusIo {
        index: u64,
        #[source]
        source: io::Error,
    },

    #[error("I/O error: {0}")]
    Stream(#[from] io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl LilError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        LilError::Io {
            path: path.into(),
            source,
        }
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A pivot fell below the singularity threshold. `which` names the
    /// matrix whose invertibility hypothesis failed.
    #[error("singular matrix {which} (pivot {pivot:e} below threshold {threshold:e})")]
    SingularMatrix {
        which: String,
        pivot: f64,
        threshold: f64,
    },

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: String, iterations: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{what} requires {requested} which exceeds the cap of {cap}")]
    DimensionOverflow {
        what: String,
        requested: u128,
        cap: u128,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("instance has no right-hand side")]
    MissingRightHandSide,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("instance generation failed: {0}")]
    GenerationFailure(String),

    #[error("column {index}: {source}")]
    Column {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn singular(which: impl Into<String>, pivot: f64, threshold: f64) -> Self {
        Error::SingularMatrix {
            which: which.into(),
            pivot,
            threshold,
        }
    }

    pub(crate) fn overflow(what: impl Into<String>, requested: u128, cap: u128) -> Self {
        Error::DimensionOverflow {
            what: what.into(),
            requested,
            cap,
        }
    }

    /// Renames the matrix in a `SingularMatrix` error; other errors pass through.
    pub fn renamed(self, name: &str) -> Self {
        match self {
            Error::SingularMatrix {
                pivot, threshold, ..
            } => Error::SingularMatrix {
                which: name.to_string(),
                pivot,
                threshold,
            },
            other => other,
        }
    }

    /// The innermost error, unwrapping column context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Column { source, .. } => source.root(),
            other => other,
        }
    }
}

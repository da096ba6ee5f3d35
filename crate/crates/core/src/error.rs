use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("simplex {simplex} references missing {missing}")]
    DanglingSimplex { simplex: String, missing: String },

    #[error("simplex {0} repeats a vertex")]
    DegenerateSimplex(String),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigensolver failed: {0}")]
    EigensolverFailure(String),

    #[error(
        "eigenvector {index} is neither gradient nor curl \
         (divergence {divergence:.3e}, curl {curl:.3e})"
    )]
    AmbiguousEigenvector {
        index: usize,
        divergence: f64,
        curl: f64,
    },

    #[error("label counts (gradient {gradient}, curl {curl}) disagree with incidence ranks ({rank_b1}, {rank_b2})")]
    ClassificationMismatch {
        gradient: usize,
        curl: usize,
        rank_b1: usize,
        rank_b2: usize,
    },

    #[error("integer overflow in exact rank computation")]
    RankOverflow,

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("invalid design spec: {0}")]
    InvalidSpec(String),

    #[error("no training data")]
    EmptyData,

    #[error("reference signal has zero norm")]
    ZeroReference,

    #[error("linear solver failed: {0}")]
    SolverFailure(String),

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("edge ({0}, {1}) is not in the complex")]
    UnknownEdge(String, String),

    #[error("edge ({0}, {1}) appears more than once")]
    DuplicateEntry(String, String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EigensolverFailure(_)
                | Error::AmbiguousEigenvector { .. }
                | Error::ClassificationMismatch { .. }
                | Error::RankOverflow
                | Error::SolverFailure(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("relation has a cycle through element {0}")]
    Cycle(usize),

    #[error("circuit has a cycle through wire `{0}`")]
    CircuitCycle(String),

    #[error("undefined wire `{0}`")]
    UndefinedWire(String),

    #[error("index {index} out of range for size {size}")]
    Index { index: usize, size: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("state table exceeded the ceiling of {limit} stored states")]
    ResourceBound { limit: usize },

    #[error("size {size} exceeds the exhaustive bound {bound}")]
    Bound { size: usize, bound: usize },

    #[error("position is terminal")]
    Terminal,

    #[error("extra cell {0} overlaps a filled cell")]
    Overlap(usize),

    #[error("instance has no symmetry witness")]
    MissingWitness,

    #[error("position has no empty cell")]
    NoEmptyCell,

    #[error("internal consistency violated: {0}")]
    Inconsistent(String),

    #[error("{check}: {source}")]
    InCheck { check: &'static str, source: Box<Error> },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    /// The underlying error with any check context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::InCheck { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_resource_bound(&self) -> bool {
        matches!(self.root(), Error::ResourceBound { .. } | Error::Bound { .. })
    }
}

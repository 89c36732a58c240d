use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("boundary not contained in cycles")]
    BoundaryNotInCycles,

    #[error("vector is not in the span of the given basis")]
    NotInSpan,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{what} of size {size} exceeds the cap of {cap}{hint}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("d'_GH requires equal cardinality (got {0} and {1})")]
    CardinalityMismatch(usize, usize),

    #[error("vertex {0} is not a vertex of the complex")]
    NotAVertex(usize),

    #[error("subset {0:#b} is not a face of the complex")]
    NotAFace(u32),

    #[error("vertex {0} already belongs to the index subset")]
    VertexInSubset(usize),

    #[error("complexes live on different vertex sets ({0} and {1} vertices)")]
    VertexSetMismatch(usize, usize),

    #[error("invalid tower: {0}")]
    InvalidTower(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

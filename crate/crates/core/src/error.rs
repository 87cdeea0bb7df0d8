use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("vertex must be a nonempty subset of {{0..={n}}}")]
    EmptyVertex { n: usize },

    #[error("generator is not homogeneous: {0}")]
    NonHomogeneous(String),

    #[error("incompatible charts: {0}")]
    IncompatibleCharts(String),

    #[error("projective dimension {n} exceeds the configured bound {bound}")]
    QuiverTooLarge { n: usize, bound: usize },

    #[error("malformed representation: {0}")]
    MalformedRep(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("size bound exceeded: {0}")]
    SizeBound(String),

    #[error("matrix is not invertible over the Laurent ring: {0}")]
    NotInvertible(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

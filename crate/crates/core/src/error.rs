use thiserror::Error;

pub type Result<T> = std::result::Result<T, GmrError>;

#[derive(Debug, Error)]
pub enum GmrError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("covariance of component {index} is not positive definite")]
    NotPositiveDefinite { index: usize },

    #[error("covariance is not square: {rows}x{cols}")]
    NonSquareCovariance { rows: usize, cols: usize },

    #[error("weight {index} is negative or not finite ({value})")]
    InvalidWeight { index: usize, value: f64 },

    #[error("weights sum to {sum}, which deviates from 1 by more than the tolerance")]
    WeightSum { sum: f64 },

    #[error("mixture has no components")]
    EmptyMixture,

    #[error("weight count {weights} does not match component count {components}")]
    LengthMismatch { weights: usize, components: usize },

    #[error("component index {index} out of range for mixture of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("invalid index pair ({i}, {j})")]
    InvalidPair { i: usize, j: usize },

    #[error("invalid sub-mixture selection: {0}")]
    InvalidSelection(String),

    #[error("invalid reduction target {target} for mixture of size {size}")]
    InvalidTarget { target: usize, size: usize },

    #[error("pruning would remove every component")]
    PruneEmptiesMixture,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{0} is not supported for this operation")]
    UnsupportedMeasure(&'static str),

    #[error("quadrature did not converge after {subdivisions} subdivisions (error estimate {error:e})")]
    QuadratureNonConvergence { subdivisions: usize, error: f64 },

    #[error("malformed mixture file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

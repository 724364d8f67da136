use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("noise density infimum over |x| <= {radius} at time {k} is {value}, must be positive")]
    NonpositiveDensity { k: u64, radius: f64, value: f64 },

    #[error("weighted metric is not positive definite (smallest eigenvalue {min_eigenvalue})")]
    SingularMetric { min_eigenvalue: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry})")]
    NotSymmetric { asymmetry: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite input: {0}")]
    NonFiniteInput(&'static str),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

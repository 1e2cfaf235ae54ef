use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    CapExceeded,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    Empty,

    #[error("non-finite value {value} at position {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("negative eigenvalue {value} at position {index} (spectrum must be PSD)")]
    NegativeEntry { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix is not positive semi-definite: smallest eigenvalue {min_eigenvalue} (largest {max_eigenvalue})")]
    NotPsd {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("duplicate index {index} in subset")]
    DuplicateIndex { index: usize },

    #[error("tail pivot lambda_{} is zero; rho is undefined", .k + 1)]
    DegenerateTail { k: usize },

    #[error("e_{k} vanishes: spectrum has fewer than {k} positive entries")]
    RankDeficient { k: usize },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NotConverged { sweeps: usize },

    #[error("selected block is numerically singular (condition estimate {condition:e})")]
    SingularPivot { condition: f64 },

    #[error(
        "volume distribution for k = {k} is degenerate (all principal minors vanish, rank {rank})"
    )]
    DegenerateDistribution { k: usize, rank: usize },

    #[error("{count} subsets exceed the enumeration cap of {cap}; use the sampler instead")]
    CapExceeded { count: u128, cap: u128 },

    #[error("majorant does not dominate the spectrum at index {index} ({value} > {bound})")]
    BoundInapplicable {
        index: usize,
        value: f64,
        bound: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::RankDeficient { .. }
            | Error::NotConverged { .. }
            | Error::SingularPivot { .. }
            | Error::DegenerateDistribution { .. }
            | Error::DegenerateTail { .. } => ErrorKind::Numerical,
            Error::CapExceeded { .. } => ErrorKind::CapExceeded,
            _ => ErrorKind::Validation,
        }
    }
}

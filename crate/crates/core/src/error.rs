use thiserror::Error;

/// Errors raised by mesh construction, discretization and the benchmark driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("lookup error: {0}")]
    Lookup(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("connectivity error: {0}")]
    Connectivity(String),
    #[error("nonphysical state in cell {cell} at {point:?}: {reason}")]
    State {
        cell: usize,
        point: [f64; 2],
        reason: String,
    },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Nonphysical state without a location yet; callers attach one with [`Error::at`].
    pub fn nonphysical(reason: impl Into<String>) -> Self {
        Error::State {
            cell: usize::MAX,
            point: [f64::NAN; 2],
            reason: reason.into(),
        }
    }

    /// Attaches a cell and point to a state error; other errors pass through.
    pub fn at(self, cell: usize, point: [f64; 2]) -> Self {
        match self {
            Error::State { reason, .. } => Error::State { cell, point, reason },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

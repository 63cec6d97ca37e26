use thiserror::Error;

/// Errors produced by the toolkit.
///
/// `InvariantViolation` is reserved for checks that can only fail when an
/// implementation is wrong (a closed form disagreeing with its definition, a
/// proven inequality failing). Callers should treat it as a bug report rather
/// than as bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("argument out of supported range: {0}")]
    OutOfRange(String),

    #[error("quadrature did not converge: {0}")]
    Convergence(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(format!($($arg)*))
    };
}

macro_rules! violation {
    ($($arg:tt)*) => {
        $crate::error::Error::InvariantViolation(format!($($arg)*))
    };
}

pub(crate) use invalid;
pub(crate) use violation;

impl Error {
    /// Process exit status used by the command-line tool: 1 for a failed
    /// internal check, 2 for rejected input, 3 for resource limits and
    /// runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvariantViolation(_) => 1,
            Error::InvalidArgument(_) | Error::Config(_) => 2,
            Error::OutOfRange(_) | Error::Convergence(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_) => 3,
        }
    }
}

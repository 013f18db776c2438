use thiserror::Error;

/// Coarse classification used for process exit codes and the C ABI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Domain,
    Numerical,
    Io,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Usage => 1,
            ErrorClass::Domain => 2,
            ErrorClass::Numerical => 3,
            ErrorClass::Io => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorClass::Usage => "usage",
            ErrorClass::Domain => "domain",
            ErrorClass::Numerical => "numerical",
            ErrorClass::Io => "io",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("value {0} does not fit in a finite f64")]
    Range(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("{beta} does not dominate {alpha}")]
    NotDominated { beta: String, alpha: String },
    #[error("kernel is singular: |1 - <z,w>| = {gap:e}")]
    Singular { gap: f64 },
    #[error("kernel series diverges: |z||w| = {0}")]
    Divergent(f64),
    #[error("point is not inside the open unit ball: |z| = {0}")]
    OutsideBall(f64),
    #[error("point is not on the unit sphere: |z| = {0}")]
    OffSphere(f64),
    #[error("non-finite function value at {point}")]
    NonFinite { point: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse(_) | Error::Schema(_) | Error::Usage(_) => ErrorClass::Usage,
            Error::ZeroDenominator
            | Error::DivisionByZero
            | Error::DimensionMismatch { .. }
            | Error::ZeroDimension
            | Error::NotDominated { .. }
            | Error::OutsideBall(_)
            | Error::OffSphere(_)
            | Error::Precondition(_) => ErrorClass::Domain,
            Error::Range(_) | Error::Verification(_) | Error::Singular { .. } | Error::Divergent(_) | Error::NonFinite { .. } => {
                ErrorClass::Numerical
            }
            Error::Io(_) => ErrorClass::Io,
        }
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

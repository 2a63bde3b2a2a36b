use thiserror::Error;

/// Errors raised by the library and the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("imaginary part of tau must be positive, got {0}")]
    NotInUpperHalfPlane(f64),
    #[error("invalid Eisenstein weight {0}: expected an even integer >= 2")]
    InvalidWeight(i64),
    #[error("form is not homogeneous: weights {0:?} present")]
    NotHomogeneous(Vec<u32>),
    #[error("form is not modular (contains E2): {0}")]
    NotModular(String),
    #[error("unsupported weight {weight} for {what}")]
    UnsupportedWeight { what: &'static str, weight: u32 },
    #[error("{0}")]
    Precondition(String),
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("invalid expression at {path}: {message}")]
    Typing { path: String, message: String },
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

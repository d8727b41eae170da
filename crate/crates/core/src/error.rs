//! Crate-wide error type.
//!
//! Errors are split by how a caller should react: `Budget` means the request
//! was well-formed but the exact enumeration it implies is larger than the
//! caller allowed, while the remaining variants are malformed input of one
//! kind or another.

use std::fmt;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An exact enumeration would exceed the caller-supplied budget.
    /// Carries the number of points requested and the allowed maximum.
    Budget { required: u128, allowed: u128 },
    /// A modulus that is not an odd prime.
    InvalidModulus(u64),
    /// Mismatched dimensions in a linear-algebra operation.
    Dimension(String),
    /// A parameter outside its documented range (probabilities, sizes, ...).
    InvalidParameter(String),
    /// Malformed textual input (set files, model strings, config files).
    Parse(String),
    /// An operation that only makes sense on a different domain kind,
    /// e.g. a Fourier transform requested for an interval domain.
    DomainKind(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Budget { required, allowed } => write!(
                f,
                "enumeration of {required} points exceeds the budget of {allowed}"
            ),
            Error::InvalidModulus(p) => write!(f, "modulus {p} is not an odd prime"),
            Error::Dimension(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::DomainKind(msg) => write!(f, "unsupported domain: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

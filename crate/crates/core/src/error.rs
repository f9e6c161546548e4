//! Error type shared by every operation.

use thiserror::Error;

use crate::label::Label;

/// Failures raised by the library. Check failures are reported in result
/// values, not as errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size guard exceeded: {what} needs {size} elements, bound is {bound}")]
    SizeGuard { what: String, size: u128, bound: usize },
    #[error("hom-set too large: {what} has {size} elements, bound is {bound}")]
    HomSetTooLarge { what: String, size: u128, bound: usize },
    #[error("functor mismatch: {0}")]
    FunctorMismatch(String),
    #[error("invalid definition: {0}")]
    Invalid(String),
    #[error("unknown label {0}")]
    UnknownLabel(Label),
    #[error("algebra is not preinitial: {witness} is unreachable")]
    NotPreinitial { witness: Label },
    #[error("fixed-point iteration did not stabilize within {0} steps")]
    NotStabilized(usize),
    #[error("{0}")]
    Unsupported(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

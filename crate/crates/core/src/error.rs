use thiserror::Error;

use crate::scalars::ScalarError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator id {0} does not belong to this presentation")]
    ForeignGenerator(u16),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("generalized exponent unsupported: pairing {0} is not a constant integer")]
    GeneralizedExponent(String),
    #[error("expansion budget of {0} terms exhausted")]
    Budget(usize),
    #[error("parse error at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },
    #[error("exponential in a disallowed position: {0}")]
    ExponentPosition(String),
    #[error("not a screening field: {0}")]
    NotScreening(String),
    #[error("presentation is not free-field: {0}")]
    NotFree(String),
    #[error("truncation {given} too small; pole order {needed} requested")]
    TruncationTooSmall { needed: usize, given: usize },
    #[error("{0} out of range")]
    OutOfRange(String),
    #[error("inconsistent grading: {0}")]
    InconsistentGrading(String),
    #[error("missing source table for {0}")]
    MissingTable(String),
    #[error("critical level k = {0}")]
    CriticalLevel(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

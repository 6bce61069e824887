use thiserror::Error;

use crate::Rational;

/// Errors produced by the library.
///
/// The variants are grouped so that front ends can map them onto exit
/// codes: [`Error::Parse`] and [`Error::Invalid`] are input errors,
/// everything else is a domain error unless it is a verification failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid complex: {0}")]
    Invalid(String),

    #[error("t = {0} lies outside [0, 2]")]
    OutOfDomain(Rational),

    #[error("not a knot complex: free rank {free_rank} (expected 1)")]
    NotKnotComplex { free_rank: usize },

    #[error("not a knot complex: hat homology has rank {rank} (expected 1)")]
    HatRank { rank: usize },

    #[error("piecewise-linear fit failed at t = {at}: computed {computed}, fitted {fitted}; increase Q")]
    IncreaseQ {
        at: Box<Rational>,
        computed: Box<Rational>,
        fitted: Box<Rational>,
    },

    #[error("{0}")]
    Domain(String),

    #[error("grading undefined: {0}")]
    Undefined(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

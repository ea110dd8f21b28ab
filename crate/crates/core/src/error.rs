use thiserror::Error;

use crate::seqdsl::DslError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("binomial upper index must be nonnegative, got {0}")]
    NegativeUpperIndex(i64),

    #[error("multinomial part {0} is negative")]
    NegativePart(i64),

    #[error("multinomial parts sum to {sum}, expected {n}")]
    PartsMismatch { n: i64, sum: i64 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prime must be at least {min}, got {p}")]
    PrimeTooSmall { p: u64, min: u64 },

    #[error("tuple {0} is not a member of U({1})")]
    NotInU(String, i64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("value overflow: {0}")]
    Overflow(String),

    #[error(transparent)]
    Dsl(#[from] DslError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

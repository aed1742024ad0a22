use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid discriminant {0}: must be squarefree and not 0 or 1")]
    InvalidDiscriminant(i64),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("component mismatch: {0}")]
    ComponentMismatch(String),
    #[error("class out of range: {0}")]
    ClassOutOfRange(String),
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("tail rule gives no usable bound (exponent 1)")]
    TailNotBoundable,
    #[error("sieve is large at {0}: the local set is everything")]
    LargeSieve(String),
    #[error("no solution with search height at most {0}")]
    NotFoundWithinBound(u64),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("no witness found: {0}")]
    NoWitness(String),
    #[error("region too small: {0}")]
    RegionTooSmall(String),
    #[error("value does not fit the scalar type: {0}")]
    Overflow(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

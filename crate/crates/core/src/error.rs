use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A membership-facing operation received a matrix outside SL2(Z).
    #[error("matrix is not in SL2(Z): determinant is {det}")]
    NotSl2 { det: BigInt },

    #[error("parse error: {0}")]
    Parse(String),

    /// An invariant of the reduction was violated. Never expected in practice.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

use thiserror::Error;

/// Errors raised by the algebra kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero has no factorization")]
    ZeroFactorization,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("not a unit in truncation")]
    NotAUnitInTruncation,
    #[error("c_0 must be 1")]
    ConstantTermNotOne,
    #[error("element uses z but the derivation has no image for z")]
    MissingZImage,
    #[error("not in L_A: {0}")]
    NotIntegralLogDerivative(String),
    #[error("precision exhausted")]
    PrecisionExhausted,
    #[error("element is not integral")]
    NonIntegral,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("precision policy violated: need {needed} digits, field carries {available}")]
    PrecisionPolicy { needed: u32, available: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Failures of the field, matrix and finite-group layer.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree {0} is not supported")]
    UnsupportedDegree(usize),
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("operands live over different fields")]
    ContextMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("enumeration exceeded the cap of {cap} elements (reached {partial})")]
    Capacity { cap: usize, partial: usize },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("set is not closed under multiplication")]
    NotAGroup,
    #[error("empty input: {0}")]
    Empty(String),
    #[error("parse error: {0}")]
    Parse(String),
}

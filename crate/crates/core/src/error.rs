use thiserror::Error;

/// Errors raised by the engine.
///
/// Validation variants describe malformed input; the remaining variants are
/// preconditions of a particular operation that the input does not meet.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero vector has no primitive representative")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is singular")]
    Singular,
    #[error("enumeration requires bounded polytope")]
    Unbounded,
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("m not unique; supply simplicial cone")]
    NonSimplicial,
    #[error("operation requires a complete fan")]
    NotComplete,
    #[error("vector {0:?} is not in the support of the fan")]
    NotInSupport(Vec<i64>),
    #[error("ray is not an extremal ray of the Mori cone")]
    NotExtremal,
    #[error("contraction does not produce a fan: {0}")]
    BadContraction(String),
    #[error("invalid surface model: {0}")]
    InvalidModel(String),
    #[error("Castelnuovo requires a −1-curve")]
    NotMinusOneCurve,
    #[error("curve list not certified as generating")]
    NotCertified,
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("invalid resolution data: {0}")]
    InvalidResolution(String),
    #[error("divisor misses the resolution locus")]
    MissesResolution,
    #[error("not contractible input: self-intersection must be negative")]
    NotContractible,
    #[error("C does not dominate the negative cone")]
    NotDominating,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("uncontractible with available data: {0}")]
    Uncontractible(String),
    #[error("step budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

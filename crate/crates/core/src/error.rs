use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    InvalidDegree(u32),
    #[error("field order {p}^{m} does not fit in 64 bits")]
    OrderOverflow { p: u64, m: u32 },
    #[error("no irreducible polynomial of degree {m} over F_{p} found within the search budget")]
    NoIrreducibleFound { p: u64, m: u32 },
    #[error("modulus is not a monic irreducible polynomial")]
    ReducibleModulus,
    #[error("division by zero")]
    DivideByZero,
    #[error("could not factor {0} within the trial-division budget")]
    FactorizationBudgetExceeded(u64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("residue {0} out of range")]
    ResidueOutOfRange(u64),
    #[error("powers of the chosen element do not form a basis of the extension")]
    NotABasis,
}

/// Errors raised by the polynomial, coding, channel, decoding and bound layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("polynomial division by zero")]
    DivideByZero,
    #[error("duplicate interpolation point at index {0}")]
    DuplicatePoint(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("degenerate minimization problem: {0}")]
    DegenerateProblem(&'static str),
    #[error("computation budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("error budget e0={e0}, e={e} invalid for block length {n}")]
    BudgetExceedsLength { e0: usize, e: usize, n: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

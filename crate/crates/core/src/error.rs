use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("polynomial degree {0} exceeds the supported maximum of {max}", max = crate::gf2::MAX_POLY_DEGREE)]
    DegreeTooLarge(usize),

    #[error("polynomial {poly} is not primitive of degree {m}")]
    NotPrimitive { poly: String, m: usize },

    #[error("unsupported extension degree m = {0} (supported: 2..=8)")]
    UnsupportedDegree(usize),

    #[error("designed distance {delta} out of range 2..={n}")]
    DesignedDistance { delta: usize, n: usize },

    #[error("generator polynomial does not divide x^{n} - 1")]
    NotDividing { n: usize },

    #[error("code is not dual-containing (H H^T != 0)")]
    NotDualContaining,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("code dimension {dim} exceeds the enumeration budget 2^{budget}")]
    EnumerationBudget { dim: usize, budget: usize },

    #[error("inconsistent weight enumerator: {0}")]
    InconsistentEnumerator(String),

    #[error("circuit parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid automorphism {perm} for block {block}: {reason}")]
    InvalidPermutation {
        perm: String,
        block: usize,
        reason: String,
    },

    #[error("invalid protocol: {0}")]
    Protocol(String),

    #[error("memory budget exceeded in case {case}: {entries} table entries > {budget}")]
    MemoryBudget {
        case: String,
        entries: u128,
        budget: u128,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

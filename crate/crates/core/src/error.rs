use thiserror::Error;

/// Errors raised by the algebra, Fock-space, Grassmannian and verification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("variable index {index} out of range 1..={vars}")]
    VariableOutOfRange { index: usize, vars: usize },

    #[error("evaluation hit a pole")]
    Pole,

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("{needed} variables required, got {got}")]
    TooFewVariables { needed: usize, got: usize },

    #[error("coefficient of order {order} is outside the exact range [{lo}, {hi}]")]
    InexactOrder { order: i64, lo: String, hi: String },

    #[error("empty valid range after truncation")]
    EmptyValidRange,

    #[error("window overflow: {0}")]
    WindowOverflow(String),

    #[error("matrix is not invertible")]
    NotInvertible,

    #[error("matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("{count} columns violate the chain condition (allowed {allowed}): {columns:?}")]
    TooManyViolations {
        count: usize,
        allowed: usize,
        columns: Vec<usize>,
    },

    #[error("column {column} maps onto an earlier column {earlier}")]
    ChainExclusion { column: usize, earlier: usize },

    #[error("companion rho_{index} vanishes; the codimension is not minimal")]
    DegenerateCompanion { index: usize },

    #[error("charge mismatch for {what}: expected {expected}, got {got}")]
    ChargeMismatch {
        what: String,
        expected: i64,
        got: i64,
    },

    #[error("tau is the zero polynomial")]
    ZeroTau,

    #[error("no pole-free sample point found after {attempts} attempts")]
    PoleBudgetExhausted { attempts: usize },

    #[error("insufficient jet precision for order {order}")]
    JetPrecision { order: i64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("enumeration needs {needed} items but the budget is {cap}")]
    BudgetExceeded { needed: u128, cap: u64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("promise is empty")]
    EmptyPromise,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("inequality violated: {0}")]
    InequalityViolation(String),
    #[error("function is not constant on type {0}")]
    NotTypewiseConstant(String),
    #[error("function takes a single value on the whole promise; distance is undefined")]
    OneSided,
    #[error("adversary relation is empty")]
    EmptyRelation,
    #[error("adversary input {0} has no related partner")]
    IsolatedVertex(String),
    #[error("invalid sensitive blocks: {0}")]
    InvalidBlocks(String),
    #[error("no certificate available while |r| = {r_size} <= k: {detail}")]
    SelectionFailed { r_size: usize, detail: String },
    #[error("padding cap (n - 10k^2) / 4k = {cap} is not positive")]
    CapNonpositive { cap: i64 },
    #[error("no common filler multiset exists for any alpha >= 1: {0}")]
    PaddingInfeasible(String),
    #[error("conflicting certificates between representatives {0} and {1}")]
    ConflictDetected(String, String),
    #[error("true type {truth} lies outside the ball of radius {radius} around {estimate}")]
    EstimateMiss { truth: String, estimate: String, radius: u32 },
    #[error("symbol search exhausted its sample cap of {0}")]
    NotFound(usize),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InequalityViolation(_) | Error::ConflictDetected(..) => 2,
            Error::BudgetExceeded { .. } => 3,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

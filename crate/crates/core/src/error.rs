use thiserror::Error;

/// Errors raised by state validation, quantifiers and channel handling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("ragged matrix: row {row} has {len} entries, expected {dim}")]
    Ragged { row: usize, len: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is too small (need d >= 2)")]
    DimensionTooSmall(usize),

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is not one (got {re} + {im}i)")]
    TraceNotOne { re: f64, im: f64 },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("Jacobi eigensolver did not converge in {sweeps} sweeps (off-diagonal norm {off:e})")]
    ConvergenceFailure { sweeps: usize, off: f64 },

    #[error("alpha = {0} is outside the supported range")]
    AlphaOutOfRange(f64),

    #[error("all diagonal moments vanish; no optimal incoherent state")]
    DegenerateState,

    #[error("simplex search did not converge within {iterations} iterations (gradient norm {grad_norm:e})")]
    BudgetExhausted { iterations: usize, grad_norm: f64 },

    #[error("Kraus operators are not complete (residual {0:e})")]
    IncompleteChannel(f64),

    #[error("channel is not incoherent")]
    NotIncoherent,

    #[error("qubit parameters violate positivity: |b|^2 = {b_sq} > a(1-a) = {bound}")]
    PositivityViolation { b_sq: f64, bound: f64 },

    #[error("invalid probability weights: {0}")]
    InvalidWeights(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("empty channel: at least one Kraus operator is required")]
    EmptyChannel,
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the steady-state toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The inputs leave the asymptotic regime in which a rate formula holds.
    #[error("regime error: {0}")]
    Regime(String),

    /// No unique steady state exists (e.g. every coupling rate vanishes).
    #[error("degenerate system: {0}")]
    Degenerate(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    /// Conductivity-table parse failure. `row` is 1-based and counts data rows.
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("invalid table: {0}")]
    Table(String),

    #[error("io error: {0}")]
    Io(String),

    /// The steady-state solver did not reach its tolerance.
    #[error("steady state not converged after t = {time:.3e}: residual {residual:.3e}")]
    NotConverged {
        time: f64,
        residual: f64,
        history: Vec<f64>,
    },

    /// Population statistics cannot be formed (e.g. every level is below the floor).
    #[error("statistics error: {0}")]
    Statistics(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

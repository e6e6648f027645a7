use thiserror::Error;

/// Errors produced by the solver toolkit.
///
/// Aircraft are named by their 1-based ordinal in every message.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlpError {
    #[error("format error at token {token} (line {line}): {message}")]
    Format {
        token: usize,
        line: usize,
        message: String,
    },

    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The sequence cannot be timed inside the windows.
    #[error("infeasible sequence: aircraft {aircraft} (position {position}) would land at {time}, before its earliest time {earliest}")]
    InfeasibleSequence {
        aircraft: usize,
        position: usize,
        time: i64,
        earliest: i64,
    },

    #[error("infeasible runway assignment: no runway can land aircraft {aircraft} by its latest time {latest}")]
    InfeasibleAssignment { aircraft: usize, latest: i64 },

    #[error("instance generation failed after {attempts} attempts")]
    Generation { attempts: usize },

    #[error("oracle refused: {0}")]
    OracleRefused(String),

    #[error("no feasible sequence found: {0}")]
    NoFeasibleSequence(String),

    /// An invariant of the reduction loop was violated. Never expected on valid input.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, AlpError>;

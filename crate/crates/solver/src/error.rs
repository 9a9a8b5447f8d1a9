#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    /// A warm start that does not cover the binaries, is not 0/1, or is
    /// infeasible for the problem. Never dropped silently.
    #[error("warm start rejected: {0}")]
    WarmStart(String),
}

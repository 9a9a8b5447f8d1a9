use gridplan_core::CoreError;
use gridplan_solver::{SolveStatus, SolverError};

#[derive(Debug, thiserror::Error)]
pub enum OpfError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error(transparent)]
    Solver(#[from] SolverError),

    #[error("model error: {0}")]
    Model(String),

    #[error("solve failed: {0}")]
    Solve(String),

    #[error("solver finished without a usable solution: {0:?}")]
    Unsolved(SolveStatus),
}

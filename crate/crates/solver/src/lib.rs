//! A self-contained sparse linear and mixed-integer linear programming
//! solver: bounded-variable revised simplex (composite phase 1, product-form
//! basis updates, Bland anti-cycling fallback) underneath a deterministic
//! best-bound branch-and-bound with warm-start incumbents and relative-gap
//! termination.
//!
//! Built for planning models whose rows mix magnitudes around 1 with big-M
//! embedding rows: problems are geometrically equilibrated before solving.

pub mod branch;
pub mod error;
pub mod lu;
pub mod problem;
pub mod simplex;
pub mod solution;

pub use branch::{fix_binaries_and_solve, solve_milp};
pub use error::SolverError;
pub use problem::{MilpProblem, RowId, Sense, VarId, VarKind, Variable};
pub use simplex::{solve_lp, BasisSnapshot, EngineSolve, LpEngine};
pub use solution::{MilpSolution, SolveOptions, SolveStatus};

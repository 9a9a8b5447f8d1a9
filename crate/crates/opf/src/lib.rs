//! Model builders mapping grid data onto solvable programs: the single-node
//! operational power flow (a transport model: nodal balance and capacity
//! limits, no voltage angles) and the exact multistage expansion-planning
//! MILP over a scenario tree.

pub mod context;
pub mod enumerate;
pub mod error;
pub mod opf;
pub mod step;

pub use context::{NodeOperatingContext, PerturbationDraw};
pub use enumerate::enumerate_consistent_plans;
pub use error::OpfError;
pub use opf::{build_opf, solve_opf, OpfLayout, OpfResult};
pub use step::{build_exact_step, evaluate_plan, solve_exact_step, ExactStepModel, StepInstance, StepSolution};

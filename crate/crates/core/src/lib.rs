//! Shared domain types for transmission expansion studies: the physical
//! network, the scenario tree describing uncertain system development, the
//! investment plans linking the two, and the file formats they live in.
//!
//! Everything here is immutable after construction and safe to share
//! read-only across parallel workers.

pub mod error;
pub mod io;
pub mod network;
pub mod plan;
pub mod solution;
pub mod tree;

pub use error::CoreError;
pub use io::{load_network, load_plan, load_tree, save_network, save_plan, save_tree};
pub use network::{BusId, Generator, GeneratorKind, Line, LineId, Load, Network};
pub use plan::{validate_plan, InvestmentPlan, PlanReport, PlanViolation};
pub use solution::{NodeOperations, ReliabilityStatus};
pub use tree::{discount_factor, ScenarioTree, TreeNode, PROBABILITY_TOL};

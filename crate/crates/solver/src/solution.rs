use std::time::Duration;

/// Terminal state of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Proven optimal (LP: optimal basis; MILP: tree exhausted).
    Optimal,
    Infeasible,
    Unbounded,
    /// Stopped because the relative MIP gap dropped below the tolerance
    /// with open nodes remaining.
    GapLimit,
    /// Stopped on the time limit; the incumbent, if any, is reported.
    TimeLimit,
    /// The solver lost numerical consistency and retries did not recover.
    NumericalFailure,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::GapLimit | SolveStatus::TimeLimit)
    }
}

/// Options for `solve_milp`.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Relative MIP gap at which the search stops.
    pub rel_gap: f64,
    pub time_limit: Option<Duration>,
    /// Integer-feasible values for every binary variable, used as the
    /// initial incumbent after completion by an LP solve.
    pub warm_start: Option<Vec<(usize, bool)>>,
    /// Integer feasibility tolerance.
    pub int_tol: f64,
    /// Record the (bound, incumbent) sequence per processed node.
    pub record_trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rel_gap: 1e-3,
            time_limit: Some(Duration::from_secs(1000)),
            warm_start: None,
            int_tol: 1e-6,
            record_trace: false,
        }
    }
}

/// Result of an LP or MILP solve.
#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub status: SolveStatus,
    /// One value per problem variable; meaningful when `status.has_solution()`.
    pub values: Vec<f64>,
    pub objective: f64,
    /// Best proven lower bound on the optimum.
    pub best_bound: f64,
    /// |objective - best_bound| / max(|objective|, eps).
    pub rel_gap: f64,
    /// Branch-and-bound nodes processed (0 for plain LP solves).
    pub node_count: u64,
    pub wall_time: Duration,
    /// LP duality check value: dual objective of the final basis.
    pub dual_objective: f64,
    pub simplex_iterations: u64,
    /// Per-node (best bound, incumbent objective) when tracing was on.
    pub trace: Vec<(f64, f64)>,
}

impl MilpSolution {
    pub fn value(&self, var: usize) -> f64 {
        self.values[var]
    }
}

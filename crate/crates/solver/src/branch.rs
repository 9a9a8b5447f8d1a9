//! Deterministic branch-and-bound: best-bound node selection (FIFO among
//! ties), most-fractional branching with lowest-index tie-break, warm-start
//! incumbents, and relative-gap termination. Node LPs start from the parent
//! basis, so re-solves after a bound fix are usually a handful of pivots.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Arc;
use std::time::Instant;

use crate::error::SolverError;
use crate::problem::MilpProblem;
use crate::simplex::{lp_outcome_to_solution, BasisSnapshot, CoreLp};
use crate::solution::{MilpSolution, SolveOptions, SolveStatus};

struct Node {
    /// Bound inherited from the parent LP; refined when this node solves.
    bound: f64,
    seq: u64,
    fixes: Vec<(usize, f64, f64)>,
    basis: Option<Arc<BasisSnapshot>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.seq == other.seq
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(self.seq.cmp(&other.seq))
    }
}

fn rel_gap(incumbent: f64, bound: f64) -> f64 {
    ((incumbent - bound) / incumbent.abs().max(1e-10)).max(0.0)
}

/// Solves a MILP by branch-and-bound. Identical problems and options give
/// identical solutions, node counts and traces.
pub fn solve_milp(problem: &MilpProblem, options: &SolveOptions) -> Result<MilpSolution, SolverError> {
    let start = Instant::now();
    let core = CoreLp::from_problem(problem)?;
    let deadline = options.time_limit.map(|d| start + d);
    let binaries = problem.binary_vars();

    if binaries.is_empty() {
        let outcome = core.solve(&[], None, deadline);
        return Ok(lp_outcome_to_solution(outcome, start));
    }

    let mut node_count: u64 = 0;
    let mut trace: Vec<(f64, f64)> = Vec::new();
    let mut incumbent: Option<(f64, Vec<f64>)> = None;

    // A warm start must cover every binary with a 0/1 value and complete
    // into a feasible LP; otherwise it is rejected loudly.
    if let Some(ws) = &options.warm_start {
        let mut fixes: Vec<(usize, f64, f64)> = Vec::with_capacity(binaries.len());
        for &b in &binaries {
            let Some(&(_, value)) = ws.iter().find(|(v, _)| *v == b) else {
                return Err(SolverError::WarmStart(format!(
                    "binary variable {} ({}) has no warm-start value",
                    b, problem.variables[b].name
                )));
            };
            let v = if value { 1.0 } else { 0.0 };
            fixes.push((b, v, v));
        }
        let outcome = core.solve(&fixes, None, deadline);
        if outcome.status != SolveStatus::Optimal {
            return Err(SolverError::WarmStart(format!(
                "fixing the binaries to the warm start leaves an {} LP",
                match outcome.status {
                    SolveStatus::Infeasible => "infeasible",
                    SolveStatus::Unbounded => "unbounded",
                    _ => "unsolved",
                }
            )));
        }
        incumbent = Some((outcome.objective, snap_binaries(outcome.x, &binaries)));
    }

    // Root relaxation.
    let root = core.solve(&[], None, deadline);
    node_count += 1;
    match root.status {
        SolveStatus::Optimal => {}
        SolveStatus::Infeasible | SolveStatus::Unbounded => {
            return Ok(finish(
                root.status,
                incumbent,
                f64::NEG_INFINITY,
                node_count,
                trace,
                start,
            ));
        }
        other => {
            return Ok(finish(other, incumbent, f64::NEG_INFINITY, node_count, trace, start));
        }
    }
    let mut lower_bound = root.objective;
    trace.push((lower_bound, incumbent.as_ref().map_or(f64::INFINITY, |i| i.0)));

    let mut heap: BinaryHeap<Reverse<Node>> = BinaryHeap::new();
    let mut seq: u64 = 0;

    match fractional_binary(&root.x, &binaries, options.int_tol) {
        None => {
            let obj = root.objective;
            if incumbent.as_ref().map_or(true, |(best, _)| obj < *best) {
                incumbent = Some((obj, snap_binaries(root.x, &binaries)));
            }
        }
        Some(branch_var) => {
            // Round-and-fix heuristic: one LP with every binary at its
            // rounded relaxation value, to seed pruning early.
            let rounded: Vec<(usize, f64, f64)> = binaries
                .iter()
                .map(|&b| {
                    let v = if root.x[b] >= 0.5 { 1.0 } else { 0.0 };
                    (b, v, v)
                })
                .collect();
            let heur = core.solve(&rounded, root.basis.as_ref(), deadline);
            if heur.status == SolveStatus::Optimal
                && incumbent.as_ref().map_or(true, |(best, _)| heur.objective < *best)
            {
                incumbent = Some((heur.objective, snap_binaries(heur.x, &binaries)));
            }

            let basis = root.basis.map(Arc::new);
            for &(lo, hi) in &[(0.0, 0.0), (1.0, 1.0)] {
                heap.push(Reverse(Node {
                    bound: root.objective,
                    seq: { seq += 1; seq },
                    fixes: vec![(branch_var, lo, hi)],
                    basis: basis.clone(),
                }));
            }
        }
    }

    let mut status = SolveStatus::Optimal;
    while let Some(Reverse(node)) = heap.pop() {
        lower_bound = lower_bound.max(node.bound);
        let inc_obj = incumbent.as_ref().map_or(f64::INFINITY, |i| i.0);
        trace.push((lower_bound, inc_obj));

        if let Some((best, _)) = &incumbent {
            if node.bound >= *best - 1e-9 * (1.0 + best.abs()) {
                // Best-bound order: every open node is at least this bound.
                break;
            }
            if rel_gap(*best, node.bound) <= options.rel_gap {
                status = SolveStatus::GapLimit;
                break;
            }
        }
        if let Some(d) = deadline {
            if Instant::now() > d {
                status = SolveStatus::TimeLimit;
                break;
            }
        }

        let outcome = core.solve(&node.fixes, node.basis.as_deref(), deadline);
        node_count += 1;
        match outcome.status {
            SolveStatus::Infeasible => continue,
            SolveStatus::Optimal => {}
            SolveStatus::Unbounded => {
                // A bounded-below root cannot spawn unbounded children.
                status = SolveStatus::NumericalFailure;
                break;
            }
            other => {
                status = other;
                break;
            }
        }
        if let Some((best, _)) = &incumbent {
            if outcome.objective >= *best - 1e-9 * (1.0 + best.abs()) {
                continue;
            }
        }
        match fractional_binary(&outcome.x, &binaries, options.int_tol) {
            None => {
                incumbent = Some((outcome.objective, snap_binaries(outcome.x, &binaries)));
            }
            Some(branch_var) => {
                let basis = outcome.basis.map(Arc::new);
                for &(lo, hi) in &[(0.0, 0.0), (1.0, 1.0)] {
                    let mut fixes = node.fixes.clone();
                    fixes.push((branch_var, lo, hi));
                    heap.push(Reverse(Node {
                        bound: outcome.objective,
                        seq: { seq += 1; seq },
                        fixes,
                        basis: basis.clone(),
                    }));
                }
            }
        }
    }

    if status == SolveStatus::Optimal {
        // Tree exhausted (or cut off at the incumbent): the proof is complete.
        match &incumbent {
            Some((obj, _)) => lower_bound = *obj,
            None => {
                return Ok(finish(
                    SolveStatus::Infeasible,
                    None,
                    f64::NEG_INFINITY,
                    node_count,
                    trace,
                    start,
                ))
            }
        }
    }
    Ok(finish(status, incumbent, lower_bound, node_count, trace, start))
}

fn snap_binaries(mut x: Vec<f64>, binaries: &[usize]) -> Vec<f64> {
    for &b in binaries {
        x[b] = x[b].round();
    }
    x
}

/// Most-fractional binary (closest to one half), lowest index on ties.
fn fractional_binary(x: &[f64], binaries: &[usize], int_tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &b in binaries {
        let frac = (x[b] - x[b].round()).abs();
        if frac <= int_tol {
            continue;
        }
        let score = frac.min(1.0 - frac);
        match best {
            Some((_, s)) if score <= s => {}
            _ => best = Some((b, score)),
        }
    }
    best.map(|(b, _)| b)
}

fn finish(
    status: SolveStatus,
    incumbent: Option<(f64, Vec<f64>)>,
    bound: f64,
    node_count: u64,
    trace: Vec<(f64, f64)>,
    start: Instant,
) -> MilpSolution {
    let (objective, values) = match incumbent {
        Some((obj, x)) => (obj, x),
        None => (f64::INFINITY, Vec::new()),
    };
    let status = if !values.is_empty() || matches!(status, SolveStatus::Infeasible | SolveStatus::Unbounded) {
        status
    } else {
        // Stopped early without any incumbent.
        status
    };
    MilpSolution {
        status,
        rel_gap: if values.is_empty() { f64::INFINITY } else { rel_gap(objective, bound) },
        values,
        objective,
        best_bound: bound,
        node_count,
        wall_time: start.elapsed(),
        dual_objective: bound,
        simplex_iterations: 0,
        trace,
    }
}

/// Fixes every binary to the given value and solves the remaining LP.
/// Evaluates a candidate integer plan under the exact model; an infeasible
/// fixing comes back with `Infeasible` status rather than an error.
pub fn fix_binaries_and_solve(
    problem: &MilpProblem,
    assignment: &[(usize, bool)],
) -> Result<MilpSolution, SolverError> {
    let start = Instant::now();
    let binaries = problem.binary_vars();
    let mut fixes: Vec<(usize, f64, f64)> = Vec::with_capacity(binaries.len());
    for &b in &binaries {
        let Some(&(_, value)) = assignment.iter().find(|(v, _)| *v == b) else {
            return Err(SolverError::InvalidProblem(format!(
                "assignment misses binary variable {} ({})",
                b, problem.variables[b].name
            )));
        };
        let v = if value { 1.0 } else { 0.0 };
        fixes.push((b, v, v));
    }
    for &(v, _) in assignment {
        if !binaries.contains(&v) {
            return Err(SolverError::InvalidProblem(format!(
                "assignment fixes variable {v}, which is not a binary"
            )));
        }
    }
    let core = CoreLp::from_problem(problem)?;
    let outcome = core.solve(&fixes, None, None);
    Ok(lp_outcome_to_solution(outcome, start))
}

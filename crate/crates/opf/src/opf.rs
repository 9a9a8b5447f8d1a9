//! Single-node operational problem: a transport-model power flow.
//!
//! Nodal balance with capacity-bounded flows and shedding, no voltage-angle
//! physics. Candidate line status is plain data here (it gates the flow
//! bounds); the reliability standard caps total shed energy per node. When
//! that cap makes the problem infeasible, the solve is repeated without it
//! and the result is flagged, so training targets stay defined.

use gridplan_core::{Network, NodeOperations, ReliabilityStatus};
use gridplan_solver::{solve_lp, MilpProblem, Sense, SolveStatus};

use crate::context::NodeOperatingContext;
use crate::error::OpfError;

/// Variable layout of one operational block: dispatch, then flows, then
/// shedding, each entity-major over the horizon.
#[derive(Debug, Clone, Copy)]
pub struct OpfLayout {
    pub num_gens: usize,
    pub num_lines: usize,
    pub num_buses: usize,
    pub horizon: usize,
}

impl OpfLayout {
    pub fn new(network: &Network) -> Self {
        OpfLayout {
            num_gens: network.generators.len(),
            num_lines: network.lines.len(),
            num_buses: network.buses.len(),
            horizon: network.horizon(),
        }
    }

    pub fn block_size(&self) -> usize {
        (self.num_gens + self.num_lines + self.num_buses) * self.horizon
    }

    pub fn dispatch(&self, gen: usize, t: usize) -> usize {
        gen * self.horizon + t
    }

    pub fn flow(&self, line: usize, t: usize) -> usize {
        (self.num_gens + line) * self.horizon + t
    }

    pub fn shed(&self, bus: usize, t: usize) -> usize {
        (self.num_gens + self.num_lines + bus) * self.horizon + t
    }
}

/// Emits one node's operational block into `problem` with variable indices
/// shifted by the current variable count. Returns the block's base offset.
///
/// With `gate_deferred` the candidate flow bounds stay at full capacity and
/// no gating is emitted; the caller ties them to its own built-status
/// binaries with `f <= F*y` rows. Otherwise `ctx.built` gates the bounds
/// directly.
pub(crate) fn emit_operational_block(
    problem: &mut MilpProblem,
    network: &Network,
    ctx: &NodeOperatingContext,
    tag: &str,
    gate_deferred: bool,
) -> usize {
    let layout = OpfLayout::new(network);
    let horizon = layout.horizon;
    let base = problem.num_vars();

    for (g, gen) in network.generators.iter().enumerate() {
        for t in 0..horizon {
            problem.add_continuous(
                format!("p_{}_{t}{tag}", gen.id),
                0.0,
                ctx.gen_upper(network, g, t),
            );
        }
    }
    let candidates = network.candidates();
    for line in network.lines.iter() {
        let cand_idx = candidates.iter().position(|c| c.id == line.id);
        for t in 0..horizon {
            let cap = match cand_idx {
                None => line.capacity_mw,
                Some(_) if gate_deferred => line.capacity_mw,
                Some(ci) => {
                    if ctx.built[ci] {
                        line.capacity_mw
                    } else {
                        0.0
                    }
                }
            };
            problem.add_continuous(format!("f_{}_{t}{tag}", line.id), -cap, cap);
        }
    }
    for (b, &bus) in network.buses.iter().enumerate() {
        for t in 0..horizon {
            problem.add_continuous(
                format!("ls_{bus}_{t}{tag}"),
                0.0,
                ctx.bus_demand(network, b, t),
            );
        }
    }

    // Nodal balance: generation + shed - outflow + inflow = demand.
    for (b, &bus) in network.buses.iter().enumerate() {
        for t in 0..horizon {
            let mut terms: Vec<(usize, f64)> = Vec::new();
            for (g, gen) in network.generators.iter().enumerate() {
                if gen.bus == bus {
                    terms.push((base + layout.dispatch(g, t), 1.0));
                }
            }
            terms.push((base + layout.shed(b, t), 1.0));
            for (l, line) in network.lines.iter().enumerate() {
                if line.from_bus == bus {
                    terms.push((base + layout.flow(l, t), -1.0));
                }
                if line.to_bus == bus {
                    terms.push((base + layout.flow(l, t), 1.0));
                }
            }
            problem.add_row(
                format!("bal_{bus}_{t}{tag}"),
                terms,
                Sense::Eq,
                ctx.bus_demand(network, b, t),
            );
        }
    }

    // Reliability standard: total shed energy within gamma of total demand.
    if ctx.gamma < 1.0 {
        let mut terms: Vec<(usize, f64)> = Vec::new();
        for b in 0..layout.num_buses {
            for t in 0..horizon {
                terms.push((base + layout.shed(b, t), 1.0));
            }
        }
        problem.add_row(
            format!("reliability{tag}"),
            terms,
            Sense::Le,
            ctx.gamma * ctx.total_demand_mwh(),
        );
    }

    base
}

/// Builds the pure-LP operational problem for one node. Candidate built
/// status enters as data through the flow bounds.
pub fn build_opf(network: &Network, ctx: &NodeOperatingContext) -> MilpProblem {
    let mut problem = MilpProblem::new(format!("opf-{}", ctx.node_id));
    let layout = OpfLayout::new(network);
    let base = emit_operational_block(&mut problem, network, ctx, "", false);
    for (g, gen) in network.generators.iter().enumerate() {
        for t in 0..layout.horizon {
            problem.add_objective_term(base + layout.dispatch(g, t), gen.marginal_cost);
        }
    }
    for b in 0..layout.num_buses {
        for t in 0..layout.horizon {
            problem.add_objective_term(base + layout.shed(b, t), ctx.voll);
        }
    }
    problem
}

/// Result of one operational solve: the two training targets plus the full
/// hourly solution.
#[derive(Debug, Clone)]
pub struct OpfResult {
    pub gen_cost_total: f64,
    pub shed_total_mwh: f64,
    pub operations: NodeOperations,
}

pub(crate) fn extract_operations(
    network: &Network,
    values: &[f64],
    base: usize,
    node_id: &str,
    status: ReliabilityStatus,
) -> NodeOperations {
    let layout = OpfLayout::new(network);
    let horizon = layout.horizon;
    let mut dispatch_mw = Vec::with_capacity(layout.num_gens * horizon);
    let mut gen_cost_total = 0.0;
    for (g, gen) in network.generators.iter().enumerate() {
        for t in 0..horizon {
            let p = values[base + layout.dispatch(g, t)];
            dispatch_mw.push(p);
            gen_cost_total += gen.marginal_cost * p;
        }
    }
    let flow_mw: Vec<f64> = (0..layout.num_lines)
        .flat_map(|l| (0..horizon).map(move |t| (l, t)))
        .map(|(l, t)| values[base + layout.flow(l, t)])
        .collect();
    let mut shed_mw = Vec::with_capacity(layout.num_buses * horizon);
    let mut shed_total_mwh = 0.0;
    for b in 0..layout.num_buses {
        for t in 0..horizon {
            let s = values[base + layout.shed(b, t)];
            shed_mw.push(s);
            shed_total_mwh += s;
        }
    }
    NodeOperations {
        node_id: node_id.to_string(),
        horizon,
        dispatch_mw,
        flow_mw,
        shed_mw,
        gen_cost_total,
        shed_total_mwh,
        status,
    }
}

/// Solves one node's operational problem, returning the training targets
/// (total generation cost, total shed energy) and the hourly solution.
///
/// If the reliability cap makes the problem infeasible it is re-solved
/// without the cap and the result carries `RelaxedStandard`.
pub fn solve_opf(network: &Network, ctx: &NodeOperatingContext) -> Result<OpfResult, OpfError> {
    let problem = build_opf(network, ctx);
    let sol = solve_lp(&problem).map_err(OpfError::from)?;
    let (sol, status) = match sol.status {
        SolveStatus::Optimal => (sol, ReliabilityStatus::Standard),
        SolveStatus::Infeasible if ctx.gamma < 1.0 => {
            let mut relaxed_ctx = ctx.clone();
            relaxed_ctx.gamma = 1.0;
            let relaxed = build_opf(network, &relaxed_ctx);
            let sol = solve_lp(&relaxed).map_err(OpfError::from)?;
            if sol.status != SolveStatus::Optimal {
                return Err(OpfError::Solve(format!(
                    "relaxed operational problem for node {} ended {:?}",
                    ctx.node_id, sol.status
                )));
            }
            (sol, ReliabilityStatus::RelaxedStandard)
        }
        other => {
            return Err(OpfError::Solve(format!(
                "operational problem for node {} ended {other:?}",
                ctx.node_id
            )))
        }
    };
    let operations = extract_operations(network, &sol.values, 0, &ctx.node_id, status);
    Ok(OpfResult {
        gen_cost_total: operations.gen_cost_total,
        shed_total_mwh: operations.shed_total_mwh,
        operations,
    })
}

//! The exact multistage expansion-planning model: per-node copies of the
//! operational problem, investment binaries with lead-time and persistence
//! links across the tree, and a probability-discounted objective.

use gridplan_core::{
    validate_plan, InvestmentPlan, Network, NodeOperations, ReliabilityStatus, ScenarioTree,
};
use gridplan_solver::{
    fix_binaries_and_solve, solve_milp, MilpProblem, Sense, SolveOptions, SolveStatus,
};

use crate::context::{NodeOperatingContext, PerturbationDraw};
use crate::error::OpfError;
use crate::opf::{emit_operational_block, extract_operations, OpfLayout};

/// A fully realized planning instance: the network, the tree, one
/// perturbation draw per node, and the effective reliability parameters.
#[derive(Debug, Clone)]
pub struct StepInstance<'a> {
    pub network: &'a Network,
    pub tree: &'a ScenarioTree,
    /// One draw per tree node, canonical node order.
    pub draws: Vec<PerturbationDraw>,
    pub voll: f64,
    /// Reliability fraction; values >= 1 disable the cap.
    pub gamma: f64,
}

impl<'a> StepInstance<'a> {
    /// The unperturbed instance (every factor exactly 1).
    pub fn unperturbed(network: &'a Network, tree: &'a ScenarioTree) -> Self {
        let draws = vec![PerturbationDraw::unit(network); tree.node_count()];
        StepInstance::with_draws(network, tree, draws)
    }

    pub fn with_draws(
        network: &'a Network,
        tree: &'a ScenarioTree,
        draws: Vec<PerturbationDraw>,
    ) -> Self {
        StepInstance {
            network,
            tree,
            draws,
            voll: tree.voll,
            gamma: tree.gamma,
        }
    }

    /// Node context with the instance's reliability overrides applied.
    pub fn context(&self, node: usize, built: &[bool]) -> NodeOperatingContext {
        let mut ctx =
            NodeOperatingContext::build(self.network, self.tree, node, &self.draws[node], built);
        ctx.voll = self.voll;
        ctx.gamma = self.gamma;
        ctx
    }

    /// Discounted annualized investment cost of a candidate at a node:
    /// the base cost brought to present value from the node's year.
    pub fn invest_cost(&self, cand: usize, node: usize) -> f64 {
        let line = self.network.candidates()[cand];
        line.invest_cost_base()
            * (1.0 + self.tree.discount_rate).powi(-(self.tree.nodes[node].year as i32))
    }
}

/// The assembled exact model plus everything needed to read solutions back.
pub struct ExactStepModel<'a> {
    pub problem: MilpProblem,
    pub instance: StepInstance<'a>,
    /// Base variable offset of each node's operational block.
    pub block_base: Vec<usize>,
    /// Variable ids: invest[node][cand], built[node][cand], newly[node][cand].
    pub invest_vars: Vec<Vec<usize>>,
    pub built_vars: Vec<Vec<usize>>,
    pub newly_vars: Vec<Vec<usize>>,
    pub contexts: Vec<NodeOperatingContext>,
}

/// Emits the investment triple for every (node, candidate) with the linking
/// rows: lead time (built at child = invest at parent), persistence, unique
/// payment, nothing built at the root, and no payments at leaves.
pub(crate) fn emit_investment_structure(
    problem: &mut MilpProblem,
    tree: &ScenarioTree,
    num_candidates: usize,
) -> (Vec<Vec<usize>>, Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let nodes = tree.node_count();
    let root = tree.root_index();
    let mut invest = vec![Vec::with_capacity(num_candidates); nodes];
    let mut built = vec![Vec::with_capacity(num_candidates); nodes];
    let mut newly = vec![Vec::with_capacity(num_candidates); nodes];
    for s in 0..nodes {
        let id = &tree.nodes[s].id;
        let leaf = tree.is_leaf(s);
        for c in 0..num_candidates {
            invest[s].push(problem.add_binary(format!("inv_{c}_{id}")));
            let b = problem.add_binary(format!("built_{c}_{id}"));
            if s == root {
                problem.variables[b].upper = 0.0;
            }
            built[s].push(b);
            let y = problem.add_binary(format!("new_{c}_{id}"));
            if leaf {
                // A leaf investment could never operate; forbid the payment.
                problem.variables[y].upper = 0.0;
            }
            newly[s].push(y);
        }
    }
    for (parent, child) in tree.parent_child_pairs() {
        for c in 0..num_candidates {
            problem.add_row(
                format!("lead_{c}_{}", tree.nodes[child].id),
                [(built[child][c], 1.0), (invest[parent][c], -1.0)],
                Sense::Eq,
                0.0,
            );
            problem.add_row(
                format!("persist_{c}_{}", tree.nodes[child].id),
                [(built[child][c], 1.0), (built[parent][c], -1.0)],
                Sense::Ge,
                0.0,
            );
        }
    }
    for s in 0..nodes {
        for c in 0..num_candidates {
            problem.add_row(
                format!("paid_{c}_{}", tree.nodes[s].id),
                [(invest[s][c], 1.0), (built[s][c], -1.0), (newly[s][c], -1.0)],
                Sense::Eq,
                0.0,
            );
        }
    }
    (invest, built, newly)
}

/// Builds the full multistage model for an instance.
pub fn build_exact_step<'a>(instance: &StepInstance<'a>) -> Result<ExactStepModel<'a>, OpfError> {
    instance.tree.validate()?;
    let candidates = instance.network.candidates();
    if candidates.is_empty() {
        return Err(OpfError::Model(
            "planning requested on a network without candidate lines".into(),
        ));
    }
    let num_candidates = candidates.len();
    let nodes = instance.tree.node_count();
    let mut problem = MilpProblem::new(format!(
        "step-{}-{}",
        instance.network.name, instance.tree.name
    ));

    let mut contexts = Vec::with_capacity(nodes);
    for s in 0..nodes {
        contexts.push(instance.context(s, &vec![false; num_candidates]));
    }

    // Operational blocks first, then the binaries, then gating rows that
    // tie candidate flows to built status.
    let mut block_base = Vec::with_capacity(nodes);
    let mut gate_rows_pending: Vec<(usize, String)> = Vec::new();
    for (s, ctx) in contexts.iter().enumerate() {
        let tag = format!("@{}", instance.tree.nodes[s].id);
        gate_rows_pending.push((s, tag));
        // Gating rows need the binary ids, so blocks are emitted without
        // gates here and the rows are added after the binaries exist.
        let base =
            emit_operational_block(&mut problem, instance.network, ctx, &gate_rows_pending[s].1, true);
        block_base.push(base);
    }
    let (invest_vars, built_vars, newly_vars) =
        emit_investment_structure(&mut problem, instance.tree, num_candidates);

    let layout = OpfLayout::new(instance.network);
    for (s, tag) in &gate_rows_pending {
        for (ci, cand) in candidates.iter().enumerate() {
            let l = instance
                .network
                .lines
                .iter()
                .position(|x| x.id == cand.id)
                .unwrap();
            for t in 0..layout.horizon {
                let f = block_base[*s] + layout.flow(l, t);
                problem.add_row(
                    format!("gate_hi_{}_{t}{tag}", cand.id),
                    [(f, 1.0), (built_vars[*s][ci], -cand.capacity_mw)],
                    Sense::Le,
                    0.0,
                );
                problem.add_row(
                    format!("gate_lo_{}_{t}{tag}", cand.id),
                    [(f, 1.0), (built_vars[*s][ci], cand.capacity_mw)],
                    Sense::Ge,
                    0.0,
                );
            }
        }
    }

    // Objective: expected annualized investments plus discounted
    // operational cost per node.
    for s in 0..nodes {
        let pi = instance.tree.nodes[s].probability;
        let disc = instance.tree.discount_factor(s);
        for c in 0..num_candidates {
            problem.add_objective_term(newly_vars[s][c], pi * instance.invest_cost(c, s));
        }
        for (g, gen) in instance.network.generators.iter().enumerate() {
            for t in 0..layout.horizon {
                problem.add_objective_term(
                    block_base[s] + layout.dispatch(g, t),
                    disc * gen.marginal_cost,
                );
            }
        }
        for b in 0..layout.num_buses {
            for t in 0..layout.horizon {
                problem.add_objective_term(block_base[s] + layout.shed(b, t), disc * instance.voll);
            }
        }
    }

    Ok(ExactStepModel {
        problem,
        instance: instance.clone(),
        block_base,
        invest_vars,
        built_vars,
        newly_vars,
        contexts,
    })
}

/// A solved planning problem: the plan, the per-node operations, and the
/// cost decomposition of the objective.
#[derive(Debug, Clone)]
pub struct StepSolution {
    pub plan: InvestmentPlan,
    pub node_ops: Vec<NodeOperations>,
    pub status: SolveStatus,
    /// Objective as reported by the solver.
    pub total_cost: f64,
    /// Sum over nodes of pi * c_ann * newly_paid, recomputed from values.
    pub invest_cost: f64,
    /// Sum over nodes of the discounted operational cost, recomputed.
    pub operational_cost: f64,
    pub rel_gap: f64,
    pub node_count: u64,
    pub wall_time: std::time::Duration,
    pub variables: usize,
    pub constraints: usize,
}

impl StepSolution {
    /// Relative difference between the solver objective and the
    /// recomputation from raw variables; should sit within 1e-6.
    pub fn objective_residual(&self) -> f64 {
        let recomputed = self.invest_cost + self.operational_cost;
        (recomputed - self.total_cost).abs() / self.total_cost.abs().max(1.0)
    }
}

fn extract_solution(
    model: &ExactStepModel,
    values: &[f64],
    status: SolveStatus,
    rel_gap: f64,
    node_count: u64,
    wall_time: std::time::Duration,
    objective: f64,
) -> Result<StepSolution, OpfError> {
    let instance = &model.instance;
    let tree = instance.tree;
    let network = instance.network;
    let nodes = tree.node_count();
    let candidates = network.candidate_ids();

    let mut plan = InvestmentPlan::zeros(tree, candidates);
    for s in 0..nodes {
        for c in 0..plan.candidate_ids.len() {
            plan.set(
                s,
                c,
                values[model.invest_vars[s][c]] > 0.5,
                values[model.built_vars[s][c]] > 0.5,
                values[model.newly_vars[s][c]] > 0.5,
            );
        }
    }
    let report = validate_plan(&plan, tree)?;
    if !report.is_consistent() {
        return Err(OpfError::Model(format!(
            "solver returned a temporally inconsistent plan: {:?}",
            report.violations
        )));
    }

    let mut invest_cost = 0.0;
    let mut operational_cost = 0.0;
    let mut node_ops = Vec::with_capacity(nodes);
    for s in 0..nodes {
        let pi = tree.nodes[s].probability;
        let disc = tree.discount_factor(s);
        for c in 0..plan.candidate_ids.len() {
            if values[model.newly_vars[s][c]] > 0.5 {
                invest_cost += pi * instance.invest_cost(c, s);
            }
        }
        let ops = extract_operations(
            network,
            values,
            model.block_base[s],
            &tree.nodes[s].id,
            ReliabilityStatus::Standard,
        );
        operational_cost += disc * (ops.gen_cost_total + instance.voll * ops.shed_total_mwh);
        node_ops.push(ops);
    }

    Ok(StepSolution {
        plan,
        node_ops,
        status,
        total_cost: objective,
        invest_cost,
        operational_cost,
        rel_gap,
        node_count,
        wall_time,
        variables: model.problem.num_vars(),
        constraints: model.problem.num_rows(),
    })
}

/// Builds and solves the exact model.
pub fn solve_exact_step(
    instance: &StepInstance,
    options: &SolveOptions,
) -> Result<StepSolution, OpfError> {
    let model = build_exact_step(instance)?;
    let sol = solve_milp(&model.problem, options)?;
    if !sol.status.has_solution() {
        return Err(OpfError::Unsolved(sol.status));
    }
    extract_solution(
        &model,
        &sol.values,
        sol.status,
        sol.rel_gap,
        sol.node_count,
        sol.wall_time,
        sol.objective,
    )
}

/// Evaluates a fixed plan under the exact model: all binaries pinned, one
/// LP solve. This is the re-evaluation oracle for surrogate plans and the
/// building block of exhaustive plan enumeration.
pub fn evaluate_plan(
    instance: &StepInstance,
    plan: &InvestmentPlan,
    warm_model: Option<&ExactStepModel>,
) -> Result<Result<StepSolution, SolveStatus>, OpfError> {
    let built_model;
    let model = match warm_model {
        Some(m) => m,
        None => {
            built_model = build_exact_step(instance)?;
            &built_model
        }
    };
    let mut assignment: Vec<(usize, bool)> = Vec::new();
    for s in 0..instance.tree.node_count() {
        for c in 0..plan.candidate_ids.len() {
            let (inv, built, newly) = plan.triple(s, c);
            assignment.push((model.invest_vars[s][c], inv));
            assignment.push((model.built_vars[s][c], built));
            assignment.push((model.newly_vars[s][c], newly));
        }
    }
    let sol = fix_binaries_and_solve(&model.problem, &assignment)?;
    if sol.status != SolveStatus::Optimal {
        return Ok(Err(sol.status));
    }
    Ok(Ok(extract_solution(
        model,
        &sol.values,
        sol.status,
        0.0,
        0,
        sol.wall_time,
        sol.objective,
    )?))
}

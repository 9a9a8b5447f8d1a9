//! Investment plans: for every candidate line and scenario node, the binary
//! triple (invest, built, newly-paid) and the temporal-consistency checks
//! linking them across the tree.
//!
//! The intended transition system: investing in a line at node s makes it
//! operational (`built`) at every child of s and, by persistence, at all of
//! their descendants. `invest` is the cumulative indicator, `newly_paid`
//! flags the single node where the cost is charged.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::network::LineId;
use crate::tree::ScenarioTree;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvestmentPlan {
    /// Candidate line ids, canonical (network) order.
    pub candidate_ids: Vec<LineId>,
    /// Node ids, canonical (tree) order.
    pub node_ids: Vec<String>,
    /// Row-major [node][candidate].
    pub invest: Vec<bool>,
    pub built: Vec<bool>,
    pub newly_paid: Vec<bool>,
}

impl InvestmentPlan {
    pub fn zeros(tree: &ScenarioTree, candidate_ids: Vec<LineId>) -> Self {
        let cells = tree.node_count() * candidate_ids.len();
        InvestmentPlan {
            candidate_ids,
            node_ids: tree.nodes.iter().map(|n| n.id.clone()).collect(),
            invest: vec![false; cells],
            built: vec![false; cells],
            newly_paid: vec![false; cells],
        }
    }

    pub fn num_candidates(&self) -> usize {
        self.candidate_ids.len()
    }

    pub fn cell(&self, node: usize, cand: usize) -> usize {
        node * self.candidate_ids.len() + cand
    }

    /// (invest, built, newly_paid) at a cell.
    pub fn triple(&self, node: usize, cand: usize) -> (bool, bool, bool) {
        let i = self.cell(node, cand);
        (self.invest[i], self.built[i], self.newly_paid[i])
    }

    pub fn set(&mut self, node: usize, cand: usize, invest: bool, built: bool, newly_paid: bool) {
        let i = self.cell(node, cand);
        self.invest[i] = invest;
        self.built[i] = built;
        self.newly_paid[i] = newly_paid;
    }

    /// Built-status vector of a node, candidate order.
    pub fn built_at(&self, node: usize) -> Vec<bool> {
        (0..self.candidate_ids.len())
            .map(|c| self.built[self.cell(node, c)])
            .collect()
    }

    /// Derives the full triple field from the set of (node, candidate)
    /// investment events. Events must be an antichain per candidate (no
    /// event at a descendant of another); the result is then consistent by
    /// construction.
    pub fn from_events(
        tree: &ScenarioTree,
        candidate_ids: Vec<LineId>,
        events: &[(usize, usize)],
    ) -> Self {
        let mut plan = InvestmentPlan::zeros(tree, candidate_ids);
        for &(node, cand) in events {
            let i = plan.cell(node, cand);
            plan.newly_paid[i] = true;
        }
        // invest = newly paid here or at an ancestor; built = invested at
        // the parent (and so at every ancestor-but-self of a paid node).
        for node in 0..tree.node_count() {
            for cand in 0..plan.candidate_ids.len() {
                let i = plan.cell(node, cand);
                let parent_invest = tree
                    .parent_index(node)
                    .map(|p| plan.invest[plan.cell(p, cand)])
                    .unwrap_or(false);
                plan.built[i] = parent_invest;
                plan.invest[i] = plan.newly_paid[i] || parent_invest;
            }
        }
        plan
    }
}

/// One violated linking constraint, locating the cell by ids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PlanViolation {
    /// Nothing can be operational at the root.
    RootBuilt { line: LineId },
    /// built at a child must equal invest at its parent.
    LeadTime { line: LineId, parent: String, child: String },
    /// built may never revert along a path.
    Persistence { line: LineId, parent: String, child: String },
    /// newly_paid must equal invest minus built, and that difference must
    /// be 0 or 1.
    PaymentMismatch { line: LineId, node: String },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PlanReport {
    pub violations: Vec<PlanViolation>,
}

impl PlanReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every violated linking constraint; the empty report means the plan
/// is temporally consistent with the tree.
pub fn validate_plan(plan: &InvestmentPlan, tree: &ScenarioTree) -> Result<PlanReport, CoreError> {
    if plan.node_ids.len() != tree.node_count() {
        return Err(CoreError::Dimension(format!(
            "plan covers {} nodes, tree has {}",
            plan.node_ids.len(),
            tree.node_count()
        )));
    }
    for (i, id) in plan.node_ids.iter().enumerate() {
        if tree.nodes[i].id != *id {
            return Err(CoreError::Dimension(format!(
                "plan node {i} is {:?}, tree has {:?}",
                id, tree.nodes[i].id
            )));
        }
    }
    let cells = plan.node_ids.len() * plan.candidate_ids.len();
    if plan.invest.len() != cells || plan.built.len() != cells || plan.newly_paid.len() != cells {
        return Err(CoreError::Dimension(format!(
            "plan arrays must hold {cells} cells ({} nodes x {} candidates)",
            plan.node_ids.len(),
            plan.candidate_ids.len()
        )));
    }

    let mut report = PlanReport::default();
    let root = tree.root_index();
    for (cand, &line) in plan.candidate_ids.iter().enumerate() {
        if plan.built[plan.cell(root, cand)] {
            report.violations.push(PlanViolation::RootBuilt { line });
        }
        for node in 0..tree.node_count() {
            let (invest, built, newly) = plan.triple(node, cand);
            let delta = invest as i32 - built as i32;
            if delta < 0 || (delta == 1) != newly {
                report.violations.push(PlanViolation::PaymentMismatch {
                    line,
                    node: plan.node_ids[node].clone(),
                });
            }
        }
        for (parent, child) in tree.parent_child_pairs() {
            let parent_cell = plan.cell(parent, cand);
            let child_cell = plan.cell(child, cand);
            if plan.built[child_cell] != plan.invest[parent_cell] {
                report.violations.push(PlanViolation::LeadTime {
                    line,
                    parent: plan.node_ids[parent].clone(),
                    child: plan.node_ids[child].clone(),
                });
            }
            if plan.built[parent_cell] && !plan.built[child_cell] {
                report.violations.push(PlanViolation::Persistence {
                    line,
                    parent: plan.node_ids[parent].clone(),
                    child: plan.node_ids[child].clone(),
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{ScenarioTree, TreeNode};

    fn tree_with_children() -> ScenarioTree {
        let mk = |id: &str, parent: Option<&str>, stage, year, p| TreeNode {
            id: id.into(),
            parent: parent.map(Into::into),
            stage,
            year,
            probability: p,
            demand_growth: 1.0,
            generator_multipliers: Default::default(),
            load_multipliers: Default::default(),
        };
        ScenarioTree {
            name: "t".into(),
            discount_rate: 0.06,
            voll: 1000.0,
            gamma: 0.1,
            nodes: vec![
                mk("root", None, 0, 0, 1.0),
                mk("a", Some("root"), 1, 5, 0.6),
                mk("b", Some("root"), 1, 5, 0.4),
            ],
        }
    }

    #[test]
    fn canonical_build_sequence_is_consistent() {
        let tree = tree_with_children();
        let plan = InvestmentPlan::from_events(&tree, vec![35], &[(0, 0)]);
        assert_eq!(plan.triple(0, 0), (true, false, true));
        assert_eq!(plan.triple(1, 0), (true, true, false));
        assert_eq!(plan.triple(2, 0), (true, true, false));
        let report = validate_plan(&plan, &tree).unwrap();
        assert!(report.is_consistent(), "{report:?}");
    }

    #[test]
    fn built_reverting_at_child_is_flagged() {
        let tree = tree_with_children();
        let mut plan = InvestmentPlan::from_events(&tree, vec![35], &[(0, 0)]);
        let cell = plan.cell(2, 0);
        plan.built[cell] = false;
        plan.newly_paid[cell] = true; // keep (10) locally satisfied
        let report = validate_plan(&plan, &tree).unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, PlanViolation::LeadTime { .. })));
    }

    #[test]
    fn all_three_set_at_one_node_breaks_payment_link() {
        let tree = tree_with_children();
        let mut plan = InvestmentPlan::zeros(&tree, vec![35]);
        plan.set(1, 0, true, true, true);
        let report = validate_plan(&plan, &tree).unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, PlanViolation::PaymentMismatch { node, .. } if node == "a")));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let tree = tree_with_children();
        let mut plan = InvestmentPlan::zeros(&tree, vec![35]);
        plan.invest.pop();
        assert!(matches!(validate_plan(&plan, &tree), Err(CoreError::Dimension(_))));
    }
}

//! Exhaustive enumeration of temporally consistent plans, used as the
//! reference against which branch-and-bound planning answers are verified
//! on small fixtures.

use gridplan_core::{InvestmentPlan, LineId, ScenarioTree};

use crate::error::OpfError;

/// All plans reachable through the transition system, with payments only at
/// non-leaf nodes (a line paid at a leaf could never operate). Per
/// candidate the payment nodes form an antichain of the tree; the result is
/// the cross product over candidates. Errors out when more than `cap`
/// plans would be produced.
pub fn enumerate_consistent_plans(
    tree: &ScenarioTree,
    candidate_ids: &[LineId],
    cap: usize,
) -> Result<Vec<InvestmentPlan>, OpfError> {
    let non_leaf: Vec<usize> = (0..tree.node_count()).filter(|&n| !tree.is_leaf(n)).collect();

    // Ancestor relation over the candidates' payment sites.
    let is_ancestor = |a: usize, b: usize| {
        let mut cur = tree.parent_index(b);
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = tree.parent_index(p);
        }
        false
    };

    let mut antichains: Vec<Vec<usize>> = vec![vec![]];
    for (i, &n) in non_leaf.iter().enumerate() {
        let mut extended = Vec::new();
        for chain in &antichains {
            let compatible = chain
                .iter()
                .all(|&m| !is_ancestor(m, n) && !is_ancestor(n, m));
            if compatible {
                let mut longer = chain.clone();
                longer.push(n);
                extended.push(longer);
            }
        }
        antichains.extend(extended);
        let _ = i;
    }

    let per_candidate = antichains.len();
    let total = per_candidate
        .checked_pow(candidate_ids.len() as u32)
        .filter(|&t| t <= cap)
        .ok_or_else(|| {
            OpfError::Model(format!(
                "{per_candidate}^{} consistent plans exceed the enumeration cap {cap}",
                candidate_ids.len()
            ))
        })?;

    let mut plans = Vec::with_capacity(total);
    let mut choice = vec![0usize; candidate_ids.len()];
    loop {
        let mut events: Vec<(usize, usize)> = Vec::new();
        for (cand, &pick) in choice.iter().enumerate() {
            for &node in &antichains[pick] {
                events.push((node, cand));
            }
        }
        plans.push(InvestmentPlan::from_events(tree, candidate_ids.to_vec(), &events));

        // Odometer increment over the per-candidate choices.
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(plans);
            }
            choice[k] += 1;
            if choice[k] < per_candidate {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

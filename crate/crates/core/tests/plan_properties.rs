//! Property tests for scenario-tree invariants and plan consistency: plans
//! reachable through the invest-then-build transition system always
//! validate, and any single flipped built bit is caught.

use std::collections::BTreeMap;

use proptest::prelude::*;

use gridplan_core::plan::{validate_plan, InvestmentPlan};
use gridplan_core::tree::{ScenarioTree, TreeNode, PROBABILITY_TOL};

fn make_node(id: String, parent: Option<String>, stage: u32, year: u32, p: f64) -> TreeNode {
    TreeNode {
        id,
        parent,
        stage,
        year,
        probability: p,
        demand_growth: 1.0,
        generator_multipliers: BTreeMap::new(),
        load_multipliers: BTreeMap::new(),
    }
}

/// Random tree of up to three stages: branching counts and integer weights
/// drive the probability split so children always sum to their parent.
fn arb_tree() -> impl Strategy<Value = ScenarioTree> {
    let weights = prop::collection::vec(1u32..=9, 1..=3);
    (weights.clone(), prop::collection::vec(weights, 3))
        .prop_map(|(stage1, stage2)| {
            let mut nodes = vec![make_node("root".into(), None, 0, 0, 1.0)];
            let total1: u32 = stage1.iter().sum();
            for (i, w1) in stage1.iter().enumerate() {
                let p1 = nodes[0].probability * (*w1 as f64) / total1 as f64;
                let id1 = format!("s{i}");
                nodes.push(make_node(id1.clone(), Some("root".into()), 1, 5, p1));
                let grandchildren = &stage2[i % stage2.len()];
                // Only some branches continue to a third stage.
                if i % 2 == 0 {
                    let total2: u32 = grandchildren.iter().sum();
                    for (j, w2) in grandchildren.iter().enumerate() {
                        let p2 = p1 * (*w2 as f64) / total2 as f64;
                        nodes.push(make_node(format!("s{i}-{j}"), Some(id1.clone()), 2, 10, p2));
                    }
                }
            }
            ScenarioTree {
                name: "prop".into(),
                discount_rate: 0.06,
                voll: 1000.0,
                gamma: 0.01,
                nodes,
            }
        })
        .prop_filter("tree validates", |tree| tree.validate().is_ok())
}

/// Prunes an arbitrary node set down to an antichain: events whose ancestor
/// is also selected are dropped.
fn prune_to_antichain(tree: &ScenarioTree, selected: &[usize]) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    'outer: for &n in selected {
        let mut cursor = tree.parent_index(n);
        while let Some(p) = cursor {
            if selected.contains(&p) {
                continue 'outer;
            }
            cursor = tree.parent_index(p);
        }
        kept.push(n);
    }
    kept
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn probability_flow_invariants_hold(tree in arb_tree()) {
        let leaf_sum: f64 = tree.leaves().iter().map(|&l| tree.nodes[l].probability).sum();
        prop_assert!((leaf_sum - 1.0).abs() <= PROBABILITY_TOL);
        for i in 0..tree.node_count() {
            let children = tree.children(i);
            if !children.is_empty() {
                let sum: f64 = children.iter().map(|&c| tree.nodes[c].probability).sum();
                prop_assert!((sum - tree.nodes[i].probability).abs() <= PROBABILITY_TOL);
            }
        }
    }

    #[test]
    fn consistent_plans_always_pass(
        tree in arb_tree(),
        raw_events in prop::collection::vec((0usize..16, 0usize..2), 0..6),
    ) {
        let candidates = vec![33, 35];
        let mut selected: Vec<(usize, usize)> = Vec::new();
        for cand in 0..candidates.len() {
            let picks: Vec<usize> = raw_events
                .iter()
                .filter(|(_, c)| *c == cand)
                .map(|(n, _)| n % tree.node_count())
                .collect();
            for node in prune_to_antichain(&tree, &picks) {
                selected.push((node, cand));
            }
        }
        let plan = InvestmentPlan::from_events(&tree, candidates, &selected);
        let report = validate_plan(&plan, &tree).unwrap();
        prop_assert!(report.is_consistent(), "violations: {:?}", report.violations);
    }

    #[test]
    fn flipping_one_built_bit_always_fails(
        tree in arb_tree(),
        raw_events in prop::collection::vec(0usize..16, 0..4),
        flip in (0usize..64),
    ) {
        let picks: Vec<usize> = raw_events.iter().map(|&n| n % tree.node_count()).collect();
        let events: Vec<(usize, usize)> = prune_to_antichain(&tree, &picks)
            .into_iter()
            .map(|n| (n, 0))
            .collect();
        let mut plan = InvestmentPlan::from_events(&tree, vec![35], &events);
        let cell = flip % plan.built.len();
        plan.built[cell] = !plan.built[cell];
        let report = validate_plan(&plan, &tree).unwrap();
        prop_assert!(!report.is_consistent(), "flip at {cell} went undetected");
    }

    #[test]
    fn tree_serialization_round_trips(tree in arb_tree()) {
        let text = toml::to_string_pretty(&tree).unwrap();
        let back: ScenarioTree = toml::from_str(&text).unwrap();
        prop_assert_eq!(tree, back);
    }
}

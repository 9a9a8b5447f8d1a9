//! Scenario trees: probability-weighted development paths over a multi-year
//! horizon. Decisions taken at a node are shared by every descendant.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::network::Network;

/// Probability bookkeeping tolerance for sums along the tree.
pub const PROBABILITY_TOL: f64 = 1e-9;

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: String,
    /// Root nodes have no parent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    pub stage: u32,
    /// Years elapsed since the root node.
    pub year: u32,
    pub probability: f64,
    /// Scales every load's baseline profile at this node.
    #[serde(default = "one")]
    pub demand_growth: f64,
    /// Per-generator capacity multipliers, keyed by generator id.
    /// Missing entries default to 1.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub generator_multipliers: BTreeMap<String, f64>,
    /// Per-load multipliers on top of `demand_growth`, keyed by load id.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub load_multipliers: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTree {
    pub name: String,
    /// Discount rate r applied as (1+r)^-year.
    #[serde(default = "default_discount_rate")]
    pub discount_rate: f64,
    /// Value of lost load, $/MWh.
    pub voll: f64,
    /// Reliability standard: per node, shed energy may not exceed this
    /// fraction of total demanded energy.
    pub gamma: f64,
    pub nodes: Vec<TreeNode>,
}

fn default_discount_rate() -> f64 {
    0.06
}

/// Discounted probability weight of a node: pi * (1+r)^-year.
pub fn discount_factor(probability: f64, year: u32, rate: f64) -> f64 {
    probability * (1.0 + rate).powi(-(year as i32))
}

impl ScenarioTree {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn root_index(&self) -> usize {
        self.nodes
            .iter()
            .position(|n| n.parent.is_none())
            .expect("validated tree has a root")
    }

    pub fn parent_index(&self, node: usize) -> Option<usize> {
        self.nodes[node]
            .parent
            .as_deref()
            .and_then(|p| self.node_index(p))
    }

    pub fn children(&self, node: usize) -> Vec<usize> {
        let id = &self.nodes[node].id;
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.parent.as_deref() == Some(id.as_str()))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.children(node).is_empty()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.is_leaf(i)).collect()
    }

    /// All (parent, child) index pairs — the transition set linking
    /// investment at a node to operation at its children.
    pub fn parent_child_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.nodes.len())
            .filter_map(|i| self.parent_index(i).map(|p| (p, i)))
            .collect()
    }

    /// pi_s * (1+r)^-year_s for a node of this tree.
    pub fn discount_factor(&self, node: usize) -> f64 {
        let n = &self.nodes[node];
        discount_factor(n.probability, n.year, self.discount_rate)
    }

    pub fn generator_multiplier(&self, node: usize, gen_id: &str) -> f64 {
        *self.nodes[node]
            .generator_multipliers
            .get(gen_id)
            .unwrap_or(&1.0)
    }

    pub fn load_multiplier(&self, node: usize, load_id: &str) -> f64 {
        *self.nodes[node].load_multipliers.get(load_id).unwrap_or(&1.0)
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.discount_rate > -1.0) || !self.discount_rate.is_finite() {
            return Err(CoreError::validation(
                "discount_rate",
                format!("rate {} must be finite and greater than -1", self.discount_rate),
            ));
        }
        if !self.voll.is_finite() || self.voll < 0.0 {
            return Err(CoreError::validation("voll", format!("VoLL {} must be nonnegative", self.voll)));
        }
        if !self.gamma.is_finite() || !(0.0..1.0).contains(&self.gamma) {
            return Err(CoreError::validation(
                "gamma",
                format!("reliability fraction {} must lie in [0, 1)", self.gamma),
            ));
        }
        if self.nodes.is_empty() {
            return Err(CoreError::validation("nodes", "tree has no nodes"));
        }

        let mut index = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if index.insert(n.id.clone(), i).is_some() {
                return Err(CoreError::validation(
                    format!("nodes[{i}].id"),
                    format!("duplicate node id {:?}", n.id),
                ));
            }
        }

        let roots: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| self.nodes[i].parent.is_none())
            .collect();
        if roots.len() != 1 {
            return Err(CoreError::validation(
                "nodes",
                format!("expected exactly one root node, found {}", roots.len()),
            ));
        }
        let root = roots[0];
        let root_node = &self.nodes[root];
        if root_node.year != 0 {
            return Err(CoreError::validation(
                format!("nodes[{:?}].year", root_node.id),
                "root node must sit at year 0",
            ));
        }
        if (root_node.probability - 1.0).abs() > PROBABILITY_TOL {
            return Err(CoreError::validation(
                format!("nodes[{:?}].probability", root_node.id),
                format!("root probability {} must equal 1", root_node.probability),
            ));
        }

        for (i, n) in self.nodes.iter().enumerate() {
            let field = |sub: &str| format!("nodes[{:?}].{sub}", n.id);
            if !n.probability.is_finite() || n.probability <= 0.0 || n.probability > 1.0 + PROBABILITY_TOL {
                return Err(CoreError::validation(
                    field("probability"),
                    format!("probability {} outside (0, 1]", n.probability),
                ));
            }
            if !n.demand_growth.is_finite() || n.demand_growth < 0.0 {
                return Err(CoreError::validation(
                    field("demand_growth"),
                    format!("multiplier {} must be nonnegative", n.demand_growth),
                ));
            }
            for (key, v) in n.generator_multipliers.iter().chain(n.load_multipliers.iter()) {
                if !v.is_finite() || *v < 0.0 {
                    return Err(CoreError::validation(
                        format!("nodes[{:?}].multipliers[{key:?}]", n.id),
                        format!("multiplier {v} must be nonnegative"),
                    ));
                }
            }
            if let Some(parent_id) = n.parent.as_deref() {
                let Some(&p) = index.get(parent_id) else {
                    return Err(CoreError::validation(
                        field("parent"),
                        format!("unknown parent node {parent_id:?}"),
                    ));
                };
                if p == i {
                    return Err(CoreError::validation(field("parent"), "node is its own parent"));
                }
                let parent = &self.nodes[p];
                if n.stage != parent.stage + 1 {
                    return Err(CoreError::validation(
                        field("stage"),
                        format!("stage {} must be parent stage {} plus one", n.stage, parent.stage),
                    ));
                }
                if n.year <= parent.year {
                    return Err(CoreError::validation(
                        field("year"),
                        format!("year {} must exceed parent year {}", n.year, parent.year),
                    ));
                }
            } else if n.stage != 0 {
                return Err(CoreError::validation(field("stage"), "root node must have stage 0"));
            }
        }

        // Stage increments along parent links rule out cycles; any node
        // unreachable from the root would need a parentless ancestor, and
        // there is exactly one root, so connectivity follows too. What is
        // left to check is the probability flow.
        for i in 0..self.nodes.len() {
            let children = self.children(i);
            if children.is_empty() {
                continue;
            }
            let sum: f64 = children.iter().map(|&c| self.nodes[c].probability).sum();
            if (sum - self.nodes[i].probability).abs() > PROBABILITY_TOL {
                return Err(CoreError::validation(
                    format!("nodes[{:?}]", self.nodes[i].id),
                    format!(
                        "children probabilities sum to {sum}, expected parent probability {}",
                        self.nodes[i].probability
                    ),
                ));
            }
        }
        let leaf_sum: f64 = self.leaves().iter().map(|&l| self.nodes[l].probability).sum();
        if (leaf_sum - 1.0).abs() > PROBABILITY_TOL {
            return Err(CoreError::validation(
                "nodes",
                format!("leaf probabilities sum to {leaf_sum}, expected 1"),
            ));
        }
        Ok(())
    }

    /// Checks multiplier keys against the network's generator and load ids.
    pub fn validate_against(&self, network: &Network) -> Result<(), CoreError> {
        let gen_ids: std::collections::BTreeSet<&str> =
            network.generators.iter().map(|g| g.id.as_str()).collect();
        let load_ids: std::collections::BTreeSet<&str> =
            network.loads.iter().map(|l| l.id.as_str()).collect();
        for n in &self.nodes {
            for key in n.generator_multipliers.keys() {
                if !gen_ids.contains(key.as_str()) {
                    return Err(CoreError::validation(
                        format!("nodes[{:?}].generator_multipliers[{key:?}]", n.id),
                        "unknown generator id",
                    ));
                }
            }
            for key in n.load_multipliers.keys() {
                if !load_ids.contains(key.as_str()) {
                    return Err(CoreError::validation(
                        format!("nodes[{:?}].load_multipliers[{key:?}]", n.id),
                        "unknown load id",
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn node(id: &str, parent: Option<&str>, stage: u32, year: u32, p: f64) -> TreeNode {
        TreeNode {
            id: id.into(),
            parent: parent.map(Into::into),
            stage,
            year,
            probability: p,
            demand_growth: 1.0,
            generator_multipliers: BTreeMap::new(),
            load_multipliers: BTreeMap::new(),
        }
    }

    pub(crate) fn star_tree(child_probs: &[f64]) -> ScenarioTree {
        let mut nodes = vec![node("root", None, 0, 0, 1.0)];
        for (i, p) in child_probs.iter().enumerate() {
            nodes.push(node(&format!("c{i}"), Some("root"), 1, 5, *p));
        }
        ScenarioTree {
            name: "test".into(),
            discount_rate: 0.06,
            voll: 1000.0,
            gamma: 0.1,
            nodes,
        }
    }

    #[test]
    fn three_branch_tree_is_valid() {
        let tree = star_tree(&[0.4, 0.35, 0.25]);
        tree.validate().unwrap();
        let leaf_sum: f64 = tree.leaves().iter().map(|&l| tree.nodes[l].probability).sum();
        assert!((leaf_sum - 1.0).abs() <= PROBABILITY_TOL);
    }

    #[test]
    fn single_node_tree_is_valid() {
        let tree = star_tree(&[]);
        tree.validate().unwrap();
        assert_eq!(tree.leaves(), vec![0]);
        assert!(tree.is_leaf(tree.root_index()));
    }

    #[test]
    fn child_probabilities_exceeding_parent_are_rejected() {
        let tree = star_tree(&[0.5, 0.6]);
        let err = tree.validate().unwrap_err();
        assert!(err.to_string().contains("children probabilities sum"));
    }

    #[test]
    fn multiple_roots_are_rejected() {
        let mut tree = star_tree(&[1.0]);
        tree.nodes[1].parent = None;
        tree.nodes[1].stage = 0;
        tree.nodes[1].year = 0;
        let err = tree.validate().unwrap_err();
        assert!(err.to_string().contains("exactly one root"));
    }

    #[test]
    fn self_parent_is_rejected() {
        let mut tree = star_tree(&[]);
        tree.nodes[0].parent = Some("root".into());
        assert!(tree.validate().is_err());
    }

    #[test]
    fn year_must_increase() {
        let mut tree = star_tree(&[1.0]);
        tree.nodes[1].year = 0;
        let err = tree.validate().unwrap_err();
        assert!(err.to_string().contains("year"));
    }

    #[test]
    fn discount_factor_identity_cases() {
        assert_eq!(discount_factor(1.0, 0, 0.3), 1.0);
        assert_eq!(discount_factor(0.5, 10, 0.0), 0.5);
        let f = discount_factor(1.0, 1, 0.06);
        assert!((f - 1.0 / 1.06).abs() < 1e-12, "{f}");
    }
}

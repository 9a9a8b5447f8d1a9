//! Operational solutions: per-node dispatch, flows and shedding together
//! with the two per-node totals that training targets are built from.

use serde::Serialize;

/// Whether a node's operational problem respected the reliability standard
/// or had to be re-solved with it relaxed to stay well-defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReliabilityStatus {
    Standard,
    RelaxedStandard,
}

impl ReliabilityStatus {
    pub fn is_relaxed(self) -> bool {
        matches!(self, ReliabilityStatus::RelaxedStandard)
    }
}

/// Hourly operating decisions for one scenario node.
///
/// Layouts are entity-major: `dispatch_mw[g * horizon + t]`, and likewise
/// for flows (line-major) and shedding (bus-major).
#[derive(Debug, Clone, Serialize)]
pub struct NodeOperations {
    pub node_id: String,
    pub horizon: usize,
    pub dispatch_mw: Vec<f64>,
    pub flow_mw: Vec<f64>,
    pub shed_mw: Vec<f64>,
    /// Total generation cost, $: sum of c_g * p over generators and hours.
    pub gen_cost_total: f64,
    /// Total shed energy, MWh.
    pub shed_total_mwh: f64,
    pub status: ReliabilityStatus,
}

impl NodeOperations {
    pub fn dispatch(&self, gen: usize, t: usize) -> f64 {
        self.dispatch_mw[gen * self.horizon + t]
    }

    pub fn flow(&self, line: usize, t: usize) -> f64 {
        self.flow_mw[line * self.horizon + t]
    }

    pub fn shed(&self, bus: usize, t: usize) -> f64 {
        self.shed_mw[bus * self.horizon + t]
    }
}

//! Static description of the physical system: buses, lines, generators,
//! loads, and the baseline hourly profiles everything is scaled from.
//!
//! All quantities are in MW, MWh, $ and hours. Renewable availability
//! profiles are per-unit-of-capacity factors in [0, 1] shared per kind;
//! individual generators are scaled from them.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

pub type BusId = u32;
pub type LineId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Thermal,
    Wind,
    Solar,
}

impl GeneratorKind {
    pub fn is_renewable(self) -> bool {
        matches!(self, GeneratorKind::Wind | GeneratorKind::Solar)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub id: LineId,
    pub from_bus: BusId,
    pub to_bus: BusId,
    /// Flow limit in MW, applied symmetrically.
    pub capacity_mw: f64,
    #[serde(default)]
    pub is_candidate: bool,
    /// Investment cost in $/MW of capacity; required for candidates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invest_cost_per_mw: Option<f64>,
}

impl Line {
    /// Base investment cost in $ (capacity times per-MW cost). Zero for
    /// existing lines.
    pub fn invest_cost_base(&self) -> f64 {
        self.capacity_mw * self.invest_cost_per_mw.unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub bus: BusId,
    pub kind: GeneratorKind,
    pub capacity_mw: f64,
    /// Marginal generation cost in $/MWh.
    pub marginal_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Load {
    pub id: String,
    pub bus: BusId,
    /// Baseline hourly demand in MW, one entry per hour of the horizon.
    pub profile_mw: Vec<f64>,
}

impl Load {
    pub fn peak_mw(&self) -> f64 {
        self.profile_mw.iter().cloned().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub name: String,
    pub buses: Vec<BusId>,
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
    pub loads: Vec<Load>,
    /// Baseline wind availability per hour, per unit of capacity.
    pub wind_profile: Vec<f64>,
    /// Baseline solar availability per hour, per unit of capacity.
    pub solar_profile: Vec<f64>,
}

impl Network {
    /// Number of hours in the operational horizon.
    pub fn horizon(&self) -> usize {
        self.wind_profile.len()
    }

    /// Candidate lines in file order; this order is canonical everywhere a
    /// built-status vector appears.
    pub fn candidates(&self) -> Vec<&Line> {
        self.lines.iter().filter(|l| l.is_candidate).collect()
    }

    pub fn candidate_ids(&self) -> Vec<LineId> {
        self.candidates().iter().map(|l| l.id).collect()
    }

    pub fn wind_generators(&self) -> Vec<&Generator> {
        self.generators
            .iter()
            .filter(|g| g.kind == GeneratorKind::Wind)
            .collect()
    }

    pub fn solar_generators(&self) -> Vec<&Generator> {
        self.generators
            .iter()
            .filter(|g| g.kind == GeneratorKind::Solar)
            .collect()
    }

    pub fn bus_index(&self, bus: BusId) -> Option<usize> {
        self.buses.iter().position(|&b| b == bus)
    }

    /// Baseline availability profile for a generator: the kind's shared
    /// profile, or all-ones for thermal units.
    pub fn availability_profile(&self, gen: &Generator) -> Vec<f64> {
        match gen.kind {
            GeneratorKind::Wind => self.wind_profile.clone(),
            GeneratorKind::Solar => self.solar_profile.clone(),
            GeneratorKind::Thermal => vec![1.0; self.horizon()],
        }
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        let horizon = self.horizon();
        if horizon == 0 {
            return Err(CoreError::validation("wind_profile", "horizon must be at least 1 hour"));
        }
        if self.solar_profile.len() != horizon {
            return Err(CoreError::validation(
                "solar_profile",
                format!(
                    "horizon {} does not match wind_profile horizon {horizon}",
                    self.solar_profile.len()
                ),
            ));
        }
        if self.buses.is_empty() {
            return Err(CoreError::validation("buses", "at least one bus is required"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, b) in self.buses.iter().enumerate() {
            if !seen.insert(*b) {
                return Err(CoreError::validation(format!("buses[{i}]"), format!("duplicate bus id {b}")));
            }
        }

        for (name, profile) in [("wind_profile", &self.wind_profile), ("solar_profile", &self.solar_profile)] {
            for (t, v) in profile.iter().enumerate() {
                if !v.is_finite() || *v < 0.0 || *v > 1.0 {
                    return Err(CoreError::validation(
                        format!("{name}[{t}]"),
                        format!("availability factor {v} outside [0, 1]"),
                    ));
                }
            }
        }

        let mut line_ids = std::collections::BTreeSet::new();
        for (i, line) in self.lines.iter().enumerate() {
            let field = |sub: &str| format!("lines[{i}].{sub}");
            if !line_ids.insert(line.id) {
                return Err(CoreError::validation(field("id"), format!("duplicate line id {}", line.id)));
            }
            for (sub, bus) in [("from_bus", line.from_bus), ("to_bus", line.to_bus)] {
                if !seen.contains(&bus) {
                    return Err(CoreError::validation(field(sub), format!("references unknown bus {bus}")));
                }
            }
            if line.from_bus == line.to_bus {
                return Err(CoreError::validation(field("to_bus"), "self-loop line"));
            }
            if !line.capacity_mw.is_finite() || line.capacity_mw < 0.0 {
                return Err(CoreError::validation(
                    field("capacity_mw"),
                    format!("capacity {} must be nonnegative and finite", line.capacity_mw),
                ));
            }
            match (line.is_candidate, line.invest_cost_per_mw) {
                (true, None) => {
                    return Err(CoreError::validation(
                        field("invest_cost_per_mw"),
                        "candidate line is missing its investment cost",
                    ))
                }
                (true, Some(c)) | (false, Some(c)) => {
                    if !c.is_finite() || c < 0.0 {
                        return Err(CoreError::validation(
                            field("invest_cost_per_mw"),
                            format!("cost {c} must be nonnegative and finite"),
                        ));
                    }
                }
                (false, None) => {}
            }
        }

        let mut gen_ids = std::collections::BTreeSet::new();
        for (i, gen) in self.generators.iter().enumerate() {
            let field = |sub: &str| format!("generators[{i}].{sub}");
            if !gen_ids.insert(gen.id.clone()) {
                return Err(CoreError::validation(field("id"), format!("duplicate generator id {:?}", gen.id)));
            }
            if !seen.contains(&gen.bus) {
                return Err(CoreError::validation(field("bus"), format!("references unknown bus {}", gen.bus)));
            }
            if !gen.capacity_mw.is_finite() || gen.capacity_mw < 0.0 {
                return Err(CoreError::validation(
                    field("capacity_mw"),
                    format!("capacity {} must be nonnegative and finite", gen.capacity_mw),
                ));
            }
            if !gen.marginal_cost.is_finite() || gen.marginal_cost < 0.0 {
                return Err(CoreError::validation(
                    field("marginal_cost"),
                    format!("cost {} must be nonnegative and finite", gen.marginal_cost),
                ));
            }
        }

        let mut load_ids = std::collections::BTreeSet::new();
        for (i, load) in self.loads.iter().enumerate() {
            let field = |sub: &str| format!("loads[{i}].{sub}");
            if !load_ids.insert(load.id.clone()) {
                return Err(CoreError::validation(field("id"), format!("duplicate load id {:?}", load.id)));
            }
            if !seen.contains(&load.bus) {
                return Err(CoreError::validation(field("bus"), format!("references unknown bus {}", load.bus)));
            }
            if load.profile_mw.len() != horizon {
                return Err(CoreError::validation(
                    field("profile_mw"),
                    format!("profile has {} hours, expected {horizon}", load.profile_mw.len()),
                ));
            }
            for (t, v) in load.profile_mw.iter().enumerate() {
                if !v.is_finite() || *v < 0.0 {
                    return Err(CoreError::validation(
                        format!("loads[{i}].profile_mw[{t}]"),
                        format!("demand {v} must be nonnegative and finite"),
                    ));
                }
            }
        }

        Ok(())
    }
}

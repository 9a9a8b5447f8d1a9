//! Problem container shared by the LP and MILP entry points: variables with
//! bounds and kinds, sparse constraint rows, and a minimization objective.

use std::io::Write;

use crate::error::SolverError;

pub type VarId = usize;
pub type RowId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub name: String,
    /// Sparse coefficients (variable, value); duplicate variables are
    /// merged by `add_row`.
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A mixed-integer linear program, objective sense fixed to minimize.
#[derive(Debug, Clone, Default)]
pub struct MilpProblem {
    pub name: String,
    pub variables: Vec<Variable>,
    pub rows: Vec<Row>,
    /// Dense objective coefficients, one per variable.
    pub objective: Vec<f64>,
    /// Constant added to every reported objective value.
    pub objective_offset: f64,
}

impl MilpProblem {
    pub fn new(name: impl Into<String>) -> Self {
        MilpProblem {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        kind: VarKind,
    ) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
            kind,
        });
        self.objective.push(0.0);
        self.variables.len() - 1
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.add_var(name, lower, upper, VarKind::Continuous)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, 0.0, 1.0, VarKind::Binary)
    }

    /// Adds a row, merging duplicate variable references.
    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> RowId {
        let mut merged: Vec<(VarId, f64)> = Vec::new();
        for (var, coef) in terms {
            match merged.iter_mut().find(|(v, _)| *v == var) {
                Some((_, c)) => *c += coef,
                None => merged.push((var, coef)),
            }
        }
        merged.retain(|(_, c)| *c != 0.0);
        self.rows.push(Row {
            name: name.into(),
            terms: merged,
            sense,
            rhs,
        });
        self.rows.len() - 1
    }

    /// Adds to a variable's objective coefficient.
    pub fn add_objective_term(&mut self, var: VarId, coef: f64) {
        self.objective[var] += coef;
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn binary_vars(&self) -> Vec<VarId> {
        (0..self.variables.len())
            .filter(|&v| self.variables[v].kind == VarKind::Binary)
            .collect()
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        for (i, v) in self.variables.iter().enumerate() {
            if v.lower.is_nan() || v.upper.is_nan() {
                return Err(SolverError::InvalidProblem(format!("variable {i} has NaN bound")));
            }
            if v.lower > v.upper {
                return Err(SolverError::InvalidProblem(format!(
                    "variable {i} ({}) has lower bound {} above upper bound {}",
                    v.name, v.lower, v.upper
                )));
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(SolverError::InvalidProblem(format!(
                    "binary variable {i} ({}) has bounds outside [0, 1]",
                    v.name
                )));
            }
            if !self.objective[i].is_finite() {
                return Err(SolverError::InvalidProblem(format!(
                    "objective coefficient for variable {i} is not finite"
                )));
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(SolverError::InvalidProblem(format!("row {r} has non-finite rhs")));
            }
            for &(var, coef) in &row.terms {
                if var >= self.variables.len() {
                    return Err(SolverError::InvalidProblem(format!(
                        "row {r} references unknown variable {var}"
                    )));
                }
                if !coef.is_finite() {
                    return Err(SolverError::InvalidProblem(format!(
                        "row {r} has non-finite coefficient on variable {var}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Writes the problem in the industry-standard LP text format, a debug
    /// aid for cross-checking against external solvers.
    pub fn write_lp(&self, out: &mut impl Write) -> std::io::Result<()> {
        let ident = |i: usize, name: &str| {
            let clean: String = name
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
                .collect();
            if clean.is_empty() || clean.chars().next().unwrap().is_ascii_digit() {
                format!("v{i}_{clean}")
            } else {
                clean
            }
        };
        writeln!(out, "\\ {}", self.name)?;
        writeln!(out, "Minimize")?;
        write!(out, " obj:")?;
        let mut first = true;
        for (i, &c) in self.objective.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            write!(out, " {}{} {}", if c >= 0.0 && !first { "+ " } else if c < 0.0 { "- " } else { "" }, fmt_coef(c.abs()), ident(i, &self.variables[i].name))?;
            first = false;
        }
        if first {
            write!(out, " 0")?;
        }
        writeln!(out)?;
        writeln!(out, "Subject To")?;
        for (r, row) in self.rows.iter().enumerate() {
            write!(out, " r{r}:")?;
            let mut first = true;
            for &(var, coef) in &row.terms {
                write!(out, " {}{} {}", if coef >= 0.0 && !first { "+ " } else if coef < 0.0 { "- " } else { "" }, fmt_coef(coef.abs()), ident(var, &self.variables[var].name))?;
                first = false;
            }
            if first {
                write!(out, " 0")?;
            }
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Eq => "=",
                Sense::Ge => ">=",
            };
            writeln!(out, " {op} {}", fmt_coef(row.rhs))?;
        }
        writeln!(out, "Bounds")?;
        for (i, v) in self.variables.iter().enumerate() {
            let name = ident(i, &v.name);
            match (v.lower.is_finite(), v.upper.is_finite()) {
                (true, true) if v.lower == v.upper => writeln!(out, " {name} = {}", fmt_coef(v.lower))?,
                (true, true) => writeln!(out, " {} <= {name} <= {}", fmt_coef(v.lower), fmt_coef(v.upper))?,
                (true, false) => writeln!(out, " {name} >= {}", fmt_coef(v.lower))?,
                (false, true) => writeln!(out, " -inf <= {name} <= {}", fmt_coef(v.upper))?,
                (false, false) => writeln!(out, " {name} free")?,
            }
        }
        let binaries = self.binary_vars();
        if !binaries.is_empty() {
            writeln!(out, "Binaries")?;
            for b in binaries {
                writeln!(out, " {}", ident(b, &self.variables[b].name))?;
            }
        }
        writeln!(out, "End")
    }
}

fn fmt_coef(c: f64) -> String {
    format!("{c}")
}

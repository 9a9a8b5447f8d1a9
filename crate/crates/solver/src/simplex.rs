//! Bounded-variable revised simplex over a scaled computational form.
//!
//! The solve works on `A x + s = b` with per-column bounds; slacks encode
//! the row senses. Infeasibility is removed by a composite phase 1 that
//! minimizes the total bound violation of basic variables (no artificial
//! columns, so any basis — warm starts included — is a legal entry state),
//! then phase 2 optimizes the true costs. The basis inverse is kept as a
//! sparse LU plus product-form eta updates with periodic refactorization.
//! Pricing is Dantzig with a Bland fallback after a degenerate streak.

use std::time::Instant;

use crate::error::SolverError;
use crate::lu::{LuFactors, SparseCol};
use crate::problem::{MilpProblem, Sense};
use crate::solution::{MilpSolution, SolveStatus};

pub(crate) const FEAS_TOL: f64 = 1e-7;
const DUAL_TOL: f64 = 1e-8;
const PIVOT_TOL: f64 = 1e-9;
const DEGEN_TOL: f64 = 1e-10;
const DEGEN_STREAK_LIMIT: u32 = 40;
const REFACTOR_INTERVAL: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarState {
    Basic(u32),
    AtLower,
    AtUpper,
    Free,
}

/// Basis of a finished solve, reusable to warm start a related one.
#[derive(Debug, Clone)]
pub struct BasisSnapshot {
    pub state: Vec<VarState>,
    pub basic: Vec<usize>,
}

#[derive(Debug)]
pub(crate) struct LpOutcome {
    pub status: SolveStatus,
    /// Structural variable values in original units.
    pub x: Vec<f64>,
    /// Objective including the problem offset.
    pub objective: f64,
    /// Dual objective of the final basis (same units); equals the primal
    /// objective at a clean optimum.
    pub dual_objective: f64,
    pub iterations: u64,
    pub basis: Option<BasisSnapshot>,
}

impl LpOutcome {
    fn no_solution(status: SolveStatus, n: usize, iterations: u64) -> Self {
        LpOutcome {
            status,
            x: vec![0.0; n],
            objective: f64::INFINITY,
            dual_objective: f64::NEG_INFINITY,
            iterations,
            basis: None,
        }
    }
}

/// The scaled computational form, built once per problem and shared across
/// the many bound-modified solves branch-and-bound performs.
pub(crate) struct CoreLp {
    pub m: usize,
    /// Structural variable count.
    pub n: usize,
    /// n structural + m slack columns, scaled.
    cols: Vec<SparseCol>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    col_scale: Vec<f64>,
    obj_offset: f64,
}

fn pow2_round(x: f64) -> f64 {
    if x <= 0.0 || !x.is_finite() {
        return 1.0;
    }
    (2.0f64).powi(x.log2().round() as i32)
}

impl CoreLp {
    pub fn from_problem(p: &MilpProblem) -> Result<CoreLp, SolverError> {
        p.validate()?;
        let m = p.rows.len();
        let n = p.variables.len();

        // Geometric equilibration, snapped to powers of two so the scaling
        // itself is exact. Big-M rows mix coefficient magnitudes of 1 and
        // ~1e6; without this the ratio tests churn.
        let mut row_scale = vec![1.0f64; m];
        let mut col_scale = vec![1.0f64; n];
        for _ in 0..2 {
            for (i, row) in p.rows.iter().enumerate() {
                let mut lo = f64::INFINITY;
                let mut hi = 0.0f64;
                for &(v, a) in &row.terms {
                    let x = (a * row_scale[i] * col_scale[v]).abs();
                    if x > 0.0 {
                        lo = lo.min(x);
                        hi = hi.max(x);
                    }
                }
                if hi > 0.0 {
                    row_scale[i] *= pow2_round(1.0 / (lo * hi).sqrt());
                }
            }
            let mut col_lo = vec![f64::INFINITY; n];
            let mut col_hi = vec![0.0f64; n];
            for (i, row) in p.rows.iter().enumerate() {
                for &(v, a) in &row.terms {
                    let x = (a * row_scale[i] * col_scale[v]).abs();
                    if x > 0.0 {
                        col_lo[v] = col_lo[v].min(x);
                        col_hi[v] = col_hi[v].max(x);
                    }
                }
            }
            for v in 0..n {
                if col_hi[v] > 0.0 {
                    col_scale[v] *= pow2_round(1.0 / (col_lo[v] * col_hi[v]).sqrt());
                }
            }
        }

        let total = n + m;
        let mut cols: Vec<SparseCol> = Vec::with_capacity(total);
        for _ in 0..n {
            cols.push(Vec::new());
        }
        for (i, row) in p.rows.iter().enumerate() {
            for &(v, a) in &row.terms {
                cols[v].push((i, a * row_scale[i] * col_scale[v]));
            }
        }
        // Slack for row i: coefficient 1 after giving it scale 1/row_scale.
        for i in 0..m {
            cols.push(vec![(i, 1.0)]);
        }

        let mut lower = Vec::with_capacity(total);
        let mut upper = Vec::with_capacity(total);
        let mut cost = Vec::with_capacity(total);
        for (v, var) in p.variables.iter().enumerate() {
            lower.push(var.lower / col_scale[v]);
            upper.push(var.upper / col_scale[v]);
            cost.push(p.objective[v] * col_scale[v]);
        }
        let mut full_col_scale = col_scale.clone();
        for i in 0..m {
            let (lo, hi) = match p.rows[i].sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            // Slack value is scaled by row_scale (its column scale is the
            // inverse); the sign pattern of its bounds is unaffected.
            lower.push(lo);
            upper.push(hi);
            cost.push(0.0);
            full_col_scale.push(1.0 / row_scale[i]);
        }
        let rhs = (0..m).map(|i| p.rows[i].rhs * row_scale[i]).collect();

        Ok(CoreLp {
            m,
            n,
            cols,
            lower,
            upper,
            cost,
            rhs,
            col_scale: full_col_scale,
            obj_offset: p.objective_offset,
        })
    }

    pub fn total_cols(&self) -> usize {
        self.n + self.m
    }

    /// Solves with per-variable bound overrides (original units) and an
    /// optional warm-start basis.
    pub fn solve(
        &self,
        overrides: &[(usize, f64, f64)],
        warm: Option<&BasisSnapshot>,
        deadline: Option<Instant>,
    ) -> LpOutcome {
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        for &(v, lo, hi) in overrides {
            debug_assert!(v < self.n);
            lower[v] = lo / self.col_scale[v];
            upper[v] = hi / self.col_scale[v];
        }
        let mut sim = Simplex::new(self, lower, upper, warm);
        sim.run(deadline)
    }
}

struct Eta {
    pos: usize,
    pivot: f64,
    /// (position, w value) for positions other than `pos`.
    terms: Vec<(usize, f64)>,
}

struct Simplex<'a> {
    lp: &'a CoreLp,
    lower: Vec<f64>,
    upper: Vec<f64>,
    state: Vec<VarState>,
    basic: Vec<usize>,
    xb: Vec<f64>,
    lu: Option<LuFactors>,
    etas: Vec<Eta>,
    iterations: u64,
    bland: bool,
    degen_streak: u32,
    resets: u32,
}

enum Ratio {
    Unbounded,
    /// The entering variable hits its own far bound first.
    BoundFlip(f64),
    /// (step, basis position, leaves at upper?)
    Pivot(f64, usize, bool),
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a CoreLp, lower: Vec<f64>, upper: Vec<f64>, warm: Option<&BasisSnapshot>) -> Self {
        let total = lp.total_cols();
        let mut sim = Simplex {
            lp,
            lower,
            upper,
            state: Vec::new(),
            basic: Vec::new(),
            xb: vec![0.0; lp.m],
            lu: None,
            etas: Vec::new(),
            iterations: 0,
            bland: false,
            degen_streak: 0,
            resets: 0,
        };
        match warm {
            Some(snapshot) if snapshot.state.len() == total && snapshot.basic.len() == lp.m => {
                sim.state = snapshot.state.clone();
                sim.basic = snapshot.basic.clone();
                // Nonbasic states must match finite bounds after overrides.
                for j in 0..total {
                    sim.normalize_nonbasic(j);
                }
            }
            _ => sim.reset_to_slack_basis(),
        }
        sim
    }

    fn reset_to_slack_basis(&mut self) {
        let total = self.lp.total_cols();
        self.state = (0..total).map(|_| VarState::AtLower).collect();
        for j in 0..total {
            self.normalize_nonbasic(j);
        }
        self.basic = (0..self.lp.m).map(|i| self.lp.n + i).collect();
        for (pos, &j) in self.basic.iter().enumerate() {
            self.state[j] = VarState::Basic(pos as u32);
        }
        self.etas.clear();
        self.lu = None;
    }

    /// Ensures a nonbasic state refers to a finite bound.
    fn normalize_nonbasic(&mut self, j: usize) {
        if matches!(self.state[j], VarState::Basic(_)) {
            return;
        }
        let lo = self.lower[j];
        let hi = self.upper[j];
        self.state[j] = match self.state[j] {
            VarState::AtLower if lo.is_finite() => VarState::AtLower,
            VarState::AtUpper if hi.is_finite() => VarState::AtUpper,
            _ => {
                if lo.is_finite() {
                    VarState::AtLower
                } else if hi.is_finite() {
                    VarState::AtUpper
                } else {
                    VarState::Free
                }
            }
        };
    }

    fn nb_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtLower => self.lower[j],
            VarState::AtUpper => self.upper[j],
            VarState::Free => 0.0,
            VarState::Basic(_) => unreachable!("nonbasic value of a basic variable"),
        }
    }

    fn refactor(&mut self) -> bool {
        let cols: Vec<&SparseCol> = self.basic.iter().map(|&j| &self.lp.cols[j]).collect();
        match LuFactors::factor(self.lp.m, &cols) {
            Some(lu) => {
                self.lu = Some(lu);
                self.etas.clear();
                true
            }
            None => false,
        }
    }

    /// Factorizes if needed and recomputes basic values from scratch.
    fn ensure_factorized(&mut self) -> Result<(), SolveStatus> {
        if self.lu.is_some() {
            return Ok(());
        }
        if !self.refactor() {
            // Singular warm basis: fall back to the slack basis once.
            if self.resets >= 2 {
                return Err(SolveStatus::NumericalFailure);
            }
            self.resets += 1;
            self.reset_to_slack_basis();
            if !self.refactor() {
                return Err(SolveStatus::NumericalFailure);
            }
        }
        self.recompute_xb();
        Ok(())
    }

    fn ftran(&self, v: &mut [f64]) {
        self.lu.as_ref().expect("factorized").ftran(v);
        for eta in &self.etas {
            let t = v[eta.pos] / eta.pivot;
            if t != 0.0 {
                v[eta.pos] = t;
                for &(i, wi) in &eta.terms {
                    v[i] -= wi * t;
                }
            } else {
                v[eta.pos] = 0.0;
            }
        }
    }

    fn btran(&self, v: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut s = v[eta.pos];
            for &(i, wi) in &eta.terms {
                s -= wi * v[i];
            }
            v[eta.pos] = s / eta.pivot;
        }
        self.lu.as_ref().expect("factorized").btran(v);
    }

    fn recompute_xb(&mut self) {
        let mut r = self.lp.rhs.clone();
        for j in 0..self.lp.total_cols() {
            if matches!(self.state[j], VarState::Basic(_)) {
                continue;
            }
            let v = self.nb_value(j);
            if v != 0.0 {
                for &(row, a) in &self.lp.cols[j] {
                    r[row] -= a * v;
                }
            }
        }
        self.ftran(&mut r);
        self.xb.copy_from_slice(&r);
    }

    /// Total and maximum bound violation over basic variables.
    fn infeasibility(&self) -> (f64, f64) {
        let mut total = 0.0;
        let mut max = 0.0f64;
        for (pos, &j) in self.basic.iter().enumerate() {
            let x = self.xb[pos];
            let v = (self.lower[j] - x).max(0.0) + (x - self.upper[j]).max(0.0);
            total += v;
            max = max.max(v);
        }
        (total, max)
    }

    /// One simplex phase. `phase1` selects the composite infeasibility
    /// objective; otherwise the true costs are used.
    fn run_phase(&mut self, phase1: bool, deadline: Option<Instant>) -> Result<(), SolveStatus> {
        let total = self.lp.total_cols();
        let max_iters = 20_000 + 40 * (self.lp.m as u64 + total as u64);
        let mut cost = vec![0.0f64; total];
        let mut y = vec![0.0f64; self.lp.m];

        loop {
            if self.iterations > max_iters {
                return Err(SolveStatus::NumericalFailure);
            }
            if self.iterations % 128 == 0 {
                if let Some(d) = deadline {
                    if Instant::now() > d {
                        return Err(SolveStatus::TimeLimit);
                    }
                }
            }
            if self.etas.len() >= REFACTOR_INTERVAL {
                if !self.refactor() {
                    return Err(SolveStatus::NumericalFailure);
                }
                self.recompute_xb();
            }

            // Objective for this iteration.
            if phase1 {
                let (_, max_violation) = self.infeasibility();
                if max_violation <= FEAS_TOL {
                    return Ok(());
                }
                cost.iter_mut().for_each(|c| *c = 0.0);
                for (pos, &j) in self.basic.iter().enumerate() {
                    let x = self.xb[pos];
                    if x < self.lower[j] - FEAS_TOL {
                        cost[j] = -1.0;
                    } else if x > self.upper[j] + FEAS_TOL {
                        cost[j] = 1.0;
                    }
                }
            } else {
                cost.copy_from_slice(&self.lp.cost);
            }

            // Duals.
            for (pos, &j) in self.basic.iter().enumerate() {
                y[pos] = cost[j];
            }
            self.btran(&mut y);

            // Pricing.
            let mut entering: Option<(usize, f64, i8)> = None;
            for j in 0..total {
                if matches!(self.state[j], VarState::Basic(_)) || self.lower[j] >= self.upper[j] {
                    continue;
                }
                let mut d = cost[j];
                for &(row, a) in &self.lp.cols[j] {
                    d -= a * y[row];
                }
                let dir: i8 = match self.state[j] {
                    VarState::AtLower if d < -DUAL_TOL => 1,
                    VarState::AtUpper if d > DUAL_TOL => -1,
                    VarState::Free if d < -DUAL_TOL => 1,
                    VarState::Free if d > DUAL_TOL => -1,
                    _ => continue,
                };
                if self.bland {
                    entering = Some((j, d, dir));
                    break;
                }
                match entering {
                    Some((_, best, _)) if d.abs() <= best.abs() => {}
                    _ => entering = Some((j, d, dir)),
                }
            }

            let Some((enter, _d, dir)) = entering else {
                if phase1 {
                    let (_, max_violation) = self.infeasibility();
                    return if max_violation <= FEAS_TOL {
                        Ok(())
                    } else {
                        Err(SolveStatus::Infeasible)
                    };
                }
                return Ok(());
            };

            // Direction of basic movement: x_B -= dir * t * w.
            let mut w = vec![0.0f64; self.lp.m];
            for &(row, a) in &self.lp.cols[enter] {
                w[row] = a;
            }
            self.ftran(&mut w);

            let ratio = self.ratio_test(enter, dir, &w, phase1);
            match ratio {
                Ratio::Unbounded => {
                    return Err(if phase1 {
                        SolveStatus::NumericalFailure
                    } else {
                        SolveStatus::Unbounded
                    })
                }
                Ratio::BoundFlip(theta) => {
                    let dirf = dir as f64;
                    for pos in 0..self.lp.m {
                        if w[pos] != 0.0 {
                            self.xb[pos] -= dirf * theta * w[pos];
                        }
                    }
                    self.state[enter] = match self.state[enter] {
                        VarState::AtLower => VarState::AtUpper,
                        VarState::AtUpper => VarState::AtLower,
                        other => other,
                    };
                    self.note_progress(theta);
                }
                Ratio::Pivot(theta, p, leaves_at_upper) => {
                    let dirf = dir as f64;
                    let entering_value = self.nb_value(enter) + dirf * theta;
                    for pos in 0..self.lp.m {
                        if w[pos] != 0.0 {
                            self.xb[pos] -= dirf * theta * w[pos];
                        }
                    }
                    let leaving = self.basic[p];
                    self.state[leaving] = if self.lower[leaving] >= self.upper[leaving] {
                        VarState::AtLower
                    } else if leaves_at_upper {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                    self.normalize_nonbasic(leaving);
                    self.basic[p] = enter;
                    self.state[enter] = VarState::Basic(p as u32);
                    self.xb[p] = entering_value;

                    let mut terms: Vec<(usize, f64)> = Vec::with_capacity(8);
                    let mut wmax = 0.0f64;
                    for (pos, &wv) in w.iter().enumerate() {
                        if pos != p && wv.abs() > 1e-12 {
                            terms.push((pos, wv));
                        }
                        wmax = wmax.max(wv.abs());
                    }
                    let pivot = w[p];
                    self.etas.push(Eta { pos: p, pivot, terms });
                    // A feeble pivot poisons the product form; refactor it away.
                    if pivot.abs() < 1e-7 * wmax.max(1.0) {
                        if !self.refactor() {
                            return Err(SolveStatus::NumericalFailure);
                        }
                        self.recompute_xb();
                    }
                    self.note_progress(theta);
                }
            }
            self.iterations += 1;
        }
    }

    fn note_progress(&mut self, theta: f64) {
        if theta <= DEGEN_TOL {
            self.degen_streak += 1;
            if self.degen_streak > DEGEN_STREAK_LIMIT {
                self.bland = true;
            }
        } else {
            self.degen_streak = 0;
            self.bland = false;
        }
    }

    fn ratio_test(&self, enter: usize, dir: i8, w: &[f64], phase1: bool) -> Ratio {
        let dirf = dir as f64;
        let mut best_theta = f64::INFINITY;
        let mut blocker: Option<(usize, bool, f64)> = None; // (pos, at_upper, |w|)

        // The entering variable's own span.
        let span = self.upper[enter] - self.lower[enter];
        if span.is_finite() {
            best_theta = span;
        }

        for (pos, &wv) in w.iter().enumerate() {
            if wv.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basic[pos];
            let x = self.xb[pos];
            let rate = -dirf * wv; // d x_Bpos / d theta
            let lo = self.lower[j];
            let hi = self.upper[j];

            let (theta, at_upper) = if phase1 && x < lo - FEAS_TOL {
                // Violated below: blocks only when climbing into range.
                if rate > 0.0 {
                    ((lo - x) / rate, false)
                } else {
                    continue;
                }
            } else if phase1 && x > hi + FEAS_TOL {
                if rate < 0.0 {
                    ((x - hi) / -rate, true)
                } else {
                    continue;
                }
            } else if rate > 0.0 {
                if hi.is_finite() {
                    (((hi - x) / rate).max(0.0), true)
                } else {
                    continue;
                }
            } else {
                if lo.is_finite() {
                    (((x - lo) / -rate).max(0.0), false)
                } else {
                    continue;
                }
            };
            let theta = theta.max(0.0);

            const TIE: f64 = 1e-10;
            let take = if theta < best_theta - TIE {
                true
            } else if theta <= best_theta + TIE {
                match blocker {
                    // Tie against the entering variable's own bound flip:
                    // keep the flip, it avoids a basis change.
                    None => false,
                    Some((bpos, _, bw)) => {
                        if self.bland {
                            self.basic[pos] < self.basic[bpos]
                        } else {
                            wv.abs() > bw
                        }
                    }
                }
            } else {
                false
            };
            if take {
                best_theta = best_theta.min(theta);
                blocker = Some((pos, at_upper, wv.abs()));
            }
        }

        match blocker {
            None if best_theta.is_infinite() => Ratio::Unbounded,
            None => Ratio::BoundFlip(best_theta),
            Some((pos, at_upper, _)) => Ratio::Pivot(best_theta, pos, at_upper),
        }
    }

    /// Residual check in scaled space; used before declaring optimality.
    fn max_residual(&self) -> f64 {
        let mut r = self.lp.rhs.clone();
        for j in 0..self.lp.total_cols() {
            let v = match self.state[j] {
                VarState::Basic(pos) => self.xb[pos as usize],
                _ => self.nb_value(j),
            };
            if v != 0.0 {
                for &(row, a) in &self.lp.cols[j] {
                    r[row] -= a * v;
                }
            }
        }
        r.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    fn run(&mut self, deadline: Option<Instant>) -> LpOutcome {
        let n = self.lp.n;
        if let Err(status) = self.ensure_factorized() {
            return LpOutcome::no_solution(status, n, self.iterations);
        }

        for attempt in 0..2 {
            let phase1 = self.run_phase(true, deadline);
            if let Err(status) = phase1 {
                return LpOutcome::no_solution(status, n, self.iterations);
            }
            let phase2 = self.run_phase(false, deadline);
            match phase2 {
                Ok(()) => {}
                Err(status) => return LpOutcome::no_solution(status, n, self.iterations),
            }
            // Sanity: residual and feasibility drift. One repair attempt.
            if self.refactor() {
                self.recompute_xb();
            }
            let (_, max_violation) = self.infeasibility();
            if self.max_residual() <= 1e-6 && max_violation <= 1e-6 {
                break;
            }
            if attempt == 1 {
                return LpOutcome::no_solution(SolveStatus::NumericalFailure, n, self.iterations);
            }
        }

        self.finish()
    }

    fn finish(&mut self) -> LpOutcome {
        let total = self.lp.total_cols();
        // Scaled solution values for every column.
        let mut x_scaled = vec![0.0f64; total];
        for j in 0..total {
            x_scaled[j] = match self.state[j] {
                VarState::Basic(pos) => self.xb[pos as usize],
                _ => self.nb_value(j),
            };
        }

        let mut primal = 0.0;
        for j in 0..total {
            primal += self.lp.cost[j] * x_scaled[j];
        }

        // Dual objective of the final basis: y b + sum over nonbasic of
        // d_j x_j. With exact arithmetic this equals the primal objective
        // for any basis; the gap measures accumulated numerical error.
        let mut y = vec![0.0f64; self.lp.m];
        for (pos, &j) in self.basic.iter().enumerate() {
            y[pos] = self.lp.cost[j];
        }
        self.btran(&mut y);
        let mut dual = 0.0;
        for i in 0..self.lp.m {
            dual += y[i] * self.lp.rhs[i];
        }
        for j in 0..total {
            if matches!(self.state[j], VarState::Basic(_)) {
                continue;
            }
            let xv = x_scaled[j];
            if xv == 0.0 {
                continue;
            }
            let mut d = self.lp.cost[j];
            for &(row, a) in &self.lp.cols[j] {
                d -= a * y[row];
            }
            dual += d * xv;
        }

        let x: Vec<f64> = (0..self.lp.n).map(|j| x_scaled[j] * self.lp.col_scale[j]).collect();

        LpOutcome {
            status: SolveStatus::Optimal,
            x,
            objective: primal + self.lp.obj_offset,
            dual_objective: dual + self.lp.obj_offset,
            iterations: self.iterations,
            basis: Some(BasisSnapshot {
                state: self.state.clone(),
                basic: self.basic.clone(),
            }),
        }
    }
}

/// Solves the LP relaxation of a problem (integrality dropped).
pub fn solve_lp(problem: &MilpProblem) -> Result<MilpSolution, SolverError> {
    let start = Instant::now();
    let core = CoreLp::from_problem(problem)?;
    let outcome = core.solve(&[], None, None);
    Ok(lp_outcome_to_solution(outcome, start))
}

/// A reusable LP: scaled once, then solved many times under different
/// variable-bound overrides, optionally warm-starting each solve from a
/// previous basis. This is the cheap path for sweeping families of related
/// LPs (branch-and-bound nodes, configuration enumerations).
pub struct LpEngine {
    core: CoreLp,
}

/// One engine solve: the solution plus the final basis for chaining.
pub struct EngineSolve {
    pub solution: MilpSolution,
    pub basis: Option<BasisSnapshot>,
}

impl LpEngine {
    pub fn new(problem: &MilpProblem) -> Result<LpEngine, SolverError> {
        Ok(LpEngine { core: CoreLp::from_problem(problem)? })
    }

    /// Solves with `(variable, lower, upper)` overrides in original units.
    pub fn solve(
        &self,
        overrides: &[(usize, f64, f64)],
        warm: Option<&BasisSnapshot>,
    ) -> EngineSolve {
        let start = Instant::now();
        let outcome = self.core.solve(overrides, warm, None);
        let basis = outcome.basis.clone();
        EngineSolve { solution: lp_outcome_to_solution(outcome, start), basis }
    }
}

pub(crate) fn lp_outcome_to_solution(outcome: LpOutcome, start: Instant) -> MilpSolution {
    MilpSolution {
        status: outcome.status,
        objective: outcome.objective,
        best_bound: if outcome.status == SolveStatus::Optimal {
            outcome.objective
        } else {
            f64::NEG_INFINITY
        },
        rel_gap: if outcome.status == SolveStatus::Optimal { 0.0 } else { f64::INFINITY },
        values: outcome.x,
        node_count: 0,
        wall_time: start.elapsed(),
        dual_objective: outcome.dual_objective,
        simplex_iterations: outcome.iterations,
        trace: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{MilpProblem, Sense};

    #[test]
    fn one_dimensional_maximization() {
        let mut p = MilpProblem::new("1d");
        let x = p.add_continuous("x", 0.0, f64::INFINITY);
        p.add_objective_term(x, -1.0);
        p.add_row("cap", [(x, 1.0)], Sense::Le, 3.0);
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.values[x] - 3.0).abs() < 1e-9);
        assert!((sol.objective + 3.0).abs() < 1e-9);
        assert!((sol.objective - sol.dual_objective).abs() <= 1e-7 * (1.0 + sol.objective.abs()));
    }

    #[test]
    fn infeasible_box_is_detected() {
        let mut p = MilpProblem::new("empty");
        let x = p.add_continuous("x", 0.0, f64::INFINITY);
        p.add_row("lo", [(x, 1.0)], Sense::Ge, 2.0);
        p.add_row("hi", [(x, 1.0)], Sense::Le, 1.0);
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray_is_detected() {
        let mut p = MilpProblem::new("ray");
        let x = p.add_continuous("x", 0.0, f64::INFINITY);
        p.add_objective_term(x, -1.0);
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, SolveStatus::Unbounded);
    }

    #[test]
    fn equality_and_free_variables() {
        // min x + y s.t. x + y = 4, x - y = 1, both free.
        let mut p = MilpProblem::new("eq");
        let x = p.add_continuous("x", f64::NEG_INFINITY, f64::INFINITY);
        let y = p.add_continuous("y", f64::NEG_INFINITY, f64::INFINITY);
        p.add_objective_term(x, 1.0);
        p.add_objective_term(y, 1.0);
        p.add_row("sum", [(x, 1.0), (y, 1.0)], Sense::Eq, 4.0);
        p.add_row("diff", [(x, 1.0), (y, -1.0)], Sense::Eq, 1.0);
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.values[x] - 2.5).abs() < 1e-8);
        assert!((sol.values[y] - 1.5).abs() < 1e-8);
    }

    #[test]
    fn upper_bounded_variables_flip() {
        // max x1 + x2 with x1 <= 1, x2 <= 2 and x1 + x2 <= 2.5.
        let mut p = MilpProblem::new("flip");
        let x1 = p.add_continuous("x1", 0.0, 1.0);
        let x2 = p.add_continuous("x2", 0.0, 2.0);
        p.add_objective_term(x1, -1.0);
        p.add_objective_term(x2, -1.0);
        p.add_row("cap", [(x1, 1.0), (x2, 1.0)], Sense::Le, 2.5);
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective + 2.5).abs() < 1e-8, "objective {}", sol.objective);
    }

    #[test]
    fn warm_start_reuses_basis() {
        let mut p = MilpProblem::new("warm");
        let x = p.add_continuous("x", 0.0, 10.0);
        let y = p.add_continuous("y", 0.0, 10.0);
        p.add_objective_term(x, 1.0);
        p.add_objective_term(y, 2.0);
        p.add_row("need", [(x, 1.0), (y, 1.0)], Sense::Ge, 4.0);
        let core = CoreLp::from_problem(&p).unwrap();
        let first = core.solve(&[], None, None);
        assert_eq!(first.status, SolveStatus::Optimal);
        let warm = first.basis.unwrap();
        // Tighten x's upper bound and re-solve from the old basis.
        let second = core.solve(&[(x, 0.0, 1.0)], Some(&warm), None);
        assert_eq!(second.status, SolveStatus::Optimal);
        assert!((second.x[x] - 1.0).abs() < 1e-8);
        assert!((second.x[y] - 3.0).abs() < 1e-8);
        assert!(second.iterations <= first.iterations + 4, "warm start took {} iters", second.iterations);
    }
}

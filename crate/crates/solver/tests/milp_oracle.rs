//! MILP correctness against brute force: every instance small enough to
//! enumerate all 2^k binary fixings is solved both ways and the objectives
//! must agree.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use gridplan_solver::{
    fix_binaries_and_solve, solve_milp, MilpProblem, Sense, SolveOptions, SolveStatus,
};

/// Random MILP with `k` binaries, `nc` continuous variables and `rows`
/// constraints. Bounded by construction.
pub fn random_milp(rng: &mut ChaCha8Rng, k: usize, nc: usize, rows: usize) -> MilpProblem {
    let mut p = MilpProblem::new("rand-milp");
    let mut vars = Vec::new();
    for i in 0..k {
        vars.push(p.add_binary(format!("y{i}")));
    }
    for i in 0..nc {
        let lo = rng.gen_range(-2.0..0.0);
        let hi = lo + rng.gen_range(0.5..6.0);
        vars.push(p.add_continuous(format!("x{i}"), lo, hi));
    }
    for &v in &vars {
        if rng.gen_bool(0.8) {
            p.add_objective_term(v, rng.gen_range(-3.0..3.0));
        }
    }
    for r in 0..rows {
        let mut terms: Vec<(usize, f64)> = Vec::new();
        for &v in &vars {
            if rng.gen_bool(0.5) {
                terms.push((v, rng.gen_range(-2.0..2.0)));
            }
        }
        if terms.is_empty() {
            continue;
        }
        // Mostly inequalities with roomy right-hand sides; equalities
        // over-constrain tiny instances into infeasibility.
        let (sense, rhs) = match rng.gen_range(0..6) {
            0 | 1 | 2 => (Sense::Le, rng.gen_range(0.5..4.0)),
            3 | 4 => (Sense::Ge, rng.gen_range(-4.0..0.0)),
            _ => (Sense::Eq, rng.gen_range(-0.5..1.0)),
        };
        p.add_row(format!("r{r}"), terms, sense, rhs);
    }
    p
}

/// Exhaustive oracle: best objective over all binary fixings, each completed
/// by an LP solve.
pub fn enumeration_optimum(p: &MilpProblem) -> Option<f64> {
    let binaries = p.binary_vars();
    let k = binaries.len();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << k) {
        let assignment: Vec<(usize, bool)> = binaries
            .iter()
            .enumerate()
            .map(|(i, &b)| (b, mask >> i & 1 == 1))
            .collect();
        let sol = fix_binaries_and_solve(p, &assignment).unwrap();
        if sol.status == SolveStatus::Optimal {
            best = Some(match best {
                Some(b) => b.min(sol.objective),
                None => sol.objective,
            });
        }
    }
    best
}

#[test]
fn twenty_random_milps_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut feasible_seen = 0;
    for trial in 0..20 {
        let k = 2 + trial % 7;
        let p = random_milp(&mut rng, k, 2 + trial % 4, 3 + trial % 5);
        let opts = SolveOptions { rel_gap: 0.0, ..Default::default() };
        let sol = solve_milp(&p, &opts).unwrap();
        let oracle = enumeration_optimum(&p);
        match oracle {
            None => assert_eq!(sol.status, SolveStatus::Infeasible, "trial {trial}"),
            Some(best) => {
                assert!(sol.status.has_solution(), "trial {trial}: {:?}", sol.status);
                assert!(
                    (sol.objective - best).abs() <= 1e-6 * (1.0 + best.abs()),
                    "trial {trial}: solver {} vs oracle {best}",
                    sol.objective
                );
                feasible_seen += 1;
            }
        }
    }
    assert!(feasible_seen >= 10, "too few feasible instances: {feasible_seen}");
}

#[test]
fn gap_zero_runs_prove_optimality() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = random_milp(&mut rng, 6, 3, 6);
    let opts = SolveOptions { rel_gap: 0.0, ..Default::default() };
    let sol = solve_milp(&p, &opts).unwrap();
    if sol.status.has_solution() {
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(sol.rel_gap <= 1e-9);
        assert!((sol.best_bound - sol.objective).abs() <= 1e-9 * (1.0 + sol.objective.abs()));
    }
}

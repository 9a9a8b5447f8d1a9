//! Sparse LU factorization of a simplex basis with threshold partial
//! pivoting, plus the forward/backward transformations (FTRAN/BTRAN)
//! against it. Columns are factored sparsest-first, which keeps the
//! near-triangular bases of network-structured problems almost fill-free.

/// A sparse column: (row, value) pairs.
pub type SparseCol = Vec<(usize, f64)>;

const SINGULAR_TOL: f64 = 1e-11;

/// LU factors of a basis matrix B, with row pivoting and a column order.
///
/// In factored terms: for k = 0..m, column `col_order[k]` of B was reduced
/// by the first k elimination steps; `pivot_row[k]` holds its pivot.
/// L is unit lower triangular (entries stored per elimination step at
/// not-yet-pivoted rows), U upper triangular (entries at earlier pivots).
pub struct LuFactors {
    m: usize,
    /// Elimination step -> basis position it factored.
    col_order: Vec<usize>,
    /// Elimination step -> pivot row.
    pivot_row: Vec<usize>,
    /// L entries per step: (row, multiplier) for rows eliminated later.
    lower: Vec<Vec<(usize, f64)>>,
    /// U off-diagonal entries per step: (earlier step index, value).
    upper: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
    /// row -> elimination step that pivoted it.
    row_step: Vec<usize>,
}

impl LuFactors {
    /// Factors the matrix whose columns are `cols[basic[p]]` for each basis
    /// position p. Returns None if the basis is numerically singular.
    pub fn factor(m: usize, basis_cols: &[&SparseCol]) -> Option<LuFactors> {
        assert_eq!(basis_cols.len(), m);
        // Sparsest columns first: slacks and singletons form the identity
        // part without fill.
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&p| (basis_cols[p].len(), p));

        let mut lu = LuFactors {
            m,
            col_order: Vec::with_capacity(m),
            pivot_row: Vec::with_capacity(m),
            lower: Vec::with_capacity(m),
            upper: Vec::with_capacity(m),
            diag: Vec::with_capacity(m),
            row_step: vec![usize::MAX; m],
        };

        let mut work = vec![0.0f64; m];
        let mut mark = vec![false; m];
        let mut touched: Vec<usize> = Vec::with_capacity(64);

        for &pos in &order {
            // Scatter the column.
            for &(row, val) in basis_cols[pos] {
                if !mark[row] {
                    mark[row] = true;
                    touched.push(row);
                }
                work[row] += val;
            }
            // Apply prior elimination steps in order. Only steps whose pivot
            // row currently holds a nonzero matter.
            for k in 0..lu.col_order.len() {
                let pr = lu.pivot_row[k];
                let x = work[pr];
                if x == 0.0 {
                    continue;
                }
                for &(row, mult) in &lu.lower[k] {
                    if !mark[row] {
                        mark[row] = true;
                        touched.push(row);
                    }
                    work[row] -= mult * x;
                }
            }
            // Split into U part (pivoted rows) and the remainder; pick the
            // largest remaining entry as pivot.
            let mut u_entries: Vec<(usize, f64)> = Vec::new();
            let mut rest: Vec<(usize, f64)> = Vec::new();
            let mut best: Option<(usize, f64)> = None;
            for &row in &touched {
                let val = work[row];
                if val == 0.0 {
                    continue;
                }
                let step = lu.row_step[row];
                if step != usize::MAX {
                    u_entries.push((step, val));
                } else {
                    rest.push((row, val));
                    match best {
                        Some((_, b)) if val.abs() <= b.abs() => {}
                        _ => best = Some((row, val)),
                    }
                }
            }
            for &row in &touched {
                work[row] = 0.0;
                mark[row] = false;
            }
            touched.clear();

            let (prow, pval) = best?;
            if pval.abs() < SINGULAR_TOL {
                return None;
            }
            let k = lu.col_order.len();
            lu.row_step[prow] = k;
            lu.col_order.push(pos);
            lu.pivot_row.push(prow);
            lu.diag.push(pval);
            u_entries.sort_unstable_by_key(|&(step, _)| step);
            lu.upper.push(u_entries);
            let mult: Vec<(usize, f64)> = rest
                .into_iter()
                .filter(|&(row, _)| row != prow)
                .map(|(row, val)| (row, val / pval))
                .collect();
            lu.lower.push(mult);
        }
        Some(lu)
    }

    /// Approximate nonzero count, used to decide when refactoring would pay.
    pub fn fill(&self) -> usize {
        self.lower.iter().map(Vec::len).sum::<usize>()
            + self.upper.iter().map(Vec::len).sum::<usize>()
            + self.m
    }

    /// Solves B x = rhs in place. `rhs` enters in row space and leaves as
    /// values per basis position.
    pub fn ftran(&self, rhs: &mut [f64]) {
        debug_assert_eq!(rhs.len(), self.m);
        // Forward: v = L^-1 rhs, walking elimination steps in order.
        for k in 0..self.m {
            let x = rhs[self.pivot_row[k]];
            if x == 0.0 {
                continue;
            }
            for &(row, mult) in &self.lower[k] {
                rhs[row] -= mult * x;
            }
        }
        // Backward: solve U in reverse step order into per-step values.
        let mut step_val = vec![0.0f64; self.m];
        for k in (0..self.m).rev() {
            let v = rhs[self.pivot_row[k]] / self.diag[k];
            step_val[k] = v;
            if v != 0.0 {
                for &(earlier_step, val) in &self.upper[k] {
                    rhs[self.pivot_row[earlier_step]] -= val * v;
                }
            }
        }
        // Map step values back to basis positions.
        for k in 0..self.m {
            rhs[k] = 0.0;
        }
        for k in 0..self.m {
            rhs[self.col_order[k]] = step_val[k];
        }
    }

    /// Solves B^T y = rhs in place. `rhs` enters as values per basis
    /// position and leaves in row space.
    pub fn btran(&self, rhs: &mut [f64]) {
        debug_assert_eq!(rhs.len(), self.m);
        // U^T forward solve in step order.
        let mut step_val = vec![0.0f64; self.m];
        for k in 0..self.m {
            let mut v = rhs[self.col_order[k]];
            for &(earlier_step, val) in &self.upper[k] {
                v -= val * step_val[earlier_step];
            }
            step_val[k] = v / self.diag[k];
        }
        // L^T backward solve in reverse order; result lands in row space.
        for k in 0..self.m {
            rhs[k] = 0.0;
        }
        for k in 0..self.m {
            rhs[self.pivot_row[k]] = step_val[k];
        }
        for k in (0..self.m).rev() {
            let mut v = rhs[self.pivot_row[k]];
            for &(row, mult) in &self.lower[k] {
                v -= mult * rhs[row];
            }
            rhs[self.pivot_row[k]] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_to_cols(dense: &[Vec<f64>]) -> Vec<SparseCol> {
        let m = dense.len();
        (0..m)
            .map(|j| {
                (0..m)
                    .filter(|&i| dense[i][j] != 0.0)
                    .map(|i| (i, dense[i][j]))
                    .collect()
            })
            .collect()
    }

    fn mat_vec(dense: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        dense.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    fn mat_t_vec(dense: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        let m = dense.len();
        (0..m).map(|j| (0..m).map(|i| dense[i][j] * x[i]).sum()).collect()
    }

    #[test]
    fn ftran_btran_match_dense_reference() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..50 {
            let m = 1 + (trial % 9);
            // Random sparse-ish nonsingular matrix: diagonal dominance.
            let mut dense = vec![vec![0.0f64; m]; m];
            for i in 0..m {
                for j in 0..m {
                    if rng.gen_bool(0.4) {
                        dense[i][j] = rng.gen_range(-2.0..2.0);
                    }
                }
                dense[i][i] += 4.0;
            }
            let cols = dense_to_cols(&dense);
            let refs: Vec<&SparseCol> = cols.iter().collect();
            let lu = LuFactors::factor(m, &refs).expect("nonsingular");

            let x_true: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let mut rhs = mat_vec(&dense, &x_true);
            lu.ftran(&mut rhs);
            for i in 0..m {
                assert!((rhs[i] - x_true[i]).abs() < 1e-9, "ftran mismatch at {i}");
            }

            let mut rhs_t = mat_t_vec(&dense, &x_true);
            lu.btran(&mut rhs_t);
            for i in 0..m {
                assert!((rhs_t[i] - x_true[i]).abs() < 1e-9, "btran mismatch at {i}");
            }
        }
    }

    #[test]
    fn singular_basis_is_detected() {
        let dense = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        let cols = dense_to_cols(&dense);
        let refs: Vec<&SparseCol> = cols.iter().collect();
        assert!(LuFactors::factor(2, &refs).is_none());
    }
}

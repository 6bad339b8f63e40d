//! Up-looking sparse Cholesky factorization `P A Pᵀ = L Lᵀ`.
//!
//! The symbolic phase builds the elimination tree and the column counts of
//! `L`; the numeric phase computes one row of `L` at a time from the row
//! subtree of the elimination tree. `L` is stored by columns with the
//! diagonal entry first in each column.

use super::ordering::{invert, nested_dissection};
use super::{CsrMatrix, LinalgError};

#[derive(Debug, Clone)]
pub struct SparseCholesky {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseCholesky {
    /// Factorizes a symmetric positive definite matrix stored with both
    /// triangles. Only the lower triangle of the permuted matrix is read.
    pub fn factor(a: &CsrMatrix) -> Result<Self, LinalgError> {
        let perm = nested_dissection(a);
        Self::factor_with_ordering(a, perm)
    }

    pub fn factor_with_ordering(a: &CsrMatrix, perm: Vec<usize>) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::NotSquare { nrows: a.nrows(), ncols: a.ncols() });
        }
        let n = a.nrows();
        assert_eq!(perm.len(), n);
        let pinv = invert(&perm);

        // rows of the permuted lower triangle: (col, value) with col <= row
        let mut low_ptr = vec![0usize; n + 1];
        for new_r in 0..n {
            let old_r = perm[new_r];
            low_ptr[new_r + 1] = a.row(old_r).filter(|&(c, _)| pinv[c] <= new_r).count();
        }
        for k in 0..n {
            low_ptr[k + 1] += low_ptr[k];
        }
        let mut low_col = vec![0usize; low_ptr[n]];
        let mut low_val = vec![0.0; low_ptr[n]];
        for new_r in 0..n {
            let mut k = low_ptr[new_r];
            for (c, v) in a.row(perm[new_r]) {
                let nc = pinv[c];
                if nc <= new_r {
                    low_col[k] = nc;
                    low_val[k] = v;
                    k += 1;
                }
            }
        }

        let parent = elimination_tree(n, &low_ptr, &low_col);

        // column counts by walking every row subtree once
        let mut counts = vec![1usize; n];
        let mut mark = vec![usize::MAX; n];
        let mut stack = vec![0usize; n];
        for k in 0..n {
            let top = ereach(k, &low_ptr, &low_col, &parent, &mut mark, &mut stack);
            for &j in &stack[top..] {
                counts[j] += 1;
            }
        }
        let mut col_ptr = vec![0usize; n + 1];
        for j in 0..n {
            col_ptr[j + 1] = col_ptr[j] + counts[j];
        }
        let nnz = col_ptr[n];
        let mut row_idx = vec![0usize; nnz];
        let mut values = vec![0.0; nnz];

        let mut next = col_ptr.clone();
        let mut x = vec![0.0; n];
        mark.iter_mut().for_each(|m| *m = usize::MAX);
        for k in 0..n {
            let top = ereach(k, &low_ptr, &low_col, &parent, &mut mark, &mut stack);
            let mut diag = 0.0;
            for p in low_ptr[k]..low_ptr[k + 1] {
                let j = low_col[p];
                if j == k {
                    diag += low_val[p];
                } else {
                    x[j] += low_val[p];
                }
            }
            // stack[top..] is in topological order of the row subtree
            for &j in &stack[top..] {
                let start = col_ptr[j];
                let lkj = x[j] / values[start];
                x[j] = 0.0;
                for q in start + 1..next[j] {
                    x[row_idx[q]] -= values[q] * lkj;
                }
                diag -= lkj * lkj;
                let slot = next[j];
                row_idx[slot] = k;
                values[slot] = lkj;
                next[j] += 1;
            }
            if !(diag > 0.0) || !diag.is_finite() {
                return Err(LinalgError::NotPositiveDefinite { column: perm[k], pivot: diag });
            }
            let slot = next[k];
            row_idx[slot] = k;
            values[slot] = diag.sqrt();
            next[k] += 1;
        }

        Ok(Self { n, perm, col_ptr, row_idx, values })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored entries of `L`, diagonal included.
    pub fn factor_nnz(&self) -> usize {
        self.values.len()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let mut out = vec![0.0; self.n];
        let mut work = vec![0.0; self.n];
        self.solve_with_workspace(b, &mut out, &mut work)?;
        Ok(out)
    }

    /// Solves into `out` using caller-owned scratch space, so several threads
    /// can share one factorization.
    pub fn solve_with_workspace(&self, b: &[f64], out: &mut [f64], work: &mut [f64]) -> Result<(), LinalgError> {
        if b.len() != self.n || out.len() != self.n || work.len() != self.n {
            return Err(LinalgError::DimensionMismatch { expected: self.n, found: b.len() });
        }
        for (w, &old) in work.iter_mut().zip(&self.perm) {
            *w = b[old];
        }
        // L y = P b
        for j in 0..self.n {
            let start = self.col_ptr[j];
            let yj = work[j] / self.values[start];
            work[j] = yj;
            if yj != 0.0 {
                for q in start + 1..self.col_ptr[j + 1] {
                    work[self.row_idx[q]] -= self.values[q] * yj;
                }
            }
        }
        // Lᵀ z = y
        for j in (0..self.n).rev() {
            let start = self.col_ptr[j];
            let mut s = work[j];
            for q in start + 1..self.col_ptr[j + 1] {
                s -= self.values[q] * work[self.row_idx[q]];
            }
            work[j] = s / self.values[start];
        }
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = work[new];
        }
        Ok(())
    }
}

fn elimination_tree(n: usize, low_ptr: &[usize], low_col: &[usize]) -> Vec<usize> {
    let mut parent = vec![usize::MAX; n];
    let mut ancestor = vec![usize::MAX; n];
    for k in 0..n {
        for p in low_ptr[k]..low_ptr[k + 1] {
            let mut i = low_col[p];
            while i != usize::MAX && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == usize::MAX {
                    parent[i] = k;
                    break;
                }
                i = next;
            }
        }
    }
    parent
}

/// Nonzero pattern of row `k` of `L` (excluding the diagonal), written to
/// `stack[top..]` in topological order. `mark` must hold values `!= k`.
fn ereach(
    k: usize,
    low_ptr: &[usize],
    low_col: &[usize],
    parent: &[usize],
    mark: &mut [usize],
    stack: &mut [usize],
) -> usize {
    let n = parent.len();
    let mut top = n;
    mark[k] = k;
    let mut path: Vec<usize> = Vec::new();
    for p in low_ptr[k]..low_ptr[k + 1] {
        let mut i = low_col[p];
        if i >= k {
            continue;
        }
        path.clear();
        while mark[i] != k {
            path.push(i);
            mark[i] = k;
            i = parent[i];
        }
        while let Some(v) = path.pop() {
            top -= 1;
            stack[top] = v;
        }
    }
    top
}

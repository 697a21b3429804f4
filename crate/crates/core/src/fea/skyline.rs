//! Envelope (skyline) Cholesky for banded reduced systems.

use super::solver::CsrMatrix;
use super::FeaError;
use crate::scalar::Scalar;

const NONE: usize = usize::MAX;

/// Lower-triangular envelope factor `A = L Lᵀ` in a permuted ordering.
///
/// Row `i` stores columns `first[i]..=i` contiguously. The CSR-to-envelope
/// map is built once so refactoring after a reassembly only copies values.
#[derive(Debug, Clone)]
pub struct Skyline<T> {
    /// New index to original index.
    perm: Vec<usize>,
    /// Original index to new index.
    inv: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    values: Vec<T>,
    /// Envelope position for each CSR slot in the lower triangle, else `NONE`.
    csr_map: Vec<usize>,
}

impl<T: Scalar> Skyline<T> {
    /// Builds the envelope structure of `a` under the ordering `perm`
    /// (`perm[new] = old`).
    pub fn new(a: &CsrMatrix<T>, perm: Vec<usize>) -> Self {
        let n = a.n;
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old_r in 0..n {
            let r = inv[old_r];
            for &old_c in &a.col_idx[a.row_ptr[old_r]..a.row_ptr[old_r + 1]] {
                let c = inv[old_c];
                if c < r {
                    first[r] = first[r].min(c);
                }
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            let len = i - first[i] + 1;
            start.push(start[i] + len);
        }
        let mut csr_map = vec![NONE; a.col_idx.len()];
        for old_r in 0..n {
            let r = inv[old_r];
            for s in a.row_ptr[old_r]..a.row_ptr[old_r + 1] {
                let c = inv[a.col_idx[s]];
                if c <= r {
                    csr_map[s] = start[r] + (c - first[r]);
                }
            }
        }
        let values = vec![T::zero(); start[n]];
        Self { perm, inv, first, start, values, csr_map }
    }

    /// Estimated multiply-adds of one factorization.
    pub fn factor_cost(&self) -> f64 {
        (0..self.first.len()).map(|i| ((i - self.first[i]) as f64).powi(2) / 2.0).sum()
    }

    pub fn factor(&mut self, a: &CsrMatrix<T>) -> Result<(), FeaError> {
        self.values.iter_mut().for_each(|v| *v = T::zero());
        for (s, &pos) in self.csr_map.iter().enumerate() {
            if pos != NONE {
                self.values[pos] = a.values[s];
            }
        }
        let n = self.first.len();
        for i in 0..n {
            let fi = self.first[i];
            let si = self.start[i];
            for j in fi..i {
                let fj = self.first[j];
                let sj = self.start[j];
                let k0 = fi.max(fj);
                let (head, tail) = self.values.split_at_mut(si);
                let row_j = &head[sj + (k0 - fj)..sj + (j - fj)];
                let row_i = &tail[k0 - fi..j - fi];
                let dot: T = row_i.iter().zip(row_j).map(|(&a, &b)| a * b).sum();
                let ljj = head[sj + (j - fj)];
                tail[j - fi] = (tail[j - fi] - dot) / ljj;
            }
            let row = &self.values[si..si + (i - fi)];
            let sq: T = row.iter().map(|&v| v * v).sum();
            let d = self.values[si + (i - fi)] - sq;
            if !(d > T::zero()) {
                return Err(FeaError::Singular(format!("non-positive pivot at row {i}")));
            }
            self.values[si + (i - fi)] = d.sqrt();
        }
        Ok(())
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.first.len();
        let mut y: Vec<T> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let si = self.start[i];
            let row = &self.values[si..si + (i - fi)];
            let s: T = row.iter().zip(&y[fi..i]).map(|(&l, &v)| l * v).sum();
            y[i] = (y[i] - s) / self.values[si + (i - fi)];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let si = self.start[i];
            y[i] /= self.values[si + (i - fi)];
            let yi = y[i];
            for (k, &l) in self.values[si..si + (i - fi)].iter().enumerate() {
                y[fi + k] -= l * yi;
            }
        }
        let mut x = vec![T::zero(); n];
        for (old, &new) in self.inv.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

//! Sparse storage and linear solvers for the reduced stiffness system.

use serde::{Deserialize, Serialize};

use super::FeaError;
use crate::scalar::Scalar;

/// Largest reduced system the dense direct path accepts.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearSolver {
    /// Envelope Cholesky when its estimated cost is below
    /// [`SKYLINE_AUTO_LIMIT`], otherwise preconditioned conjugate gradient.
    #[default]
    Auto,
    /// Conjugate gradient with a diagonal (Jacobi) preconditioner.
    Pcg,
    /// Dense Cholesky factorization; limited to [`DENSE_LIMIT`] unknowns.
    Dense,
    /// Envelope Cholesky in a bandwidth-reducing DOF order.
    Skyline,
}

/// Factorization cost (multiply-adds) up to which `Auto` picks the envelope
/// solver.
pub const SKYLINE_AUTO_LIMIT: f64 = 4e8;

/// Compressed sparse row matrix with a fixed sparsity pattern.
#[derive(Debug, Clone)]
pub struct CsrMatrix<T> {
    pub(crate) n: usize,
    pub(crate) row_ptr: Vec<usize>,
    pub(crate) col_idx: Vec<usize>,
    pub(crate) values: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    /// Builds an all-zero matrix from per-row sorted, deduplicated columns.
    pub fn from_pattern(rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for r in rows {
            col_idx.extend(r);
            row_ptr.push(col_idx.len());
        }
        let values = vec![T::zero(); col_idx.len()];
        Self { n, row_ptr, col_idx, values }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Position of `(row, col)` in the value array.
    pub fn slot(&self, row: usize, col: usize) -> Option<usize> {
        let (lo, hi) = (self.row_ptr[row], self.row_ptr[row + 1]);
        self.col_idx[lo..hi].binary_search(&col).ok().map(|k| lo + k)
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.slot(row, col).map_or(T::zero(), |s| self.values[s])
    }

    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> Vec<T> {
        let mut a = vec![T::zero(); self.n * self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                a[i * self.n + self.col_idx[k]] = self.values[k];
            }
        }
        a
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Outcome of an iterative or direct solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveStats<T> {
    pub iterations: usize,
    pub relative_residual: T,
}

/// `‖b − A x‖ / ‖b‖`, or `‖A x‖` when `b = 0`.
pub fn relative_residual<T: Scalar>(a: &CsrMatrix<T>, x: &[T], b: &[T]) -> T {
    let mut ax = vec![T::zero(); a.n];
    a.mul_vec_into(x, &mut ax);
    let r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
    let bn = norm(b);
    if bn > T::zero() {
        norm(&r) / bn
    } else {
        norm(&r)
    }
}

/// Jacobi-preconditioned conjugate gradient. `x` holds the initial guess and
/// receives the solution. Convergence is judged on the true residual.
pub fn pcg<T: Scalar>(
    a: &CsrMatrix<T>,
    b: &[T],
    x: &mut [T],
    rel_tol: T,
    max_iter: usize,
) -> Result<SolveStats<T>, FeaError> {
    let n = a.n;
    let b_norm = norm(b);
    if b_norm == T::zero() {
        x.iter_mut().for_each(|v| *v = T::zero());
        return Ok(SolveStats { iterations: 0, relative_residual: T::zero() });
    }
    let inv_diag: Vec<T> =
        a.diagonal().into_iter().map(|d| if d > T::zero() { T::one() / d } else { T::one() }).collect();
    if x.iter().any(|v| !v.is_finite()) {
        x.iter_mut().for_each(|v| *v = T::zero());
    }

    let mut r = vec![T::zero(); n];
    let mut z = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    let mut q = vec![T::zero(); n];
    let mut iterations = 0;

    // Outer loop restarts from the true residual whenever the recursive
    // residual claims convergence but the true one disagrees.
    loop {
        a.mul_vec_into(x, &mut q);
        for i in 0..n {
            r[i] = b[i] - q[i];
        }
        let true_res = norm(&r) / b_norm;
        if true_res <= rel_tol {
            return Ok(SolveStats { iterations, relative_residual: true_res });
        }
        if iterations >= max_iter {
            return Err(FeaError::NotConverged { iterations, residual: true_res.as_f64() });
        }
        for i in 0..n {
            z[i] = inv_diag[i] * r[i];
        }
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        while iterations < max_iter {
            iterations += 1;
            a.mul_vec_into(&p, &mut q);
            let pq = dot(&p, &q);
            if !(pq > T::zero()) {
                return Err(FeaError::Singular(format!(
                    "non-positive curvature {pq} in conjugate gradient at iteration {iterations}"
                )));
            }
            let alpha = rz / pq;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            if norm(&r) / b_norm <= rel_tol * T::lit(0.5) {
                break;
            }
            for i in 0..n {
                z[i] = inv_diag[i] * r[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
}

/// Solves `A x = b` by dense Cholesky factorization.
pub fn dense_cholesky_solve<T: Scalar>(a: &CsrMatrix<T>, b: &[T]) -> Result<Vec<T>, FeaError> {
    let n = a.n;
    if n > DENSE_LIMIT {
        return Err(FeaError::DenseTooLarge { unknowns: n, limit: DENSE_LIMIT });
    }
    let mut l = a.to_dense();
    for j in 0..n {
        let mut d = l[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > T::zero()) {
            return Err(FeaError::Singular(format!("non-positive pivot at row {j}")));
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = l[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    Ok(y)
}

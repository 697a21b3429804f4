//! Structured-grid finite-element kernel: element templates, assembly over the
//! free DOFs, linear solve and centroid strain recovery.

mod element;
mod mesh;
mod skyline;
mod solver;

pub use element::{
    centroid_strain_displacement, constitutive_matrix, element_stiffness, strain_displacement, ElementMatrix,
};
pub use mesh::{Dim, Mesh};
pub use skyline::Skyline;
pub use solver::{
    dense_cholesky_solve, pcg, relative_residual, CsrMatrix, LinearSolver, SolveStats, DENSE_LIMIT, SKYLINE_AUTO_LIMIT,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Poisson ratio used when none is configured.
pub const DEFAULT_POISSON: f64 = 0.3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeaError {
    #[error("Poisson ratio {0} outside [0, 0.5)")]
    InvalidPoissonRatio(f64),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid boundary conditions: {0}")]
    InvalidBoundaryConditions(String),
    #[error("structure is under-constrained: fixed DOFs remove {rank} of {required} rigid-body modes")]
    Underconstrained { rank: usize, required: usize },
    #[error("singular system: {0}")]
    Singular(String),
    #[error("linear solve did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("dense solve requested for {unknowns} unknowns (limit {limit})")]
    DenseTooLarge { unknowns: usize, limit: usize },
    #[error("element index {index} out of range for {count} elements")]
    ElementOutOfRange { index: usize, count: usize },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

/// Point load on one global DOF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DofLoad<T> {
    pub dof: usize,
    pub value: T,
}

/// Dirichlet (zero-displacement) DOFs and nodal point loads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConditions<T> {
    fixed_dofs: Vec<usize>,
    loads: Vec<DofLoad<T>>,
}

impl<T: Scalar> BoundaryConditions<T> {
    /// Loads on the same DOF are summed; fixed DOFs are sorted and deduplicated.
    pub fn new(fixed: impl IntoIterator<Item = usize>, loads: impl IntoIterator<Item = (usize, T)>) -> Self {
        let mut fixed_dofs: Vec<usize> = fixed.into_iter().collect();
        fixed_dofs.sort_unstable();
        fixed_dofs.dedup();
        let mut merged: Vec<DofLoad<T>> = Vec::new();
        for (dof, value) in loads {
            match merged.iter_mut().find(|l| l.dof == dof) {
                Some(l) => l.value += value,
                None => merged.push(DofLoad { dof, value }),
            }
        }
        merged.sort_by_key(|l| l.dof);
        Self { fixed_dofs, loads: merged }
    }

    pub fn fixed_dofs(&self) -> &[usize] {
        &self.fixed_dofs
    }

    pub fn loads(&self) -> &[DofLoad<T>] {
        &self.loads
    }

    pub fn is_fixed(&self, dof: usize) -> bool {
        self.fixed_dofs.binary_search(&dof).is_ok()
    }

    /// Distinct loaded nodes, in ascending order.
    pub fn load_nodes(&self, mesh: &Mesh) -> Vec<usize> {
        let d = mesh.dof_per_node();
        let mut nodes: Vec<usize> = self.loads.iter().filter(|l| l.value != T::zero()).map(|l| l.dof / d).collect();
        nodes.dedup();
        nodes
    }

    /// Distinct nodes carrying at least one fixed DOF.
    pub fn fixed_nodes(&self, mesh: &Mesh) -> Vec<usize> {
        let d = mesh.dof_per_node();
        let mut nodes: Vec<usize> = self.fixed_dofs.iter().map(|&f| f / d).collect();
        nodes.dedup();
        nodes
    }

    /// Full-length load vector.
    pub fn force_vector(&self, mesh: &Mesh) -> Vec<T> {
        let mut f = vec![T::zero(); mesh.n_dofs()];
        for l in &self.loads {
            f[l.dof] += l.value;
        }
        f
    }

    /// Checks DOF ranges, load/support overlap, and that the supports remove
    /// every rigid-body mode.
    pub fn validate(&self, mesh: &Mesh) -> Result<(), FeaError> {
        let n = mesh.n_dofs();
        if self.fixed_dofs.is_empty() {
            return Err(FeaError::InvalidBoundaryConditions("no fixed DOFs".into()));
        }
        if let Some(&bad) = self.fixed_dofs.iter().find(|&&d| d >= n) {
            return Err(FeaError::InvalidBoundaryConditions(format!("fixed DOF {bad} outside mesh ({n} DOFs)")));
        }
        for l in &self.loads {
            if l.dof >= n {
                return Err(FeaError::InvalidBoundaryConditions(format!("load DOF {} outside mesh ({n} DOFs)", l.dof)));
            }
            if self.is_fixed(l.dof) {
                return Err(FeaError::InvalidBoundaryConditions(format!("load applied to fixed DOF {}", l.dof)));
            }
            if !l.value.is_finite() {
                return Err(FeaError::NonFinite("load"));
            }
        }
        let rank = self.rigid_mode_rank(mesh);
        let required = mesh.dim().rigid_modes();
        if rank < required {
            return Err(FeaError::Underconstrained { rank, required });
        }
        Ok(())
    }

    /// Rank of the rigid-body modes restricted to the fixed DOFs.
    fn rigid_mode_rank(&self, mesh: &Mesh) -> usize {
        let d = mesh.dof_per_node();
        let m = mesh.dim().rigid_modes();
        let ext = mesh.extent();
        let scale = mesh.diagonal().max(1.0);
        // Gram matrix of the restricted mode vectors.
        let mut g = vec![0.0f64; m * m];
        for &dof in &self.fixed_dofs {
            let p = mesh.node_position(dof / d);
            let (x, y, z) =
                ((p[0] - ext[0] / 2.0) / scale, (p[1] - ext[1] / 2.0) / scale, (p[2] - ext[2] / 2.0) / scale);
            let comp = dof % d;
            let row: Vec<f64> = match d {
                2 => {
                    let rot = [-y, x];
                    vec![(comp == 0) as u8 as f64, (comp == 1) as u8 as f64, rot[comp]]
                }
                _ => {
                    let rx = [0.0, -z, y];
                    let ry = [z, 0.0, -x];
                    let rz = [-y, x, 0.0];
                    vec![
                        (comp == 0) as u8 as f64,
                        (comp == 1) as u8 as f64,
                        (comp == 2) as u8 as f64,
                        rx[comp],
                        ry[comp],
                        rz[comp],
                    ]
                }
            };
            for i in 0..m {
                for j in 0..m {
                    g[i * m + j] += row[i] * row[j];
                }
            }
        }
        matrix_rank(&mut g, m)
    }
}

fn matrix_rank(a: &mut [f64], m: usize) -> usize {
    let max_abs = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if max_abs == 0.0 {
        return 0;
    }
    let tol = max_abs * 1e-10;
    let mut rank = 0;
    let mut row = 0;
    for col in 0..m {
        let pivot = (row..m).max_by(|&i, &j| a[i * m + col].abs().total_cmp(&a[j * m + col].abs()));
        let Some(p) = pivot else { break };
        if a[p * m + col].abs() <= tol {
            continue;
        }
        for k in 0..m {
            a.swap(row * m + k, p * m + k);
        }
        for i in (row + 1)..m {
            let f = a[i * m + col] / a[row * m + col];
            for k in col..m {
                a[i * m + k] -= f * a[row * m + k];
            }
        }
        row += 1;
        rank += 1;
        if row == m {
            break;
        }
    }
    rank
}

/// Nodal displacement vector, `n_nodes * dof_per_node` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DisplacementField<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> DisplacementField<T> {
    pub fn zeros(mesh: &Mesh) -> Self {
        Self { values: vec![T::zero(); mesh.n_dofs()] }
    }

    /// Element DOF values in local order.
    pub fn element_values(&self, mesh: &Mesh, e: usize) -> Vec<T> {
        mesh.element_dofs(e).into_iter().map(|d| self.values[d]).collect()
    }
}

/// Settings of the stiffness model and linear solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeaOptions<T> {
    pub poisson: f64,
    pub solver: LinearSolver,
    pub rel_tol: T,
    /// Iteration cap as a multiple of the number of free DOFs.
    pub max_iter_factor: usize,
}

impl<T: Scalar> Default for FeaOptions<T> {
    fn default() -> Self {
        Self {
            poisson: DEFAULT_POISSON,
            solver: LinearSolver::Auto,
            rel_tol: T::default_solver_tolerance(),
            max_iter_factor: 10,
        }
    }
}

/// Result of one forward analysis.
#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub displacement: DisplacementField<T>,
    pub compliance: T,
    pub iterations: usize,
    pub relative_residual: T,
}

const FIXED: usize = usize::MAX;

/// Reusable assembler and solver for one mesh and set of boundary conditions.
///
/// The reduced sparsity pattern and the element-to-slot scatter map are built
/// once; each [`FeaSystem::solve`] only rescales the element template. The
/// previous solution warm-starts the next iterative solve.
#[derive(Debug, Clone)]
pub struct FeaSystem<T> {
    mesh: Mesh,
    ke: ElementMatrix<T>,
    free_of_dof: Vec<usize>,
    free_dofs: Vec<usize>,
    force: Vec<T>,
    matrix: CsrMatrix<T>,
    /// Per element, `ndof_e²` value slots (or `FIXED`).
    slots: Vec<usize>,
    options: FeaOptions<T>,
    warm: Vec<T>,
    skyline: Option<Skyline<T>>,
}

impl<T: Scalar> FeaSystem<T> {
    pub fn new(mesh: &Mesh, bc: &BoundaryConditions<T>, options: FeaOptions<T>) -> Result<Self, FeaError> {
        bc.validate(mesh)?;
        let ke = element_stiffness::<T>(mesh.dim(), options.poisson)?;
        let n = mesh.n_dofs();
        let mut free_of_dof = vec![FIXED; n];
        let mut free_dofs = Vec::with_capacity(n - bc.fixed_dofs().len());
        for (dof, slot) in free_of_dof.iter_mut().enumerate() {
            if !bc.is_fixed(dof) {
                *slot = free_dofs.len();
                free_dofs.push(dof);
            }
        }
        let full_force = bc.force_vector(mesh);
        let force: Vec<T> = free_dofs.iter().map(|&d| full_force[d]).collect();

        let nde = mesh.dim().dofs_per_element();
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); free_dofs.len()];
        let mut edofs = Vec::with_capacity(mesh.n_elements());
        for e in 0..mesh.n_elements() {
            let reduced: Vec<usize> = mesh.element_dofs(e).into_iter().map(|d| free_of_dof[d]).collect();
            for &i in reduced.iter().filter(|&&i| i != FIXED) {
                rows[i].extend(reduced.iter().copied().filter(|&j| j != FIXED));
            }
            edofs.push(reduced);
        }
        for r in &mut rows {
            r.sort_unstable();
            r.dedup();
        }
        let matrix = CsrMatrix::from_pattern(rows);
        let mut slots = Vec::with_capacity(mesh.n_elements() * nde * nde);
        for reduced in &edofs {
            for &i in reduced {
                for &j in reduced {
                    slots.push(if i == FIXED || j == FIXED {
                        FIXED
                    } else {
                        matrix.slot(i, j).expect("pattern covers element couplings")
                    });
                }
            }
        }
        let warm = vec![T::zero(); free_dofs.len()];
        let skyline = match options.solver {
            LinearSolver::Auto | LinearSolver::Skyline => {
                let sky = Skyline::new(&matrix, banded_order(mesh, &free_dofs));
                let keep = options.solver == LinearSolver::Skyline || sky.factor_cost() <= SKYLINE_AUTO_LIMIT;
                keep.then_some(sky)
            }
            _ => None,
        };
        Ok(Self { mesh: mesh.clone(), ke, free_of_dof, free_dofs, force, matrix, slots, options, warm, skyline })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// Unit element stiffness template.
    pub fn element_template(&self) -> &ElementMatrix<T> {
        &self.ke
    }

    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }

    /// Assembles `K = Σ_e E_e K_e^0` over the free DOFs.
    pub fn assemble(&mut self, moduli: &[T]) -> Result<(), FeaError> {
        let ne = self.mesh.n_elements();
        if moduli.len() != ne {
            return Err(FeaError::LengthMismatch { expected: ne, got: moduli.len() });
        }
        if moduli.iter().any(|m| !m.is_finite()) {
            return Err(FeaError::NonFinite("element moduli"));
        }
        let nde2 = self.ke.size() * self.ke.size();
        let ke = self.ke.as_slice();
        self.matrix.values.iter_mut().for_each(|v| *v = T::zero());
        for (e, &modulus) in moduli.iter().enumerate() {
            let slots = &self.slots[e * nde2..(e + 1) * nde2];
            for (k, &s) in slots.iter().enumerate() {
                if s != FIXED {
                    self.matrix.values[s] += modulus * ke[k];
                }
            }
        }
        Ok(())
    }

    /// Reduced stiffness matrix from the last [`FeaSystem::assemble`].
    pub fn matrix(&self) -> &CsrMatrix<T> {
        &self.matrix
    }

    /// Reduced load vector.
    pub fn reduced_force(&self) -> &[T] {
        &self.force
    }

    /// Assembles with per-element moduli and solves `K u = f`.
    pub fn solve(&mut self, moduli: &[T]) -> Result<Solution<T>, FeaError> {
        self.assemble(moduli)?;
        let n = self.free_dofs.len();
        let (u_red, stats) = match (self.options.solver, self.skyline.as_mut()) {
            (_, Some(sky)) => {
                sky.factor(&self.matrix)?;
                let x = sky.solve(&self.force);
                let res = relative_residual(&self.matrix, &x, &self.force);
                (x, SolveStats { iterations: 0, relative_residual: res })
            }
            (LinearSolver::Auto | LinearSolver::Pcg | LinearSolver::Skyline, None) => {
                let mut x = self.warm.clone();
                let max_iter = self.options.max_iter_factor.max(1) * n.max(1);
                let stats = pcg(&self.matrix, &self.force, &mut x, self.options.rel_tol, max_iter)?;
                (x, stats)
            }
            (LinearSolver::Dense, None) => {
                let x = dense_cholesky_solve(&self.matrix, &self.force)?;
                let res = relative_residual(&self.matrix, &x, &self.force);
                (x, SolveStats { iterations: 0, relative_residual: res })
            }
        };
        if u_red.iter().any(|v| !v.is_finite()) {
            return Err(FeaError::NonFinite("displacement"));
        }
        let compliance = solver::dot(&self.force, &u_red);
        let mut full = vec![T::zero(); self.mesh.n_dofs()];
        for (k, &dof) in self.free_dofs.iter().enumerate() {
            full[dof] = u_red[k];
        }
        self.warm = u_red;
        Ok(Solution {
            displacement: DisplacementField { values: full },
            compliance,
            iterations: stats.iterations,
            relative_residual: stats.relative_residual,
        })
    }

    /// `u_eᵀ K_e^0 u_e` for every element.
    pub fn element_energies(&self, u: &DisplacementField<T>) -> Vec<T> {
        (0..self.mesh.n_elements()).map(|e| self.ke.quadratic_form(&u.element_values(&self.mesh, e))).collect()
    }

    /// Whether `dof` is a free (unconstrained) DOF.
    pub fn is_free(&self, dof: usize) -> bool {
        self.free_of_dof[dof] != FIXED
    }
}

/// Free DOFs ordered with the longest axis varying slowest, which keeps the
/// envelope of the reduced matrix proportional to the shortest cross-section.
fn banded_order(mesh: &Mesh, free_dofs: &[usize]) -> Vec<usize> {
    let d = mesh.dof_per_node();
    let counts = [mesh.nx() + 1, mesh.ny() + 1, mesh.nz() + 1];
    let mut axes = [0usize, 1, 2];
    axes.sort_by_key(|&a| std::cmp::Reverse(counts[a]));
    let mut order: Vec<usize> = (0..free_dofs.len()).collect();
    order.sort_by_key(|&k| {
        let dof = free_dofs[k];
        let c = mesh.node_coords(dof / d);
        (c[axes[0]], c[axes[1]], c[axes[2]], dof % d)
    });
    order
}

/// SIMP modulus interpolation `E_min + ρ^p (E0 − E_min)`.
#[inline]
pub fn simp_modulus<T: Scalar>(rho: T, penalty: T, e0: T, emin: T) -> T {
    emin + rho.powf(penalty) * (e0 - emin)
}

/// Assembles `K(ρ) = Σ_e (E_min + ρ_e^p (E0 − E_min)) K_e^0`, solves with the
/// fixed DOFs eliminated, and returns the displacement and compliance `fᵀu`.
pub fn assemble_solve<T: Scalar>(
    mesh: &Mesh,
    bc: &BoundaryConditions<T>,
    densities: &[T],
    penalty: T,
    e0: T,
    emin: T,
) -> Result<(DisplacementField<T>, T), FeaError> {
    assemble_solve_with(mesh, bc, densities, penalty, e0, emin, FeaOptions::default())
        .map(|s| (s.displacement, s.compliance))
}

pub fn assemble_solve_with<T: Scalar>(
    mesh: &Mesh,
    bc: &BoundaryConditions<T>,
    densities: &[T],
    penalty: T,
    e0: T,
    emin: T,
    options: FeaOptions<T>,
) -> Result<Solution<T>, FeaError> {
    if densities.len() != mesh.n_elements() {
        return Err(FeaError::LengthMismatch { expected: mesh.n_elements(), got: densities.len() });
    }
    let moduli: Vec<T> = densities.iter().map(|&r| simp_modulus(r, penalty, e0, emin)).collect();
    FeaSystem::new(mesh, bc, options)?.solve(&moduli)
}

/// Centroid strain `B(0) u_e` of element `e`: 3 components in 2D
/// (`εxx, εyy, γxy`), 6 in 3D (`εxx, εyy, εzz, γxy, γyz, γzx`).
pub fn element_strain<T: Scalar>(mesh: &Mesh, u: &DisplacementField<T>, e: usize) -> Result<Vec<T>, FeaError> {
    if e >= mesh.n_elements() {
        return Err(FeaError::ElementOutOfRange { index: e, count: mesh.n_elements() });
    }
    if u.values.len() != mesh.n_dofs() {
        return Err(FeaError::LengthMismatch { expected: mesh.n_dofs(), got: u.values.len() });
    }
    let b = centroid_strain_displacement::<T>(mesh.dim());
    Ok(strain_from_b(&b, &u.element_values(mesh, e)))
}

pub(crate) fn strain_from_b<T: Scalar>(b: &[T], ue: &[T]) -> Vec<T> {
    b.chunks_exact(ue.len()).map(|row| row.iter().zip(ue).map(|(&a, &x)| a * x).sum()).collect()
}

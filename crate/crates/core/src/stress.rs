//! Post-solve stress recovery: centroid stresses and von Mises values.

use serde::{Deserialize, Serialize};

use crate::fea::{
    assemble_solve_with, centroid_strain_displacement, constitutive_matrix, simp_modulus, strain_from_b,
    BoundaryConditions, Dim, DisplacementField, FeaError, FeaOptions, Mesh,
};
use crate::scalar::Scalar;

/// Penalty of the interpolation used to turn strain into stress.
pub const STRESS_PENALTY: f64 = 3.0;

/// Per-element centroid stress.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressField<T> {
    pub von_mises: Vec<T>,
    /// `σxx, σyy, τxy` in 2D; `σxx, σyy, σzz, τxy, τyz, τzx` in 3D.
    pub components: Vec<Vec<T>>,
}

impl<T: Scalar> StressField<T> {
    /// Largest von Mises value among elements with density above 0.5.
    pub fn max_over_solid(&self, densities: &[T]) -> Option<T> {
        self.von_mises
            .iter()
            .zip(densities)
            .filter(|(_, &r)| r > T::lit(0.5))
            .map(|(&s, _)| s)
            .fold(None, |m, s| Some(m.map_or(s, |m: T| m.max(s))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressOptions {
    /// Penalty of the stiffness used for the displacement solve.
    pub solve_penalty: f64,
    /// Penalty of the modulus applied to the recovered strain.
    pub stress_penalty: f64,
    pub e0: f64,
    pub emin: f64,
    pub poisson: f64,
}

impl Default for StressOptions {
    fn default() -> Self {
        Self {
            solve_penalty: crate::simp::TailSettings::default().penalty,
            stress_penalty: STRESS_PENALTY,
            e0: crate::simp::E0,
            emin: crate::simp::E_MIN,
            poisson: crate::fea::DEFAULT_POISSON,
        }
    }
}

/// Plane-stress von Mises: `sqrt(σx² − σxσy + σy² + 3τ²)`.
pub fn von_mises_2d<T: Scalar>(s: &[T]) -> T {
    let (x, y, t) = (s[0], s[1], s[2]);
    (x * x - x * y + y * y + T::lit(3.0) * t * t).max(T::zero()).sqrt()
}

/// Triaxial von Mises.
pub fn von_mises_3d<T: Scalar>(s: &[T]) -> T {
    let (x, y, z) = (s[0], s[1], s[2]);
    let normal = ((x - y) * (x - y) + (y - z) * (y - z) + (z - x) * (z - x)) * T::lit(0.5);
    let shear = T::lit(3.0) * (s[3] * s[3] + s[4] * s[4] + s[5] * s[5]);
    (normal + shear).max(T::zero()).sqrt()
}

pub fn von_mises<T: Scalar>(dim: Dim, s: &[T]) -> T {
    match dim {
        Dim::Two => von_mises_2d(s),
        Dim::Three => von_mises_3d(s),
    }
}

/// Stresses `E_e D ε_e` from a known displacement field.
pub fn element_stresses<T: Scalar>(
    mesh: &Mesh,
    u: &DisplacementField<T>,
    densities: &[T],
    options: &StressOptions,
) -> Result<StressField<T>, FeaError> {
    if densities.len() != mesh.n_elements() {
        return Err(FeaError::LengthMismatch { expected: mesh.n_elements(), got: densities.len() });
    }
    if u.values.len() != mesh.n_dofs() {
        return Err(FeaError::LengthMismatch { expected: mesh.n_dofs(), got: u.values.len() });
    }
    let dim = mesh.dim();
    let d = constitutive_matrix::<T>(dim, options.poisson)?;
    let b = centroid_strain_displacement::<T>(dim);
    let m = dim.strain_components();
    let (p, e0, emin) = (T::lit(options.stress_penalty), T::lit(options.e0), T::lit(options.emin));
    let mut vm = Vec::with_capacity(densities.len());
    let mut components = Vec::with_capacity(densities.len());
    for (e, &rho) in densities.iter().enumerate() {
        let eps = strain_from_b(&b, &u.element_values(mesh, e));
        let modulus = simp_modulus(rho, p, e0, emin);
        let sigma: Vec<T> = (0..m).map(|i| modulus * (0..m).map(|j| d[i * m + j] * eps[j]).sum::<T>()).collect();
        if sigma.iter().any(|s| !s.is_finite()) {
            return Err(FeaError::NonFinite("stress"));
        }
        vm.push(von_mises(dim, &sigma));
        components.push(sigma);
    }
    Ok(StressField { von_mises: vm, components })
}

/// Solves the final-state system and recovers centroid stresses.
pub fn stress_pass<T: Scalar>(
    mesh: &Mesh,
    bc: &BoundaryConditions<T>,
    densities: &[T],
    options: &StressOptions,
) -> Result<StressField<T>, FeaError> {
    let fea = FeaOptions { poisson: options.poisson, ..FeaOptions::default() };
    let sol = assemble_solve_with(
        mesh,
        bc,
        densities,
        T::lit(options.solve_penalty),
        T::lit(options.e0),
        T::lit(options.emin),
        fea,
    )?;
    element_stresses(mesh, &sol.displacement, densities, options)
}

//! Three-field SIMP (density filter, Heaviside projection, physical density)
//! driven by optimality-criteria updates under a continuation schedule.

mod field;
mod filter;
mod oc;
mod schedule;

pub use field::{apply_seed_initialization, DensityField, ElementRole};
pub use filter::{density_filter, heaviside_derivative, heaviside_project, DensityFilter};
pub use oc::{oc_update, oc_update_with};
pub use schedule::{ContinuationSchedule, IterationParams, Phase, TailSettings};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fea::{
    simp_modulus, BoundaryConditions, DisplacementField, FeaError, FeaOptions, FeaSystem, Mesh, Solution,
};
use crate::problem::{ProblemSpec, SpecError};
use crate::scalar::Scalar;

pub const RHO_MIN: f64 = 1e-3;
pub const E0: f64 = 1.0;
pub const E_MIN: f64 = 1e-9;
pub const PROJECTION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimpError {
    #[error(transparent)]
    Fea(#[from] FeaError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("free-volume target {target} unreachable (closest {attainable})")]
    VolumeTargetUnreachable { target: f64, attainable: f64 },
    #[error("volume bisection did not converge (residual {residual:e})")]
    BisectionFailed { residual: f64 },
    #[error("array lengths do not match the mesh")]
    LengthMismatch,
    #[error("non-finite {0}")]
    NonFinite(&'static str),
}

/// Material constants and numerics of the optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpOptions<T> {
    pub rho_min: T,
    pub e0: T,
    pub emin: T,
    pub eta: T,
    pub fea: FeaOptions<T>,
}

impl<T: Scalar> Default for SimpOptions<T> {
    fn default() -> Self {
        Self {
            rho_min: T::lit(RHO_MIN),
            e0: T::lit(E0),
            emin: T::lit(E_MIN),
            eta: T::lit(PROJECTION_THRESHOLD),
            fea: FeaOptions::default(),
        }
    }
}

/// Design-to-physical map: filter, project, rescale the projection onto
/// `[rho_min, 1]`, then pin frozen elements to their fixed values.
#[derive(Debug, Clone)]
pub struct ThreeField<T> {
    pub filter: DensityFilter<T>,
    pub beta: T,
    pub eta: T,
    pub rho_min: T,
}

impl<T: Scalar> ThreeField<T> {
    pub fn new(mesh: &Mesh, r_min: f64, beta: T, eta: T, rho_min: T) -> Self {
        Self { filter: DensityFilter::new(mesh, r_min), beta, eta, rho_min }
    }

    /// Returns `(filtered, physical)`.
    pub fn forward(&self, x: &[T], roles: &[ElementRole]) -> (Vec<T>, Vec<T>) {
        let filtered = self.filter.apply(x);
        let physical = filtered
            .iter()
            .zip(roles)
            .map(|(&f, role)| match role {
                ElementRole::Void => self.rho_min,
                ElementRole::Solid => T::one(),
                ElementRole::Free => {
                    self.rho_min + (T::one() - self.rho_min) * heaviside_project(f, self.beta, self.eta)
                }
            })
            .collect();
        (filtered, physical)
    }

    /// Chains a derivative with respect to physical densities back to the
    /// design variables. Frozen entries of the result are zero.
    pub fn chain(&self, d_physical: &[T], filtered: &[T], roles: &[ElementRole]) -> Vec<T> {
        let g: Vec<T> = (0..filtered.len())
            .map(|i| {
                if !roles[i].is_free() {
                    return T::zero();
                }
                d_physical[i] * (T::one() - self.rho_min) * heaviside_derivative(filtered[i], self.beta, self.eta)
            })
            .collect();
        let mut out = self.filter.apply_transpose(&g);
        for (o, role) in out.iter_mut().zip(roles) {
            if !role.is_free() {
                *o = T::zero();
            }
        }
        out
    }
}

/// `∂C/∂ρ_e = −p ρ_e^{p−1} (E0 − E_min) u_eᵀ K_e^0 u_e` per element, with
/// respect to the physical densities. All entries are `≤ 0`.
pub fn compliance_sensitivity<T: Scalar>(densities: &[T], energies: &[T], penalty: T, e0: T, emin: T) -> Vec<T> {
    densities
        .iter()
        .zip(energies)
        .map(|(&rho, &w)| -penalty * rho.powf(penalty - T::one()) * (e0 - emin) * w.max(T::zero()))
        .collect()
}

/// Compliance of the physical field generated by design `x`, and its
/// derivative with respect to every design variable.
pub fn design_compliance_gradient<T: Scalar>(
    system: &mut FeaSystem<T>,
    map: &ThreeField<T>,
    x: &[T],
    roles: &[ElementRole],
    penalty: T,
    options: &SimpOptions<T>,
) -> Result<(Solution<T>, Vec<T>), SimpError> {
    let (filtered, physical) = map.forward(x, roles);
    let moduli: Vec<T> = physical.iter().map(|&r| simp_modulus(r, penalty, options.e0, options.emin)).collect();
    let sol = system.solve(&moduli)?;
    let energies = system.element_energies(&sol.displacement);
    let dphys = compliance_sensitivity(&physical, &energies, penalty, options.e0, options.emin);
    let grad = map.chain(&dphys, &filtered, roles);
    Ok((sol, grad))
}

/// One optimizer iteration as logged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    #[serde(flatten)]
    pub params: IterationParams,
    /// Compliance of the field entering this iteration.
    pub compliance: f64,
    /// Free-mean physical density minus the free-volume target after the update.
    pub volume_error: f64,
    /// Largest design-variable change in the update.
    pub change: f64,
    pub linear_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimpStatus {
    Completed,
    /// Compliance became non-finite; the returned field is the last good one.
    NonFiniteCompliance,
}

#[derive(Debug, Clone)]
pub struct SimpResult<T> {
    /// Final physical densities.
    pub density: DensityField<T>,
    /// Final design variables.
    pub design: Vec<T>,
    /// Compliance of `density` at the tail penalty.
    pub compliance: T,
    pub displacement: DisplacementField<T>,
    /// Optimizer iterations executed in this solve.
    pub iterations: usize,
    /// Main-loop iteration budget.
    pub max_iter: usize,
    pub status: SimpStatus,
    pub log: Vec<IterationRecord>,
}

/// Free-element physical mean that meets volume fraction `vf` of the
/// non-void domain given the frozen solids. Zero when nothing is free.
pub fn free_volume_target(roles: &[ElementRole], vf: f64) -> Result<f64, SimpError> {
    let n_free = roles.iter().filter(|r| r.is_free()).count();
    let n_solid = roles.iter().filter(|r| **r == ElementRole::Solid).count();
    let n_design = n_free + n_solid;
    if n_free == 0 {
        return Ok(0.0);
    }
    let target = (vf * n_design as f64 - n_solid as f64) / n_free as f64;
    if !(RHO_MIN..=1.0).contains(&target) {
        return Err(SimpError::VolumeTargetUnreachable { target, attainable: target.clamp(RHO_MIN, 1.0) });
    }
    Ok(target)
}

pub fn simp_solve<T: Scalar>(spec: &ProblemSpec) -> Result<SimpResult<T>, SimpError> {
    simp_solve_observed(spec, &SimpOptions::default(), |_, _| {})
}

/// Runs the full main loop and tail. `observer` sees every iteration record
/// together with the physical field after the update.
pub fn simp_solve_observed<T: Scalar>(
    spec: &ProblemSpec,
    options: &SimpOptions<T>,
    mut observer: impl FnMut(&IterationRecord, &[T]),
) -> Result<SimpResult<T>, SimpError> {
    spec.validate()?;
    let mesh = &spec.mesh;
    let bc: BoundaryConditions<T> = spec.boundary_conditions()?;
    let fea = FeaOptions { poisson: spec.solver.poisson, ..options.fea };
    let mut system = FeaSystem::new(mesh, &bc, fea)?;
    let schedule = ContinuationSchedule::for_spec(spec);

    let init = apply_seed_initialization::<T>(spec, &spec.regions, options.rho_min)?;
    let roles = init.roles.clone();
    let target = T::lit(free_volume_target(&roles, spec.vf)?);
    let mut x = init.values;
    let mut log = Vec::with_capacity(schedule.total_iterations());
    let mut map: Option<ThreeField<T>> = None;
    let mut status = SimpStatus::Completed;

    for k in 0..schedule.total_iterations() {
        let params = schedule.params(k);
        let rebuild = map.as_ref().is_none_or(|m| m.filter.radius() != params.r_min);
        if rebuild {
            map = Some(ThreeField::new(mesh, params.r_min, T::lit(params.beta), options.eta, options.rho_min));
        }
        let m = map.as_mut().expect("map built");
        m.beta = T::lit(params.beta);
        let penalty = T::lit(params.penalty);
        let (sol, dc) = design_compliance_gradient(&mut system, m, &x, &roles, penalty, options)?;
        let compliance = sol.compliance;
        if !compliance.is_finite() {
            status = SimpStatus::NonFiniteCompliance;
            break;
        }
        let (filtered, _) = m.forward(&x, &roles);
        let n_free = T::lit(roles.iter().filter(|r| r.is_free()).count() as f64);
        let dphys_v: Vec<T> = roles.iter().map(|r| if r.is_free() { T::one() / n_free } else { T::zero() }).collect();
        let dv = m.chain(&dphys_v, &filtered, &roles);
        let m_ref = &*m;
        let volume = |cand: &[T]| field::free_mean(&m_ref.forward(cand, &roles).1, &roles);
        let step = |m: f64| oc_update_with(&x, &dc, &dv, &roles, T::lit(m), options.rho_min, target, volume);
        // A projection change can shift the physical volume further than one
        // move-limited step recovers; such steps run without the move limit.
        let next = match step(params.move_limit) {
            Err(SimpError::VolumeTargetUnreachable { .. }) => step(1.0)?,
            other => other?,
        };
        let change = x.iter().zip(&next).fold(0.0f64, |c, (a, b)| c.max((*a - *b).abs().as_f64()));
        x = next;
        let physical = m.forward(&x, &roles).1;
        let record = IterationRecord {
            iteration: k,
            params,
            compliance: compliance.as_f64(),
            volume_error: (field::free_mean(&physical, &roles) - target).as_f64(),
            change,
            linear_iterations: sol.iterations,
        };
        observer(&record, &physical);
        log.push(record);
    }

    let map = map.expect("at least one iteration");
    let physical = map.forward(&x, &roles).1;
    let tail_p = T::lit(schedule.tail.penalty);
    let moduli: Vec<T> = physical.iter().map(|&r| simp_modulus(r, tail_p, options.e0, options.emin)).collect();
    let sol = system.solve(&moduli)?;
    if !sol.compliance.is_finite() {
        status = SimpStatus::NonFiniteCompliance;
    }
    Ok(SimpResult {
        iterations: log.len(),
        density: DensityField { values: physical, roles },
        design: x,
        compliance: sol.compliance,
        displacement: sol.displacement,
        max_iter: schedule.max_iter,
        status,
        log,
    })
}

use serde::{Deserialize, Serialize};

use crate::fea::Mesh;
use crate::problem::{ProblemSpec, RegionKind, SeedRegion, SpecError};
use crate::scalar::Scalar;

/// Whether the optimizer may change an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementRole {
    Free,
    /// Frozen at the density lower bound.
    Void,
    /// Frozen at full density.
    Solid,
}

impl ElementRole {
    pub fn is_free(self) -> bool {
        self == ElementRole::Free
    }
}

/// Per-element densities with their frozen/free tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityField<T> {
    pub values: Vec<T>,
    pub roles: Vec<ElementRole>,
}

impl<T: Scalar> DensityField<T> {
    pub fn uniform(n: usize, value: T) -> Self {
        Self { values: vec![value; n], roles: vec![ElementRole::Free; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_free(&self) -> usize {
        self.roles.iter().filter(|r| r.is_free()).count()
    }

    /// Mean over elements not frozen void.
    pub fn nonvoid_mean(&self) -> T {
        let (sum, count) = self
            .values
            .iter()
            .zip(&self.roles)
            .filter(|(_, r)| **r != ElementRole::Void)
            .fold((T::zero(), 0usize), |(s, c), (&v, _)| (s + v, c + 1));
        if count == 0 {
            T::zero()
        } else {
            sum / T::lit(count as f64)
        }
    }

    /// Mean over free elements.
    pub fn free_mean(&self) -> T {
        free_mean(&self.values, &self.roles)
    }

    pub fn convert<U: Scalar>(&self) -> DensityField<U> {
        DensityField { values: self.values.iter().map(|v| U::lit(v.as_f64())).collect(), roles: self.roles.clone() }
    }
}

pub(crate) fn free_mean<T: Scalar>(values: &[T], roles: &[ElementRole]) -> T {
    let (sum, count) = values
        .iter()
        .zip(roles)
        .filter(|(_, r)| r.is_free())
        .fold((T::zero(), 0usize), |(s, c), (&v, _)| (s + v, c + 1));
    if count == 0 {
        T::zero()
    } else {
        sum / T::lit(count as f64)
    }
}

/// Builds the initial design field: free elements at `v_f`, then seed regions
/// in order (later ones overwrite), then solid, then void regions. Frozen tags
/// therefore take precedence void > solid > seed.
pub fn apply_seed_initialization<T: Scalar>(
    spec: &ProblemSpec,
    regions: &[SeedRegion],
    rho_min: T,
) -> Result<DensityField<T>, SpecError> {
    let mesh: &Mesh = &spec.mesh;
    let ext = mesh.extent();
    for (index, r) in regions.iter().enumerate() {
        if !r.shape.intersects_box(ext[0], ext[1]) {
            return Err(SpecError::RegionOutsideDomain { index });
        }
    }
    let mut field = DensityField::uniform(mesh.n_elements(), T::lit(spec.vf));
    for kind in [RegionKind::Seed, RegionKind::Solid, RegionKind::Void] {
        for r in regions.iter().filter(|r| r.kind == kind) {
            for e in r.elements(mesh) {
                match kind {
                    RegionKind::Seed => {
                        field.values[e] = T::lit(r.density());
                        field.roles[e] = ElementRole::Free;
                    }
                    RegionKind::Solid => {
                        field.values[e] = T::one();
                        field.roles[e] = ElementRole::Solid;
                    }
                    RegionKind::Void => {
                        field.values[e] = rho_min;
                        field.roles[e] = ElementRole::Void;
                    }
                }
            }
        }
    }
    Ok(field)
}

//! The modifier: turns an admissible action into an edited spec.

use serde::{Deserialize, Serialize};
use stressgate_core::problem::{ProblemSpec, RegionShape, SeedRegion};

use crate::action::{widen_centers, Action, ActionParams, Circle};

/// How seed-type actions mark their elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedMode {
    /// Elevated initial density, otherwise free.
    #[default]
    Soft,
    /// Frozen at density 1.
    Passive,
}

fn shape(c: &Circle) -> RegionShape {
    RegionShape::Circle { center: c.center, radius: c.radius }
}

fn seed(mode: SeedMode, c: &Circle, density: f64) -> SeedRegion {
    match mode {
        SeedMode::Soft => SeedRegion::seed(shape(c), density),
        SeedMode::Passive => SeedRegion::solid(shape(c)),
    }
}

/// Applies `action` to a copy of `spec`. Call [`crate::validate_action`]
/// first; this function does not re-check bounds.
pub fn apply_action(spec: &ProblemSpec, action: &Action, mode: SeedMode) -> ProblemSpec {
    let mut out = spec.clone();
    match &action.params {
        ActionParams::ChangeVolumeFraction(c) => {
            if let Some(v) = c.target(spec.vf) {
                out.vf = v;
            }
        }
        ActionParams::ChangeFilterRadius(c) => {
            if let Some(v) = c.target(spec.solver.filter_radius) {
                out.solver.filter_radius = v;
            }
        }
        ActionParams::ChangePenalization(c) => {
            if let Some(v) = c.target(spec.solver.penalty_start) {
                out.solver.penalty_start = v;
            }
        }
        ActionParams::InsertPassiveVoid(c) => out.regions.push(SeedRegion::void(shape(c))),
        ActionParams::InsertFrozenSolid(c) => out.regions.push(SeedRegion::solid(shape(c))),
        ActionParams::ReinforceHotspot { center, radius, seed_density } => {
            out.regions.push(seed(mode, &Circle { center: *center, radius: *radius }, *seed_density));
        }
        ActionParams::WidenMember { polyline, radius, seed_density } => {
            for center in widen_centers(polyline, *radius) {
                out.regions.push(seed(mode, &Circle { center, radius: *radius }, *seed_density));
            }
        }
        ActionParams::RedistributeMaterial { source, target, seed_density } => {
            out.regions.push(SeedRegion::void(shape(source)));
            out.regions.push(seed(mode, target, *seed_density));
        }
    }
    out
}

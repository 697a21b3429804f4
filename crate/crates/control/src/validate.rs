//! Admissibility checks applied before the modifier touches a spec.

use serde::{Deserialize, Serialize};
use stressgate_core::problem::ProblemSpec;

use crate::action::{Action, ActionKind, ActionParams, Circle, ScalarChange};

pub const VF_BOUNDS: (f64, f64) = (0.05, 0.95);
pub const PENALTY_BOUNDS: (f64, f64) = (1.0, 4.5);
pub const FILTER_RADIUS_BOUNDS: (f64, f64) = (1.2, 6.0);
pub const SEED_DENSITY_BOUNDS: (f64, f64) = (0.80, 0.95);
pub const MIN_REGION_RADIUS: f64 = 0.5;
/// Largest circle radius as a share of the shorter planar extent.
pub const MAX_REGION_RADIUS_SHARE: f64 = 0.25;
pub const MAX_POLYLINE_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "reason", content = "detail", rename_all = "snake_case")]
pub enum Rejection {
    #[error("action kind {0} is not allowed in this condition")]
    NotAllowed(ActionKind),
    #[error("exact repeat of a previously applied action")]
    Duplicate,
    #[error("region outside the domain: {0}")]
    OutsideDomain(String),
    #[error("void region would cover a load point")]
    VoidCoversLoad,
    #[error("volume fraction target {0} outside (0.05, 0.95)")]
    VolumeFractionOutOfRange(f64),
    #[error("parameter out of bounds: {0}")]
    ParameterOutOfBounds(String),
    #[error("action leaves the spec unchanged")]
    NoChange,
}

fn in_closed(v: f64, (lo, hi): (f64, f64)) -> bool {
    v.is_finite() && v >= lo - 1e-12 && v <= hi + 1e-12
}

fn scalar_target(change: &ScalarChange, current: f64, name: &str) -> Result<f64, Rejection> {
    let target = change
        .target(current)
        .ok_or_else(|| Rejection::ParameterOutOfBounds(format!("{name}: neither delta nor value given")))?;
    if !target.is_finite() {
        return Err(Rejection::ParameterOutOfBounds(format!("{name}: non-finite target")));
    }
    if (target - current).abs() <= 1e-12 {
        return Err(Rejection::NoChange);
    }
    Ok(target)
}

fn check_bounded(target: f64, bounds: (f64, f64), name: &str) -> Result<(), Rejection> {
    if in_closed(target, bounds) {
        Ok(())
    } else {
        Err(Rejection::ParameterOutOfBounds(format!("{name} {target} outside [{}, {}]", bounds.0, bounds.1)))
    }
}

fn check_point(spec: &ProblemSpec, p: [f64; 2], what: &str) -> Result<(), Rejection> {
    let [lx, ly, _] = spec.mesh.extent();
    let inside = p.iter().all(|v| v.is_finite()) && p[0] >= 0.0 && p[0] <= lx && p[1] >= 0.0 && p[1] <= ly;
    if inside {
        Ok(())
    } else {
        Err(Rejection::OutsideDomain(format!("{what} ({}, {}) not in [0, {lx}] × [0, {ly}]", p[0], p[1])))
    }
}

fn max_radius(spec: &ProblemSpec) -> f64 {
    let [lx, ly, _] = spec.mesh.extent();
    (MAX_REGION_RADIUS_SHARE * lx.min(ly)).max(MIN_REGION_RADIUS)
}

fn check_radius(spec: &ProblemSpec, r: f64) -> Result<(), Rejection> {
    check_bounded(r, (MIN_REGION_RADIUS, max_radius(spec)), "radius")
}

fn check_circle(spec: &ProblemSpec, c: &Circle, what: &str) -> Result<(), Rejection> {
    check_point(spec, c.center, what)?;
    check_radius(spec, c.radius)
}

fn check_seed_density(d: f64) -> Result<(), Rejection> {
    check_bounded(d, SEED_DENSITY_BOUNDS, "seed_density")
}

fn covers_load(spec: &ProblemSpec, c: &Circle) -> bool {
    let Ok(points) = spec.load_points() else {
        return false;
    };
    points.iter().any(|p| {
        let d2 = (p[0] - c.center[0]).powi(2) + (p[1] - c.center[1]).powi(2);
        d2 <= c.radius * c.radius + 1e-9
    })
}

/// Checks `action` against the current spec and the applied history
/// (history entries are stored in resolved form).
pub fn validate_action(action: &Action, spec: &ProblemSpec, history: &[Action]) -> Result<(), Rejection> {
    match &action.params {
        ActionParams::ChangeVolumeFraction(c) => {
            let target = scalar_target(c, spec.vf, "volume fraction")?;
            if !(target > VF_BOUNDS.0 && target < VF_BOUNDS.1) {
                return Err(Rejection::VolumeFractionOutOfRange(target));
            }
        }
        ActionParams::ChangeFilterRadius(c) => {
            let target = scalar_target(c, spec.solver.filter_radius, "filter radius")?;
            check_bounded(target, FILTER_RADIUS_BOUNDS, "filter radius")?;
        }
        ActionParams::ChangePenalization(c) => {
            let target = scalar_target(c, spec.solver.penalty_start, "penalization")?;
            check_bounded(target, PENALTY_BOUNDS, "penalization")?;
        }
        ActionParams::InsertPassiveVoid(c) => {
            check_circle(spec, c, "void center")?;
            if covers_load(spec, c) {
                return Err(Rejection::VoidCoversLoad);
            }
        }
        ActionParams::InsertFrozenSolid(c) => check_circle(spec, c, "solid center")?,
        ActionParams::ReinforceHotspot { center, radius, seed_density } => {
            check_circle(spec, &Circle { center: *center, radius: *radius }, "hotspot center")?;
            check_seed_density(*seed_density)?;
        }
        ActionParams::WidenMember { polyline, radius, seed_density } => {
            if polyline.len() < 2 || polyline.len() > MAX_POLYLINE_POINTS {
                return Err(Rejection::ParameterOutOfBounds(format!(
                    "polyline needs 2..={MAX_POLYLINE_POINTS} points, got {}",
                    polyline.len()
                )));
            }
            for p in polyline {
                check_point(spec, *p, "polyline point")?;
            }
            check_radius(spec, *radius)?;
            check_seed_density(*seed_density)?;
        }
        ActionParams::RedistributeMaterial { source, target, seed_density } => {
            check_circle(spec, source, "source center")?;
            check_circle(spec, target, "target center")?;
            check_seed_density(*seed_density)?;
            if covers_load(spec, source) {
                return Err(Rejection::VoidCoversLoad);
            }
        }
    }
    let resolved = action.resolved(spec);
    if history.iter().any(|h| h.params == resolved.params) {
        return Err(Rejection::Duplicate);
    }
    Ok(())
}

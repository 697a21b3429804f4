//! Problem specifications: domain, supports, loads, volume target, regions
//! and solver settings. This is the document the outer design loop edits and
//! the JSON schema accepted from users.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fea::{BoundaryConditions, Dim, FeaError, Mesh};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error(transparent)]
    Fea(#[from] FeaError),
    #[error("volume fraction {0} outside (0, 1)")]
    VolumeFraction(f64),
    #[error("selector {0} matches no node")]
    EmptySelector(String),
    #[error("force vector has {got} components, expected {expected}")]
    ForceDimension { expected: usize, got: usize },
    #[error("region {index} lies entirely outside the domain")]
    RegionOutsideDomain { index: usize },
    #[error("region {index}: {reason}")]
    InvalidRegion { index: usize, reason: String },
    #[error("invalid solver setting: {0}")]
    Solver(String),
    #[error("no designable elements remain outside void regions")]
    NoDesignableElements,
}

/// Material state a region imposes on the elements it covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    /// Frozen at the density lower bound.
    Void,
    /// Frozen at full density.
    Solid,
    /// Initialized at an elevated density, otherwise free.
    Seed,
}

/// Planar region geometry; in 3D it is extruded through the full depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum RegionShape {
    Circle { center: [f64; 2], radius: f64 },
    Rectangle { center: [f64; 2], half_extents: [f64; 2] },
}

const INSIDE_EPS: f64 = 1e-9;

impl RegionShape {
    pub fn center(&self) -> [f64; 2] {
        match *self {
            RegionShape::Circle { center, .. } | RegionShape::Rectangle { center, .. } => center,
        }
    }

    /// Closed-set membership of a planar point.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        match *self {
            RegionShape::Circle { center, radius } => {
                let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
                (dx * dx + dy * dy).sqrt() <= radius + INSIDE_EPS
            }
            RegionShape::Rectangle { center, half_extents } => {
                (p[0] - center[0]).abs() <= half_extents[0] + INSIDE_EPS
                    && (p[1] - center[1]).abs() <= half_extents[1] + INSIDE_EPS
            }
        }
    }

    /// Whether the shape overlaps the closed rectangle `[0, lx] x [0, ly]`.
    pub fn intersects_box(&self, lx: f64, ly: f64) -> bool {
        match *self {
            RegionShape::Circle { center, radius } => {
                let cx = center[0].clamp(0.0, lx);
                let cy = center[1].clamp(0.0, ly);
                let (dx, dy) = (center[0] - cx, center[1] - cy);
                (dx * dx + dy * dy).sqrt() <= radius
            }
            RegionShape::Rectangle { center, half_extents } => {
                center[0] + half_extents[0] >= 0.0
                    && center[0] - half_extents[0] <= lx
                    && center[1] + half_extents[1] >= 0.0
                    && center[1] - half_extents[1] <= ly
            }
        }
    }

    fn check(&self) -> Result<(), String> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match *self {
            RegionShape::Circle { center, radius } => {
                if !finite(&center) || !(radius > 0.0 && radius.is_finite()) {
                    return Err(format!("circle needs finite center and positive radius, got {center:?} r={radius}"));
                }
            }
            RegionShape::Rectangle { center, half_extents } => {
                if !finite(&center) || !(half_extents[0] > 0.0 && half_extents[1] > 0.0) || !finite(&half_extents) {
                    return Err(format!("rectangle needs positive half extents, got {half_extents:?}"));
                }
            }
        }
        Ok(())
    }
}

/// Default initial density of soft seeds placed on a stress hotspot.
pub const DEFAULT_HOTSPOT_SEED_DENSITY: f64 = 0.85;
/// Default initial density of soft seeds along a widened member.
pub const DEFAULT_WIDEN_SEED_DENSITY: f64 = 0.80;

/// A geometric region tagged with how the solver treats covered elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedRegion {
    #[serde(flatten)]
    pub shape: RegionShape,
    pub kind: RegionKind,
    /// Initial density for `seed` regions; ignored for the frozen kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_density: Option<f64>,
}

impl SeedRegion {
    pub fn void(shape: RegionShape) -> Self {
        Self { shape, kind: RegionKind::Void, seed_density: None }
    }

    pub fn solid(shape: RegionShape) -> Self {
        Self { shape, kind: RegionKind::Solid, seed_density: None }
    }

    pub fn seed(shape: RegionShape, density: f64) -> Self {
        Self { shape, kind: RegionKind::Seed, seed_density: Some(density) }
    }

    pub fn density(&self) -> f64 {
        match self.kind {
            RegionKind::Void => 0.0,
            RegionKind::Solid => 1.0,
            RegionKind::Seed => self.seed_density.unwrap_or(DEFAULT_HOTSPOT_SEED_DENSITY),
        }
    }

    /// Elements whose centroid lies in the region.
    pub fn elements(&self, mesh: &Mesh) -> Vec<usize> {
        (0..mesh.n_elements())
            .filter(|&e| {
                let c = mesh.centroid(e);
                self.shape.contains([c[0], c[1]])
            })
            .collect()
    }
}

/// Domain face, used to select boundary nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Face {
    /// `x = 0`
    Left,
    /// `x = Lx`
    Right,
    /// `y = 0`
    Bottom,
    /// `y = Ly`
    Top,
    /// `z = 0`
    Back,
    /// `z = Lz`
    Front,
}

/// Set of grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeSelector {
    Face(Face),
    /// The grid node nearest to a point (2 or 3 coordinates).
    Node(Vec<f64>),
    /// All nodes inside a closed axis-aligned box.
    Box {
        min: Vec<f64>,
        max: Vec<f64>,
    },
}

impl NodeSelector {
    pub fn select(&self, mesh: &Mesh) -> Result<Vec<usize>, SpecError> {
        let ext = mesh.extent();
        let pad = |v: &[f64]| -> [f64; 3] {
            [v.first().copied().unwrap_or(0.0), v.get(1).copied().unwrap_or(0.0), v.get(2).copied().unwrap_or(0.0)]
        };
        let nodes: Vec<usize> = match self {
            NodeSelector::Face(face) => (0..mesh.n_nodes())
                .filter(|&n| {
                    let p = mesh.node_position(n);
                    match face {
                        Face::Left => p[0] == 0.0,
                        Face::Right => p[0] == ext[0],
                        Face::Bottom => p[1] == 0.0,
                        Face::Top => p[1] == ext[1],
                        Face::Back => mesh.dim() == Dim::Three && p[2] == 0.0,
                        Face::Front => mesh.dim() == Dim::Three && p[2] == ext[2],
                    }
                })
                .collect(),
            NodeSelector::Node(coords) => {
                let p = pad(coords);
                if !mesh.contains(p) {
                    return Err(SpecError::EmptySelector(format!("{self:?}")));
                }
                let r = |v: f64| v.round().max(0.0) as usize;
                mesh.node_at(r(p[0]), r(p[1]), r(p[2])).into_iter().collect()
            }
            NodeSelector::Box { min, max } => {
                let (lo, hi) = (pad(min), pad(max));
                let eps = 1e-9;
                (0..mesh.n_nodes())
                    .filter(|&n| {
                        let p = mesh.node_position(n);
                        let axes = if mesh.dim() == Dim::Three { 3 } else { 2 };
                        (0..axes).all(|a| p[a] >= lo[a] - eps && p[a] <= hi[a] + eps)
                    })
                    .collect()
            }
        };
        if nodes.is_empty() {
            return Err(SpecError::EmptySelector(format!("{self:?}")));
        }
        Ok(nodes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Zero-displacement constraint on the selected nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub select: NodeSelector,
    pub dofs: Vec<Axis>,
}

/// Force whose total is split equally over the selected nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadSpec {
    pub select: NodeSelector,
    pub force: Vec<f64>,
}

/// Tunable schedule parameters a controller may edit, plus fixed numerics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    /// Penalty at the start of the continuation ramp.
    pub penalty_start: f64,
    /// Filter radius used before the late-loop tightening.
    pub filter_radius: f64,
    /// Main-loop OC move limit.
    pub move_limit: f64,
    /// Main-loop iteration count; `None` picks 120 (2D) or 80 (3D).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    pub poisson: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            penalty_start: 1.0,
            filter_radius: 2.4,
            move_limit: 0.2,
            max_iter: None,
            poisson: crate::fea::DEFAULT_POISSON,
        }
    }
}

/// A complete, editable topology-optimization problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u32>,
    #[serde(default)]
    pub name: String,
    /// Element counts per axis.
    #[serde(rename = "dims")]
    pub mesh: Mesh,
    /// Target volume fraction of the non-void domain.
    pub vf: f64,
    pub supports: Vec<Support>,
    pub loads: Vec<LoadSpec>,
    #[serde(default)]
    pub regions: Vec<SeedRegion>,
    #[serde(default)]
    pub solver: SolverSettings,
}

impl ProblemSpec {
    pub fn dim(&self) -> Dim {
        self.mesh.dim()
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Main-loop iteration budget.
    pub fn max_iter(&self) -> usize {
        self.solver.max_iter.unwrap_or(match self.dim() {
            Dim::Two => 120,
            Dim::Three => 80,
        })
    }

    pub fn boundary_conditions<T: Scalar>(&self) -> Result<BoundaryConditions<T>, SpecError> {
        let d = self.mesh.dof_per_node();
        let mut fixed = Vec::new();
        for s in &self.supports {
            let nodes = s.select.select(&self.mesh)?;
            for axis in &s.dofs {
                let k = axis.index();
                if k >= d {
                    return Err(SpecError::Fea(FeaError::InvalidBoundaryConditions(format!(
                        "axis {axis:?} on a {d}-DOF mesh"
                    ))));
                }
                fixed.extend(nodes.iter().map(|n| n * d + k));
            }
        }
        let mut loads = Vec::new();
        for l in &self.loads {
            if l.force.len() != d {
                return Err(SpecError::ForceDimension { expected: d, got: l.force.len() });
            }
            let nodes = l.select.select(&self.mesh)?;
            let share = 1.0 / nodes.len() as f64;
            for n in nodes {
                for (k, &f) in l.force.iter().enumerate() {
                    if f != 0.0 {
                        loads.push((n * d + k, T::lit(f * share)));
                    }
                }
            }
        }
        Ok(BoundaryConditions::new(fixed, loads))
    }

    /// Positions of the loaded nodes.
    pub fn load_points(&self) -> Result<Vec<[f64; 3]>, SpecError> {
        let bc = self.boundary_conditions::<f64>()?;
        Ok(bc.load_nodes(&self.mesh).into_iter().map(|n| self.mesh.node_position(n)).collect())
    }

    pub fn void_regions(&self) -> impl Iterator<Item = &SeedRegion> {
        self.regions.iter().filter(|r| r.kind == RegionKind::Void)
    }

    /// Elements not covered by a void region.
    pub fn designable_elements(&self) -> Vec<bool> {
        let mut designable = vec![true; self.mesh.n_elements()];
        for r in self.void_regions() {
            for e in r.elements(&self.mesh) {
                designable[e] = false;
            }
        }
        designable
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if !(self.vf > 0.0 && self.vf < 1.0) {
            return Err(SpecError::VolumeFraction(self.vf));
        }
        let s = &self.solver;
        if !(s.penalty_start >= 1.0 && s.penalty_start.is_finite()) {
            return Err(SpecError::Solver(format!("penalty_start {} < 1", s.penalty_start)));
        }
        if !(s.filter_radius >= 1.0 && s.filter_radius.is_finite()) {
            return Err(SpecError::Solver(format!("filter_radius {} < 1", s.filter_radius)));
        }
        if !(s.move_limit > 0.0 && s.move_limit <= 1.0) {
            return Err(SpecError::Solver(format!("move_limit {} outside (0, 1]", s.move_limit)));
        }
        if s.max_iter == Some(0) {
            return Err(SpecError::Solver("max_iter must be positive".into()));
        }
        let ext = self.mesh.extent();
        for (index, r) in self.regions.iter().enumerate() {
            r.shape.check().map_err(|reason| SpecError::InvalidRegion { index, reason })?;
            if !r.shape.intersects_box(ext[0], ext[1]) {
                return Err(SpecError::RegionOutsideDomain { index });
            }
            if r.kind == RegionKind::Seed {
                let d = r.density();
                if !(d > 0.0 && d <= 1.0) {
                    return Err(SpecError::InvalidRegion { index, reason: format!("seed density {d} outside (0, 1]") });
                }
            }
        }
        if !self.designable_elements().iter().any(|&d| d) {
            return Err(SpecError::NoDesignableElements);
        }
        self.boundary_conditions::<f64>()?.validate(&self.mesh)?;
        Ok(())
    }
}

//! Built-in problem suite and stress-threshold calibration.
//!
//! Coordinates below are one reading of each problem's description; every
//! load has unit total magnitude, split equally when distributed.

use rayon::prelude::*;
use thiserror::Error;

use crate::fea::Mesh;
use crate::problem::{
    Axis, Face, LoadSpec, NodeSelector, ProblemSpec, RegionShape, SeedRegion, SolverSettings, Support,
};
use crate::simp::{simp_solve, SimpError};
use crate::stress::{element_stresses, StressOptions};

/// Reference median threshold used by the three-condition comparison.
pub const REFERENCE_SIGMA_YIELD: f64 = 120.3;
/// Reference threshold of the fixed-volume study.
pub const REFERENCE_SIGMA_YIELD_FIXED_VOLUME: f64 = 163.457;

pub const PROBLEM_COUNT: u32 = 22;
pub const IDS_2D: std::ops::RangeInclusive<u32> = 1..=16;
pub const IDS_3D: std::ops::RangeInclusive<u32> = 17..=22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchmarkError {
    #[error("unknown problem id {0} (expected 1..=22)")]
    UnknownProblem(u32),
    #[error("problem {id} failed to solve: {source}")]
    SolveFailed { id: u32, source: SimpError },
    #[error("percentile {0} outside [0, 100]")]
    Percentile(f64),
    #[error("no problems to calibrate on")]
    Empty,
}

const XY: &[Axis] = &[Axis::X, Axis::Y];
const XYZ: &[Axis] = &[Axis::X, Axis::Y, Axis::Z];

fn support(select: NodeSelector, dofs: &[Axis]) -> Support {
    Support { select, dofs: dofs.to_vec() }
}

fn node(p: &[f64]) -> NodeSelector {
    NodeSelector::Node(p.to_vec())
}

fn boxed(min: &[f64], max: &[f64]) -> NodeSelector {
    NodeSelector::Box { min: min.to_vec(), max: max.to_vec() }
}

fn load(select: NodeSelector, force: &[f64]) -> LoadSpec {
    LoadSpec { select, force: force.to_vec() }
}

fn circle(cx: f64, cy: f64, r: f64) -> SeedRegion {
    SeedRegion::void(RegionShape::Circle { center: [cx, cy], radius: r })
}

/// Void rectangle spanning `[x0, x1] × [y0, y1]`.
fn void_rect(x0: f64, x1: f64, y0: f64, y1: f64) -> SeedRegion {
    SeedRegion::void(RegionShape::Rectangle {
        center: [(x0 + x1) / 2.0, (y0 + y1) / 2.0],
        half_extents: [(x1 - x0) / 2.0, (y1 - y0) / 2.0],
    })
}

/// Pin at the bottom-left corner and roller at the bottom-right corner; in 3D
/// both are lines through the depth.
fn pin_roller(mesh: &Mesh) -> Vec<Support> {
    let [lx, _, lz] = mesh.extent();
    if mesh.dim() == crate::fea::Dim::Three {
        vec![
            support(boxed(&[0.0, 0.0, 0.0], &[0.0, 0.0, lz]), XYZ),
            support(boxed(&[lx, 0.0, 0.0], &[lx, 0.0, lz]), &[Axis::Y]),
        ]
    } else {
        vec![support(node(&[0.0, 0.0]), XY), support(node(&[lx, 0.0]), &[Axis::Y])]
    }
}

fn spec(
    id: u32,
    name: &str,
    dims: &[usize],
    vf: f64,
    supports: Vec<Support>,
    loads: Vec<LoadSpec>,
    regions: Vec<SeedRegion>,
) -> ProblemSpec {
    ProblemSpec {
        id: Some(id),
        name: name.to_string(),
        mesh: Mesh::new(dims).expect("built-in dims are valid"),
        vf,
        supports,
        loads,
        regions,
        solver: SolverSettings::default(),
    }
}

const DOWN: &[f64] = &[0.0, -1.0];
const DOWN3: &[f64] = &[0.0, -1.0, 0.0];

pub fn builtin_problem(id: u32) -> Result<ProblemSpec, BenchmarkError> {
    let left = || support(NodeSelector::Face(Face::Left), XY);
    let left3 = || support(NodeSelector::Face(Face::Left), XYZ);
    let top = || NodeSelector::Face(Face::Top);
    let m2 = |nx: usize, ny: usize| Mesh::new_2d(nx, ny).expect("valid");
    let m3 = |nx: usize, ny: usize, nz: usize| Mesh::new_3d(nx, ny, nz).expect("valid");
    let p = match id {
        1 => spec(1, "Sparse bridge", &[80, 20], 0.18, pin_roller(&m2(80, 20)), vec![load(top(), DOWN)], vec![]),
        2 => spec(
            2,
            "Bridge with circular void",
            &[80, 20],
            0.25,
            pin_roller(&m2(80, 20)),
            vec![load(top(), DOWN)],
            vec![circle(40.0, 9.0, 4.0)],
        ),
        3 => spec(
            3,
            "Cantilever with two voids",
            &[80, 40],
            0.25,
            vec![left()],
            vec![load(node(&[80.0, 20.0]), DOWN)],
            vec![circle(30.0, 28.0, 5.0), circle(30.0, 12.0, 5.0)],
        ),
        4 => spec(
            4,
            "Low-volume cantilever",
            &[60, 30],
            0.12,
            vec![left()],
            vec![load(node(&[60.0, 15.0]), DOWN)],
            vec![],
        ),
        5 => spec(
            5,
            "Asymmetric low-volume cantilever",
            &[90, 30],
            0.18,
            vec![left()],
            vec![load(node(&[90.0, 8.0]), DOWN)],
            vec![],
        ),
        6 => spec(
            6,
            "Central-void frame",
            &[60, 60],
            0.22,
            vec![support(NodeSelector::Face(Face::Bottom), XY)],
            vec![load(node(&[30.0, 60.0]), DOWN)],
            vec![circle(30.0, 30.0, 10.0)],
        ),
        7 => spec(
            7,
            "L-bracket",
            &[40, 40],
            0.30,
            vec![support(boxed(&[0.0, 40.0], &[16.0, 40.0]), XY)],
            vec![load(node(&[40.0, 8.0]), DOWN)],
            vec![void_rect(16.0, 40.0, 16.0, 40.0)],
        ),
        8 => spec(
            8,
            "T-bracket",
            &[40, 60],
            0.25,
            vec![support(boxed(&[16.0, 0.0], &[40.0, 0.0]), XY)],
            vec![load(node(&[40.0, 50.0]), DOWN)],
            vec![void_rect(0.0, 16.0, 0.0, 40.0)],
        ),
        9 => spec(
            9,
            "Simply supported beam",
            &[80, 20],
            0.30,
            vec![support(node(&[0.0, 0.0]), XY), support(node(&[80.0, 0.0]), &[Axis::Y])],
            vec![load(node(&[40.0, 20.0]), DOWN)],
            vec![],
        ),
        10 => spec(
            10,
            "Portal frame",
            &[60, 40],
            0.22,
            vec![support(boxed(&[0.0, 0.0], &[3.0, 0.0]), XY), support(boxed(&[57.0, 0.0], &[60.0, 0.0]), XY)],
            vec![load(top(), DOWN)],
            vec![void_rect(15.0, 45.0, 0.0, 30.0)],
        ),
        11 => spec(
            11,
            "Asymmetric MBB beam",
            &[90, 30],
            0.30,
            vec![support(NodeSelector::Face(Face::Left), &[Axis::X]), support(node(&[90.0, 0.0]), &[Axis::Y])],
            vec![load(node(&[30.0, 30.0]), DOWN)],
            vec![],
        ),
        12 => spec(12, "Deep beam", &[60, 30], 0.35, pin_roller(&m2(60, 30)), vec![load(top(), DOWN)], vec![]),
        13 => spec(
            13,
            "Michell truss",
            &[80, 40],
            0.15,
            pin_roller(&m2(80, 40)),
            vec![load(node(&[40.0, 40.0]), DOWN)],
            vec![],
        ),
        14 => {
            spec(14, "Basic cantilever", &[60, 30], 0.35, vec![left()], vec![load(node(&[60.0, 15.0]), DOWN)], vec![])
        }
        15 => spec(
            15,
            "MBB beam",
            &[90, 30],
            0.35,
            vec![support(NodeSelector::Face(Face::Left), &[Axis::X]), support(node(&[90.0, 0.0]), &[Axis::Y])],
            vec![load(node(&[0.0, 30.0]), DOWN)],
            vec![],
        ),
        16 => spec(
            16,
            "Dual-load cantilever",
            &[60, 30],
            0.30,
            vec![left()],
            vec![load(node(&[60.0, 30.0]), DOWN), load(node(&[60.0, 0.0]), DOWN)],
            vec![],
        ),
        17 => spec(
            17,
            "3D cantilever",
            &[40, 20, 10],
            0.25,
            vec![left3()],
            vec![load(node(&[40.0, 10.0, 5.0]), DOWN3)],
            vec![],
        ),
        18 => spec(
            18,
            "3D MBB beam",
            &[40, 14, 6],
            0.18,
            vec![
                support(NodeSelector::Face(Face::Left), &[Axis::X, Axis::Z]),
                support(boxed(&[40.0, 0.0, 0.0], &[40.0, 0.0, 6.0]), &[Axis::Y]),
            ],
            vec![load(boxed(&[0.0, 14.0, 0.0], &[0.0, 14.0, 6.0]), DOWN3)],
            vec![],
        ),
        19 => spec(19, "3D bridge", &[30, 10, 6], 0.18, pin_roller(&m3(30, 10, 6)), vec![load(top(), DOWN3)], vec![]),
        20 => spec(
            20,
            "3D L-bracket",
            &[20, 20, 5],
            0.25,
            vec![support(boxed(&[0.0, 20.0, 0.0], &[8.0, 20.0, 5.0]), XYZ)],
            vec![load(boxed(&[20.0, 4.0, 0.0], &[20.0, 4.0, 5.0]), DOWN3)],
            vec![void_rect(8.0, 20.0, 8.0, 20.0)],
        ),
        21 => spec(
            21,
            "3D Michell truss",
            &[24, 12, 6],
            0.12,
            pin_roller(&m3(24, 12, 6)),
            vec![load(boxed(&[12.0, 12.0, 0.0], &[12.0, 12.0, 6.0]), DOWN3)],
            vec![],
        ),
        22 => spec(
            22,
            "3D torsion block",
            &[20, 10, 8],
            0.18,
            vec![left3()],
            vec![load(node(&[20.0, 10.0, 4.0]), &[0.0, 0.0, 1.0]), load(node(&[20.0, 0.0, 4.0]), &[0.0, 0.0, -1.0])],
            vec![],
        ),
        other => return Err(BenchmarkError::UnknownProblem(other)),
    };
    Ok(p)
}

pub fn all_problems() -> Vec<ProblemSpec> {
    (1..=PROBLEM_COUNT).map(|id| builtin_problem(id).expect("id in range")).collect()
}

/// Percentile with linear interpolation between order statistics
/// (rank `q/100 · (n − 1)`).
pub fn percentile(values: &[f64], q: f64) -> Result<f64, BenchmarkError> {
    if !(0.0..=100.0).contains(&q) {
        return Err(BenchmarkError::Percentile(q));
    }
    if values.is_empty() {
        return Err(BenchmarkError::Empty);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = q / 100.0 * (v.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    Ok(v[lo] + (v[hi] - v[lo]) * (rank - lo as f64))
}

/// Largest solid-element von Mises stress of a compliance-only solve.
pub fn solid_max_stress(spec: &ProblemSpec) -> Result<f64, SimpError> {
    let result = simp_solve::<f64>(spec)?;
    let options = StressOptions { poisson: spec.solver.poisson, ..StressOptions::default() };
    let stress = element_stresses(&spec.mesh, &result.displacement, &result.density.values, &options)?;
    Ok(stress.max_over_solid(&result.density.values).unwrap_or(0.0))
}

/// Solid-element maxima per problem, solved in parallel.
pub fn stress_maxima(specs: &[ProblemSpec]) -> Result<Vec<f64>, BenchmarkError> {
    specs
        .par_iter()
        .map(|s| solid_max_stress(s).map_err(|source| BenchmarkError::SolveFailed { id: s.id.unwrap_or(0), source }))
        .collect()
}

/// `q`-th percentile of the per-problem solid maxima.
pub fn calibrate_sigma_yield(ids: &[u32], q: f64) -> Result<f64, BenchmarkError> {
    if !(0.0..=100.0).contains(&q) {
        return Err(BenchmarkError::Percentile(q));
    }
    let specs = ids.iter().map(|&id| builtin_problem(id)).collect::<Result<Vec<_>, _>>()?;
    percentile(&stress_maxima(&specs)?, q)
}

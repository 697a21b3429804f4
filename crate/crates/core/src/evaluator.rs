//! Pass/fail gates and informational diagnostics for a solved design.

use serde::{Deserialize, Serialize};

use crate::fea::Mesh;
use crate::problem::{ProblemSpec, SpecError};
use crate::scalar::Scalar;

pub const SOLID_THRESHOLD: f64 = 0.5;
pub const CONNECTIVITY_MIN: f64 = 0.99;
pub const COMPLIANCE_RATIO_MAX: f64 = 2.0;
pub const GRAYNESS_MAX: f64 = 0.15;
pub const VOLUME_TOLERANCE: f64 = 0.05;
pub const CONVERGENCE_FACTOR: f64 = 1.5;

/// Measured value and verdict of one gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateResult {
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

impl GateResult {
    fn at_most(value: f64, threshold: f64) -> Self {
        Self { passed: value <= threshold, value, threshold }
    }

    fn at_least(value: f64, threshold: f64) -> Self {
        Self { passed: value >= threshold, value, threshold }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gates {
    /// Number of load points inside void regions; must be zero.
    pub load_outside_void: GateResult,
    /// Share of solid elements in the largest connected component.
    pub connectivity: GateResult,
    /// `C_final / C_rep`.
    pub compliance_ratio: GateResult,
    pub grayness: GateResult,
    /// `|mean density − v_f|` over the non-void domain.
    pub volume_fraction: GateResult,
    /// Optimizer iterations against `1.5 · n_max`.
    pub convergence: GateResult,
    /// Largest von Mises stress over solid elements against `σ_yield`.
    pub max_stress: GateResult,
}

impl Gates {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &GateResult)> {
        [
            ("load_outside_void", &self.load_outside_void),
            ("connectivity", &self.connectivity),
            ("compliance_ratio", &self.compliance_ratio),
            ("grayness", &self.grayness),
            ("volume_fraction", &self.volume_fraction),
            ("convergence", &self.convergence),
            ("max_stress", &self.max_stress),
        ]
        .into_iter()
    }

    pub fn all_pass(&self) -> bool {
        self.iter().all(|(_, g)| g.passed)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.iter().filter(|(_, g)| !g.passed).map(|(n, _)| n).collect()
    }
}

/// Heuristic indicators that never gate the loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub thin_members: f64,
    pub checkerboard: f64,
    pub load_path_efficiency: f64,
    /// Undefined (`None`) without solid elements.
    pub scf: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub gates: Gates,
    pub diagnostics: Diagnostics,
    pub all_gates_pass: bool,
}

/// Solver bookkeeping consumed by the compliance and convergence gates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub c_final: f64,
    pub c_rep: f64,
    pub total_iterations: usize,
    pub n_max: usize,
}

pub fn solid_mask<T: Scalar>(densities: &[T]) -> Vec<bool> {
    densities.iter().map(|&r| r.as_f64() > SOLID_THRESHOLD).collect()
}

/// Mean of `min(ρ, 1 − ρ) / 0.25`: 0 for a binary field, 2 for `ρ ≡ 0.5`.
pub fn grayness<T: Scalar>(densities: &[T]) -> f64 {
    if densities.is_empty() {
        return 0.0;
    }
    let sum: f64 = densities
        .iter()
        .map(|r| {
            let r = r.as_f64();
            r.min(1.0 - r) / 0.25
        })
        .sum();
    sum / densities.len() as f64
}

/// Fraction of solid elements in the largest connected solid component
/// (8-connected in 2D, 6-connected in 3D). Zero without solid elements.
pub fn connectivity(mesh: &Mesh, solid: &[bool]) -> f64 {
    let total = solid.iter().filter(|&&s| s).count();
    if total == 0 {
        return 0.0;
    }
    let mut seen = vec![false; solid.len()];
    let mut largest = 0;
    let mut stack = Vec::new();
    for start in 0..solid.len() {
        if !solid[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut size = 0;
        while let Some(e) = stack.pop() {
            size += 1;
            for n in mesh.connectivity_neighbors(e) {
                if solid[n] && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        largest = largest.max(size);
    }
    largest as f64 / total as f64
}

/// Fraction of solid elements with at least one non-solid face neighbour.
pub fn thin_member_fraction(mesh: &Mesh, solid: &[bool]) -> f64 {
    solid_fraction_where(solid, |e| mesh.face_neighbors(e).iter().any(|&n| !solid[n]))
}

/// Fraction of solid elements whose face neighbours are all non-solid.
pub fn checkerboard_fraction(mesh: &Mesh, solid: &[bool]) -> f64 {
    solid_fraction_where(solid, |e| {
        let n = mesh.face_neighbors(e);
        !n.is_empty() && n.iter().all(|&n| !solid[n])
    })
}

fn solid_fraction_where(solid: &[bool], pred: impl Fn(usize) -> bool) -> f64 {
    let total = solid.iter().filter(|&&s| s).count();
    if total == 0 {
        return 0.0;
    }
    let hits = (0..solid.len()).filter(|&e| solid[e] && pred(e)).count();
    hits as f64 / total as f64
}

/// `max σ / mean σ` over solid elements.
pub fn stress_concentration_factor<T: Scalar>(von_mises: &[T], densities: &[T]) -> Option<f64> {
    let solid: Vec<f64> = von_mises
        .iter()
        .zip(densities)
        .filter(|(_, r)| r.as_f64() > SOLID_THRESHOLD)
        .map(|(s, _)| s.as_f64())
        .collect();
    if solid.is_empty() {
        return None;
    }
    let max = solid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = solid.iter().sum::<f64>() / solid.len() as f64;
    (mean > 0.0).then(|| max / mean)
}

/// Cells visited by an integer line between two grid cells (Bresenham,
/// generalized to 3D with the dominant-axis stepping scheme).
pub fn rasterize_segment(a: [usize; 3], b: [usize; 3]) -> Vec<[usize; 3]> {
    let p: [i64; 3] = [a[0] as i64, a[1] as i64, a[2] as i64];
    let q: [i64; 3] = [b[0] as i64, b[1] as i64, b[2] as i64];
    let d: Vec<i64> = (0..3).map(|k| (q[k] - p[k]).abs()).collect();
    let s: Vec<i64> = (0..3).map(|k| (q[k] - p[k]).signum()).collect();
    let major = (0..3).max_by_key(|&k| (d[k], std::cmp::Reverse(k))).unwrap_or(0);
    let steps = d[major];
    let mut cur = p;
    let mut err = [0i64; 3];
    for k in 0..3 {
        err[k] = 2 * d[k] - steps;
    }
    let mut out = Vec::with_capacity(steps as usize + 1);
    out.push([cur[0] as usize, cur[1] as usize, cur[2] as usize]);
    for _ in 0..steps {
        for k in 0..3 {
            if k == major {
                continue;
            }
            if err[k] > 0 {
                cur[k] += s[k];
                err[k] -= 2 * steps;
            }
            err[k] += 2 * d[k];
        }
        cur[major] += s[major];
        out.push([cur[0] as usize, cur[1] as usize, cur[2] as usize]);
    }
    out
}

/// Average over load points of the solid share of cells on the straight
/// segment to the nearest fixed node.
pub fn load_path_efficiency(mesh: &Mesh, solid: &[bool], load_points: &[[f64; 3]], fixed_points: &[[f64; 3]]) -> f64 {
    if load_points.is_empty() || fixed_points.is_empty() {
        return 0.0;
    }
    let dist2 = |a: &[f64; 3], b: &[f64; 3]| (0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>();
    let mut total = 0.0;
    for lp in load_points {
        let target = fixed_points.iter().min_by(|a, b| dist2(lp, a).total_cmp(&dist2(lp, b))).expect("non-empty");
        let (Some(a), Some(b)) = (mesh.cell_containing(*lp), mesh.cell_containing(*target)) else {
            continue;
        };
        let cells = rasterize_segment(a, b);
        let hits = cells.iter().filter(|c| solid[mesh.element_index(c[0], c[1], c[2])]).count();
        total += hits as f64 / cells.len() as f64;
    }
    total / load_points.len() as f64
}

/// Runs every gate and diagnostic on one solved state.
pub fn evaluate<T: Scalar>(
    densities: &[T],
    von_mises: &[T],
    spec: &ProblemSpec,
    sigma_yield: f64,
    stats: &SolverStats,
) -> Result<EvaluationResult, SpecError> {
    let mesh = &spec.mesh;
    let solid = solid_mask(densities);
    let bc = spec.boundary_conditions::<f64>()?;
    let load_points: Vec<[f64; 3]> = bc.load_nodes(mesh).into_iter().map(|n| mesh.node_position(n)).collect();
    let fixed_points: Vec<[f64; 3]> = bc.fixed_nodes(mesh).into_iter().map(|n| mesh.node_position(n)).collect();

    let in_void = load_points.iter().filter(|p| spec.void_regions().any(|r| r.shape.contains([p[0], p[1]]))).count();
    let ratio = if stats.c_final.is_finite() && stats.c_rep.is_finite() && stats.c_rep > 0.0 {
        stats.c_final / stats.c_rep
    } else {
        f64::MAX
    };
    let designable = spec.designable_elements();
    let (sum, count) = densities
        .iter()
        .zip(&designable)
        .filter(|(_, &d)| d)
        .fold((0.0, 0usize), |(s, c), (r, _)| (s + r.as_f64(), c + 1));
    let mean = if count == 0 { 0.0 } else { sum / count as f64 };
    let max_solid = von_mises
        .iter()
        .zip(&solid)
        .filter(|(_, &s)| s)
        .map(|(v, _)| v.as_f64())
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    let max_stress = match max_solid {
        Some(v) if v.is_finite() => GateResult::at_most(v, sigma_yield),
        _ => GateResult { passed: false, value: 0.0, threshold: sigma_yield },
    };

    let gates = Gates {
        load_outside_void: GateResult::at_most(in_void as f64, 0.0),
        connectivity: GateResult::at_least(connectivity(mesh, &solid), CONNECTIVITY_MIN),
        compliance_ratio: GateResult::at_most(ratio, COMPLIANCE_RATIO_MAX),
        grayness: GateResult::at_most(grayness(densities), GRAYNESS_MAX),
        volume_fraction: GateResult::at_most((mean - spec.vf).abs(), VOLUME_TOLERANCE),
        convergence: GateResult::at_most(stats.total_iterations as f64, CONVERGENCE_FACTOR * stats.n_max as f64),
        max_stress,
    };
    let diagnostics = Diagnostics {
        thin_members: thin_member_fraction(mesh, &solid),
        checkerboard: checkerboard_fraction(mesh, &solid),
        load_path_efficiency: load_path_efficiency(mesh, &solid, &load_points, &fixed_points),
        scf: stress_concentration_factor(von_mises, densities),
    };
    Ok(EvaluationResult { all_gates_pass: gates.all_pass(), gates, diagnostics })
}

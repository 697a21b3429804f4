#![allow(dead_code)]

use stressgate_control::action::ActionKind;
use stressgate_control::interpret::{InterpreterContext, Proposal};
use stressgate_core::evaluator::{evaluate, EvaluationResult, SolverStats};
use stressgate_core::fea::Mesh;
use stressgate_core::problem::{Axis, Face, LoadSpec, NodeSelector, ProblemSpec, SolverSettings, Support};
use stressgate_core::StressField;

/// Short cantilever: left face clamped, unit load at mid-right.
pub fn small_cantilever(nx: usize, ny: usize, max_iter: usize) -> ProblemSpec {
    ProblemSpec {
        id: None,
        name: "small cantilever".into(),
        mesh: Mesh::new_2d(nx, ny).unwrap(),
        vf: 0.4,
        supports: vec![Support { select: NodeSelector::Face(Face::Left), dofs: vec![Axis::X, Axis::Y] }],
        loads: vec![LoadSpec { select: NodeSelector::Node(vec![nx as f64, ny as f64 / 2.0]), force: vec![0.0, -1.0] }],
        regions: vec![],
        solver: SolverSettings { max_iter: Some(max_iter), ..SolverSettings::default() },
    }
}

/// Owned backing data for an [`InterpreterContext`].
pub struct State {
    pub spec: ProblemSpec,
    pub densities: Vec<f64>,
    pub stress: StressField,
    pub evaluation: EvaluationResult,
    pub history: Vec<stressgate_control::Action>,
    pub allowed: Vec<ActionKind>,
    pub density_png: Vec<u8>,
    pub stress_png: Vec<u8>,
}

impl State {
    /// Binary band design with a smooth stress ramp; every gate passes.
    pub fn passing(mut spec: ProblemSpec) -> Self {
        let mesh = spec.mesh.clone();
        let ny = mesh.ny();
        let densities: Vec<f64> = (0..mesh.n_elements())
            .map(|e| {
                let [_, y, _] = mesh.element_coords(e);
                if y >= ny / 4 && y < ny - ny / 4 {
                    1.0
                } else {
                    1e-3
                }
            })
            .collect();
        spec.vf = densities.iter().sum::<f64>() / densities.len() as f64;
        let von_mises: Vec<f64> = (0..mesh.n_elements()).map(|e| 1.0 + (e % 7) as f64 * 0.01).collect();
        let stress = StressField { components: vec![vec![0.0; 3]; von_mises.len()], von_mises };
        let stats = SolverStats { c_final: 1.0, c_rep: 1.0, total_iterations: 10, n_max: 10 };
        let evaluation = evaluate(&densities, &stress.von_mises, &spec, 1e3, &stats).unwrap();
        Self {
            spec,
            densities,
            stress,
            evaluation,
            history: vec![],
            allowed: ActionKind::ALL.to_vec(),
            density_png: vec![1, 2, 3],
            stress_png: vec![4, 5, 6],
        }
    }

    pub fn fail(&mut self, gate: &str) {
        let g = &mut self.evaluation.gates;
        let target = match gate {
            "max_stress" => &mut g.max_stress,
            "grayness" => &mut g.grayness,
            "compliance_ratio" => &mut g.compliance_ratio,
            "connectivity" => &mut g.connectivity,
            other => panic!("unknown gate {other}"),
        };
        target.passed = false;
        self.evaluation.all_gates_pass = false;
    }

    pub fn ctx(&self) -> InterpreterContext<'_> {
        InterpreterContext {
            spec: &self.spec,
            densities: &self.densities,
            stress: &self.stress,
            density_png: &self.density_png,
            stress_png: &self.stress_png,
            evaluation: &self.evaluation,
            c_current: 12.5,
            c_retained: Some(12.0),
            history: &self.history,
            step: self.history.len(),
            budget: 5,
            allowed: &self.allowed,
        }
    }
}

pub fn kinds(p: &Proposal) -> Vec<ActionKind> {
    p.actions.iter().map(|a| a.kind()).collect()
}

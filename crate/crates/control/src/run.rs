//! The outer design loop and its trace.

use serde::{Deserialize, Serialize};
use stressgate_core::evaluator::{evaluate, grayness, EvaluationResult, SolverStats, GRAYNESS_MAX};
use stressgate_core::problem::ProblemSpec;
use stressgate_core::render::{render_density_png, render_stress_png};
use stressgate_core::simp::simp_solve;
use stressgate_core::stress::{element_stresses, StressOptions};
use stressgate_core::{SimpResult, StressField};

use crate::action::{Action, ActionKind};
use crate::interpret::{max_stress_element, Interpreter, InterpreterContext, Proposal};
use crate::modify::{apply_action, SeedMode};
use crate::validate::{validate_action, Rejection};
use crate::ControlError;

pub const TRACE_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_T_MAX: usize = 5;
pub const CONVERGED_RATIO: f64 = 1.05;
pub const CONVERGED_LOAD_PATH: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopConfig {
    pub t_max: usize,
    pub sigma_yield: f64,
    pub seed: u64,
    pub seed_mode: SeedMode,
    /// Kinds the modifier accepts; anything else is rejected.
    pub allowed: Vec<ActionKind>,
    /// Label copied into the trace.
    pub condition: String,
    pub fixed_volume: bool,
    pub converge_ratio: f64,
    pub converge_load_path: f64,
}

impl LoopConfig {
    pub fn new(sigma_yield: f64) -> Self {
        Self {
            t_max: DEFAULT_T_MAX,
            sigma_yield,
            seed: 0,
            seed_mode: SeedMode::Soft,
            allowed: ActionKind::ALL.to_vec(),
            condition: "custom".to_string(),
            fixed_volume: false,
            converge_ratio: CONVERGED_RATIO,
            converge_load_path: CONVERGED_LOAD_PATH,
        }
    }

    pub fn for_condition(condition: crate::Condition, sigma_yield: f64, seed: u64, fixed_volume: bool) -> Self {
        Self {
            seed,
            seed_mode: condition.seed_mode(),
            allowed: condition.vocabulary(fixed_volume),
            condition: condition.name().to_string(),
            fixed_volume,
            ..Self::new(sigma_yield)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// All gates pass, the compliance ratio is near one and the load path is solid.
    Converged,
    NoAdmissibleAction,
    BudgetExhausted,
    SolverFailure,
}

/// Relative PNG paths of one step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImagePaths {
    pub density: String,
    pub stress: String,
}

impl ImagePaths {
    pub fn new(run_id: &str, step: usize) -> Self {
        Self { density: format!("{run_id}/step{step}_density.png"), stress: format!("{run_id}/step{step}_stress.png") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedCandidate {
    /// Position in the ranked proposal list.
    pub index: usize,
    pub reason: Rejection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    /// Spec solved at this step.
    pub spec: ProblemSpec,
    /// Solver error when the step could not be solved.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub compliance: Option<f64>,
    pub solver_iterations: usize,
    pub retained_eligible: bool,
    /// Retained-best compliance after this step.
    pub c_rep: Option<f64>,
    pub retained_step: Option<usize>,
    pub evaluation: Option<EvaluationResult>,
    pub max_stress_element: Option<usize>,
    pub density: Vec<f64>,
    pub von_mises: Vec<f64>,
    pub images: Option<ImagePaths>,
    pub proposal: Proposal,
    pub rejections: Vec<RejectedCandidate>,
    /// Applied action in resolved form (scalar edits as absolute values).
    pub applied: Option<Action>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub schema_version: u32,
    pub run_id: String,
    pub problem_id: Option<u32>,
    pub problem_name: String,
    pub condition: String,
    pub seed: u64,
    pub sigma_yield: f64,
    pub fixed_volume: bool,
    pub t_max: usize,
    pub initial_vf: f64,
    pub steps: Vec<StepRecord>,
    pub stop_reason: StopReason,
}

impl RunTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Step holding the retained-best state.
    pub fn retained_step(&self) -> Option<&StepRecord> {
        let idx = self.steps.last()?.retained_step?;
        self.steps.get(idx)
    }

    pub fn final_step(&self) -> Option<&StepRecord> {
        self.steps.iter().rev().find(|s| s.failure.is_none())
    }

    pub fn applied_actions(&self) -> impl Iterator<Item = (usize, &Action)> {
        self.steps.iter().filter_map(|s| s.applied.as_ref().map(|a| (s.step, a)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StepImages {
    pub density: Vec<u8>,
    pub stress: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub trace: RunTrace,
    /// PNG bytes per step; `None` for steps whose solve failed.
    pub images: Vec<Option<StepImages>>,
}

/// A state may become the retained best only with finite positive
/// compliance and a near-binary density field.
pub fn retained_eligible(densities: &[f64], compliance: f64) -> bool {
    compliance.is_finite() && compliance > 0.0 && grayness(densities) <= GRAYNESS_MAX
}

struct Solved {
    result: SimpResult,
    stress: StressField,
    images: StepImages,
}

fn solve_state(spec: &ProblemSpec) -> Result<Solved, ControlError> {
    let result = simp_solve::<f64>(spec)?;
    let options = StressOptions { poisson: spec.solver.poisson, ..StressOptions::default() };
    let rho = &result.density.values;
    let stress = element_stresses(&spec.mesh, &result.displacement, rho, &options)?;
    let images = StepImages {
        density: render_density_png(&spec.mesh, rho)?,
        stress: render_stress_png(&spec.mesh, &stress.von_mises, rho)?,
    };
    Ok(Solved { result, stress, images })
}

/// First candidate that is in the vocabulary and passes validation.
fn first_admissible(
    candidates: &[Action],
    offset: usize,
    spec: &ProblemSpec,
    history: &[Action],
    allowed: &[ActionKind],
    rejections: &mut Vec<RejectedCandidate>,
) -> Option<usize> {
    for (i, a) in candidates.iter().enumerate().skip(offset) {
        let verdict = if allowed.contains(&a.kind()) {
            validate_action(a, spec, history)
        } else {
            Err(Rejection::NotAllowed(a.kind()))
        };
        match verdict {
            Ok(()) => return Some(i),
            Err(reason) => rejections.push(RejectedCandidate { index: i, reason }),
        }
    }
    None
}

struct Retained {
    step: usize,
    compliance: f64,
}

/// Runs solve → stress → render → evaluate → propose → modify until the
/// design converges, no candidate is admissible, or `t_max` steps ran.
pub fn run_outer_loop(
    spec: &ProblemSpec,
    interpreter: &mut dyn Interpreter,
    config: &LoopConfig,
    run_id: &str,
) -> Result<RunOutput, ControlError> {
    spec.validate()?;
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut images = Vec::new();
    let mut current = spec.clone();
    let mut history: Vec<Action> = Vec::new();
    let mut retained: Option<Retained> = None;
    // spec and ranked candidates of the last successful step, for retries
    let mut fallback: Option<(ProblemSpec, Vec<Action>, usize)> = None;
    let mut stop = StopReason::BudgetExhausted;

    for t in 0..config.t_max {
        let last = t + 1 == config.t_max;
        let solved = match solve_state(&current) {
            Ok(s) => s,
            Err(e) => {
                let mut record = StepRecord {
                    step: t,
                    spec: current.clone(),
                    failure: Some(e.to_string()),
                    compliance: None,
                    solver_iterations: 0,
                    retained_eligible: false,
                    c_rep: retained.as_ref().map(|r| r.compliance),
                    retained_step: retained.as_ref().map(|r| r.step),
                    evaluation: None,
                    max_stress_element: None,
                    density: Vec::new(),
                    von_mises: Vec::new(),
                    images: None,
                    proposal: Proposal::default(),
                    rejections: Vec::new(),
                    applied: None,
                };
                images.push(None);
                let retry = match (&mut fallback, last) {
                    (Some((base, candidates, next)), false) => {
                        let pick = first_admissible(
                            candidates,
                            *next,
                            base,
                            &history,
                            &config.allowed,
                            &mut record.rejections,
                        );
                        pick.map(|i| {
                            *next = i + 1;
                            let resolved = candidates[i].resolved(base);
                            (apply_action(base, &candidates[i], config.seed_mode), resolved)
                        })
                    }
                    _ => None,
                };
                match retry {
                    Some((next_spec, resolved)) => {
                        history.push(resolved.clone());
                        record.applied = Some(resolved);
                        steps.push(record);
                        current = next_spec;
                        continue;
                    }
                    None => {
                        steps.push(record);
                        stop = StopReason::SolverFailure;
                        break;
                    }
                }
            }
        };

        let rho = &solved.result.density.values;
        let compliance = solved.result.compliance;
        let eligible = retained_eligible(rho, compliance);
        if eligible && retained.as_ref().is_none_or(|r| compliance < r.compliance) {
            retained = Some(Retained { step: t, compliance });
        }
        let c_rep = retained.as_ref().map(|r| r.compliance);
        let stats = SolverStats {
            c_final: compliance,
            c_rep: c_rep.unwrap_or(f64::NAN),
            total_iterations: solved.result.iterations,
            n_max: solved.result.max_iter,
        };
        let evaluation = evaluate(rho, &solved.stress.von_mises, &current, config.sigma_yield, &stats)?;
        let mut record = StepRecord {
            step: t,
            spec: current.clone(),
            failure: None,
            compliance: Some(compliance),
            solver_iterations: solved.result.iterations,
            retained_eligible: eligible,
            c_rep,
            retained_step: retained.as_ref().map(|r| r.step),
            evaluation: Some(evaluation),
            max_stress_element: max_stress_element(&solved.stress.von_mises, rho),
            density: rho.clone(),
            von_mises: solved.stress.von_mises.clone(),
            images: Some(ImagePaths::new(run_id, t)),
            proposal: Proposal::default(),
            rejections: Vec::new(),
            applied: None,
        };

        let converged = evaluation.all_gates_pass
            && c_rep.is_some_and(|c| compliance / c < config.converge_ratio)
            && evaluation.diagnostics.load_path_efficiency >= config.converge_load_path;
        if converged || last {
            stop = if converged { StopReason::Converged } else { StopReason::BudgetExhausted };
            steps.push(record);
            images.push(Some(solved.images));
            break;
        }

        let ctx = InterpreterContext {
            spec: &current,
            densities: rho,
            stress: &solved.stress,
            density_png: &solved.images.density,
            stress_png: &solved.images.stress,
            evaluation: &evaluation,
            c_current: compliance,
            c_retained: c_rep,
            history: &history,
            step: t,
            budget: config.t_max,
            allowed: &config.allowed,
        };
        let mut proposal = interpreter.propose(&ctx);
        crate::action::rank(&mut proposal.actions);
        let pick = first_admissible(&proposal.actions, 0, &current, &history, &config.allowed, &mut record.rejections);
        images.push(Some(solved.images));
        match pick {
            Some(i) => {
                let chosen = &proposal.actions[i];
                let resolved = chosen.resolved(&current);
                let next_spec = apply_action(&current, chosen, config.seed_mode);
                history.push(resolved.clone());
                record.applied = Some(resolved);
                fallback = Some((current.clone(), proposal.actions.clone(), i + 1));
                record.proposal = proposal;
                steps.push(record);
                current = next_spec;
            }
            None => {
                record.proposal = proposal;
                steps.push(record);
                stop = StopReason::NoAdmissibleAction;
                break;
            }
        }
    }

    let trace = RunTrace {
        schema_version: TRACE_SCHEMA_VERSION,
        run_id: run_id.to_string(),
        problem_id: spec.id,
        problem_name: spec.name.clone(),
        condition: config.condition.clone(),
        seed: config.seed,
        sigma_yield: config.sigma_yield,
        fixed_volume: config.fixed_volume,
        t_max: config.t_max,
        initial_vf: spec.vf,
        steps,
        stop_reason: stop,
    };
    Ok(RunOutput { trace, images })
}

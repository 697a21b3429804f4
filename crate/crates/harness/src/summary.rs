//! Per-run scalar summaries, one CSV row each.

use serde::{Deserialize, Serialize};
use stressgate_control::{RunTrace, StopReason};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completion {
    Completed,
    MissingExecution,
}

/// Scalar outcome of one (condition, problem, seed) slot. Field order is
/// the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_id: String,
    pub problem_id: u32,
    pub condition: String,
    pub seed: u64,
    pub fixed_volume: bool,
    pub status: Completion,
    pub stop_reason: Option<StopReason>,
    pub steps: usize,
    /// Retained-best compliance at the end of the run.
    pub c_rep: Option<f64>,
    /// Compliance of the last successfully solved state.
    pub c_final: Option<f64>,
    /// Lowest eligible compliance among steps that passed every gate.
    pub c_feas: Option<f64>,
    /// `c_final` when the final state passes every gate.
    pub c_final_feas: Option<f64>,
    /// Absent when the problem id is unknown.
    pub initial_vf: Option<f64>,
    pub final_vf: Option<f64>,
    pub gate_load_outside_void: bool,
    pub gate_connectivity: bool,
    pub gate_compliance_ratio: bool,
    pub gate_grayness: bool,
    pub gate_volume_fraction: bool,
    pub gate_convergence: bool,
    pub gate_max_stress: bool,
    pub all_gates_pass: bool,
    pub error: Option<String>,
}

impl RunSummary {
    pub fn from_trace(trace: &RunTrace) -> Self {
        let last = trace.final_step();
        let gates = last.and_then(|s| s.evaluation.as_ref()).map(|e| e.gates);
        let flag = |name: &str| gates.is_some_and(|g| g.iter().any(|(n, r)| n == name && r.passed));
        let all = gates.is_some_and(|g| g.all_pass());
        let c_final = last.and_then(|s| s.compliance);
        let c_feas = trace
            .steps
            .iter()
            .filter(|s| s.retained_eligible && s.evaluation.is_some_and(|e| e.all_gates_pass))
            .filter_map(|s| s.compliance)
            .min_by(f64::total_cmp);
        Self {
            run_id: trace.run_id.clone(),
            problem_id: trace.problem_id.unwrap_or(0),
            condition: trace.condition.clone(),
            seed: trace.seed,
            fixed_volume: trace.fixed_volume,
            status: Completion::Completed,
            stop_reason: Some(trace.stop_reason),
            steps: trace.steps.len(),
            c_rep: trace.steps.last().and_then(|s| s.c_rep),
            c_final,
            c_feas,
            c_final_feas: if all { c_final } else { None },
            initial_vf: Some(trace.initial_vf),
            final_vf: last.map(|s| s.spec.vf),
            gate_load_outside_void: flag("load_outside_void"),
            gate_connectivity: flag("connectivity"),
            gate_compliance_ratio: flag("compliance_ratio"),
            gate_grayness: flag("grayness"),
            gate_volume_fraction: flag("volume_fraction"),
            gate_convergence: flag("convergence"),
            gate_max_stress: flag("max_stress"),
            all_gates_pass: all,
            error: None,
        }
    }

    /// Record for a slot that produced no trace.
    pub fn missing(slot: &crate::Slot, initial_vf: Option<f64>, error: String) -> Self {
        Self {
            run_id: slot.run_id(),
            problem_id: slot.problem_id,
            condition: slot.condition.name().to_string(),
            seed: slot.seed,
            fixed_volume: slot.fixed_volume,
            status: Completion::MissingExecution,
            stop_reason: None,
            steps: 0,
            c_rep: None,
            c_final: None,
            c_feas: None,
            c_final_feas: None,
            initial_vf,
            final_vf: None,
            gate_load_outside_void: false,
            gate_connectivity: false,
            gate_compliance_ratio: false,
            gate_grayness: false,
            gate_volume_fraction: false,
            gate_convergence: false,
            gate_max_stress: false,
            all_gates_pass: false,
            error: Some(error),
        }
    }

    pub fn completed(&self) -> bool {
        self.status == Completion::Completed
    }
}

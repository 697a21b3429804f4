//! Condition × problem × seed run matrix.

use std::sync::Arc;

use rayon::prelude::*;
use stressgate_control::interpret::LlmClient;
use stressgate_control::run::DEFAULT_T_MAX;
use stressgate_control::{run_outer_loop, Condition, ControlError, LoopConfig, RunOutput};
use stressgate_core::benchmarks::{builtin_problem, REFERENCE_SIGMA_YIELD};

use crate::summary::RunSummary;

/// One cell of the matrix. Ordering is the aggregation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub condition: Condition,
    pub problem_id: u32,
    pub seed: u64,
    pub fixed_volume: bool,
}

impl Slot {
    pub fn run_id(&self) -> String {
        let suffix = if self.fixed_volume { "_fv" } else { "" };
        format!("{}_p{:02}_s{}{suffix}", self.condition, self.problem_id, self.seed)
    }
}

#[derive(Clone)]
pub struct MatrixConfig {
    pub conditions: Vec<Condition>,
    pub problems: Vec<u32>,
    pub seeds: Vec<u64>,
    pub fixed_volume: bool,
    pub sigma_yield: f64,
    pub t_max: usize,
    /// Required by the language-model conditions; their slots are
    /// recorded as missing without it.
    pub client: Option<Arc<dyn LlmClient>>,
}

impl MatrixConfig {
    pub fn new(conditions: Vec<Condition>, problems: Vec<u32>, seeds: Vec<u64>) -> Self {
        Self {
            conditions,
            problems,
            seeds,
            fixed_volume: false,
            sigma_yield: REFERENCE_SIGMA_YIELD,
            t_max: DEFAULT_T_MAX,
            client: None,
        }
    }

    pub fn slots(&self) -> Vec<Slot> {
        let mut slots = Vec::new();
        for &condition in &self.conditions {
            for &problem_id in &self.problems {
                for &seed in &self.seeds {
                    slots.push(Slot { condition, problem_id, seed, fixed_volume: self.fixed_volume });
                }
            }
        }
        slots.sort();
        slots.dedup();
        slots
    }
}

pub struct SlotResult {
    pub slot: Slot,
    pub summary: RunSummary,
    /// `None` for missing executions.
    pub output: Option<RunOutput>,
}

#[derive(Debug, thiserror::Error)]
pub enum SlotError {
    #[error(transparent)]
    Benchmark(#[from] stressgate_core::BenchmarkError),
    #[error(transparent)]
    Control(#[from] ControlError),
}

/// Runs a single slot.
pub fn run_slot(slot: &Slot, config: &MatrixConfig) -> Result<RunOutput, SlotError> {
    let spec = builtin_problem(slot.problem_id)?;
    let mut interpreter = slot.condition.interpreter(slot.seed, config.client.clone())?;
    let loop_config = LoopConfig {
        t_max: config.t_max,
        ..LoopConfig::for_condition(slot.condition, config.sigma_yield, slot.seed, slot.fixed_volume)
    };
    Ok(run_outer_loop(&spec, interpreter.as_mut(), &loop_config, &slot.run_id())?)
}

/// Runs every slot on the rayon pool. A failing slot becomes a
/// missing-execution summary; results come back in slot order.
pub fn run_matrix(config: &MatrixConfig) -> Vec<SlotResult> {
    let mut results: Vec<SlotResult> = config
        .slots()
        .into_par_iter()
        .map(|slot| match run_slot(&slot, config) {
            Ok(output) => SlotResult { slot, summary: RunSummary::from_trace(&output.trace), output: Some(output) },
            Err(e) => {
                let vf = builtin_problem(slot.problem_id).ok().map(|s| s.vf);
                SlotResult { slot, summary: RunSummary::missing(&slot, vf, e.to_string()), output: None }
            }
        })
        .collect();
    results.sort_by_key(|r| r.slot);
    results
}

/// Completed and missing counts for one condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SlotCounts {
    pub attempted: usize,
    pub completed: usize,
    pub missing: usize,
    /// Completed runs whose final state passes every gate.
    pub feasible: usize,
}

pub fn slot_counts(summaries: &[RunSummary], condition: &str) -> SlotCounts {
    let mut c = SlotCounts::default();
    for s in summaries.iter().filter(|s| s.condition == condition) {
        c.attempted += 1;
        if s.completed() {
            c.completed += 1;
            c.feasible += usize::from(s.all_gates_pass);
        } else {
            c.missing += 1;
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad problem list {0:?}")]
pub struct BadIdList(pub String);

/// Parses `1..22`, `1..=22`, `14` or comma lists of those. Ranges are
/// inclusive; the result is sorted and deduplicated.
pub fn parse_ids(text: &str) -> Result<Vec<u32>, BadIdList> {
    let mut ids = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || BadIdList(part.to_string());
        match part.split_once("..") {
            Some((a, b)) => {
                let a: u32 = a.parse().map_err(|_| bad())?;
                let b: u32 = b.trim_start_matches('=').parse().map_err(|_| bad())?;
                if b < a {
                    return Err(bad());
                }
                ids.extend(a..=b);
            }
            None => ids.push(part.parse().map_err(|_| bad())?),
        }
    }
    if ids.is_empty() {
        return Err(BadIdList(text.to_string()));
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

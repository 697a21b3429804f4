//! Interpreters turn the evaluated state of one step into ranked actions.

mod hotspot;
mod llm;
mod rule;

pub use hotspot::{hotspot_candidates, max_stress_element, ExactHotspot, RandomRegion};
pub use llm::{
    parse_candidates, HttpLlmClient, InputMode, LlmClient, LlmError, LlmImage, LlmInterpreter, LlmRequest,
    LlmStepContext, ENV_API_KEY, ENV_TIMEOUT_SECS, ENV_URL, PROMPT_TEMPLATE, PROMPT_VERSION,
};
pub use rule::{RuleBased, RulePolicy};

use serde::{Deserialize, Serialize};
use stressgate_core::evaluator::EvaluationResult;
use stressgate_core::problem::ProblemSpec;
use stressgate_core::StressField;

use crate::action::{Action, ActionKind};

/// Everything an interpreter may look at for one step.
#[derive(Debug, Clone, Copy)]
pub struct InterpreterContext<'a> {
    pub spec: &'a ProblemSpec,
    pub densities: &'a [f64],
    pub stress: &'a StressField,
    pub density_png: &'a [u8],
    pub stress_png: &'a [u8],
    pub evaluation: &'a EvaluationResult,
    pub c_current: f64,
    pub c_retained: Option<f64>,
    /// Actions applied at earlier steps, in resolved form.
    pub history: &'a [Action],
    pub step: usize,
    pub budget: usize,
    pub allowed: &'a [ActionKind],
}

/// A candidate the interpreter discarded before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedCandidate {
    pub candidate: serde_json::Value,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Proposal {
    /// Ranked, highest priority first.
    pub actions: Vec<Action>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dropped: Vec<DroppedCandidate>,
    /// Set when the interpreter fell back to deterministic proposals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
}

impl Proposal {
    pub fn ranked(mut actions: Vec<Action>) -> Self {
        crate::action::rank(&mut actions);
        Self { actions, ..Self::default() }
    }
}

pub trait Interpreter: Send {
    fn propose(&mut self, ctx: &InterpreterContext<'_>) -> Proposal;
}

impl<F> Interpreter for F
where
    F: FnMut(&InterpreterContext<'_>) -> Proposal + Send,
{
    fn propose(&mut self, ctx: &InterpreterContext<'_>) -> Proposal {
        self(ctx)
    }
}

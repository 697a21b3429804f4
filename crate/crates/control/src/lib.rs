//! Outer design loop around the compliance solver: interpreters propose
//! ranked actions from the evaluated state, the validator filters them, the
//! modifier edits the spec, and every step is recorded in a [`RunTrace`].

pub mod action;
pub mod condition;
pub mod interpret;
pub mod modify;
pub mod run;
pub mod validate;

pub use action::{Action, ActionKind, ActionParams, Circle, ScalarChange};
pub use condition::Condition;
pub use interpret::{Interpreter, InterpreterContext, Proposal};
pub use modify::{apply_action, SeedMode};
pub use run::{retained_eligible, run_outer_loop, LoopConfig, RunOutput, RunTrace, StepRecord, StopReason};
pub use validate::{validate_action, Rejection};

use stressgate_core::{FeaError, RenderError, SimpError, SpecError};

#[derive(Debug, thiserror::Error)]
pub enum ControlError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Simp(#[from] SimpError),
    #[error(transparent)]
    Fea(#[from] FeaError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("condition {0} needs a language-model client")]
    MissingClient(Condition),
}

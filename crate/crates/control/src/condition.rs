//! Named experimental conditions and the interpreter each one uses.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::action::ActionKind;
use crate::interpret::{ExactHotspot, InputMode, Interpreter, LlmClient, LlmInterpreter, RandomRegion, RuleBased};
use crate::modify::SeedMode;
use crate::ControlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    SoftLlm,
    PassiveLlm,
    Rule,
    ExactHotspot,
    Random,
    DensityOnly,
    StressOnly,
    NumericOnly,
    GlobalOnly,
}

impl Condition {
    pub const ALL: [Condition; 9] = [
        Condition::SoftLlm,
        Condition::PassiveLlm,
        Condition::Rule,
        Condition::ExactHotspot,
        Condition::Random,
        Condition::DensityOnly,
        Condition::StressOnly,
        Condition::NumericOnly,
        Condition::GlobalOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::SoftLlm => "soft_llm",
            Condition::PassiveLlm => "passive_llm",
            Condition::Rule => "rule",
            Condition::ExactHotspot => "exact_hotspot",
            Condition::Random => "random",
            Condition::DensityOnly => "density_only",
            Condition::StressOnly => "stress_only",
            Condition::NumericOnly => "numeric_only",
            Condition::GlobalOnly => "global_only",
        }
    }

    pub fn input_mode(self) -> Option<InputMode> {
        match self {
            Condition::SoftLlm | Condition::PassiveLlm => Some(InputMode::Both),
            Condition::DensityOnly => Some(InputMode::DensityOnly),
            Condition::StressOnly => Some(InputMode::StressOnly),
            Condition::NumericOnly => Some(InputMode::NumericOnly),
            Condition::GlobalOnly => Some(InputMode::GlobalOnly),
            Condition::Rule | Condition::ExactHotspot | Condition::Random => None,
        }
    }

    pub fn uses_llm(self) -> bool {
        self.input_mode().is_some()
    }

    pub fn seed_mode(self) -> SeedMode {
        if self == Condition::PassiveLlm {
            SeedMode::Passive
        } else {
            SeedMode::Soft
        }
    }

    /// Action kinds the loop accepts; `fixed_volume` removes volume edits.
    pub fn vocabulary(self, fixed_volume: bool) -> Vec<ActionKind> {
        let base: &[ActionKind] = match self {
            Condition::Rule | Condition::GlobalOnly => &ActionKind::GLOBAL,
            Condition::ExactHotspot | Condition::Random => &[ActionKind::ReinforceHotspot],
            _ => &ActionKind::ALL,
        };
        base.iter().copied().filter(|&k| !(fixed_volume && k == ActionKind::ChangeVolumeFraction)).collect()
    }

    /// Builds the interpreter. LLM conditions need a client.
    pub fn interpreter(
        self,
        seed: u64,
        client: Option<Arc<dyn LlmClient>>,
    ) -> Result<Box<dyn Interpreter>, ControlError> {
        Ok(match self {
            Condition::Rule => Box::new(RuleBased::default()),
            Condition::ExactHotspot => Box::new(ExactHotspot),
            Condition::Random => Box::new(RandomRegion::new(seed)),
            other => {
                let client = client.ok_or(ControlError::MissingClient(other))?;
                Box::new(LlmInterpreter::new(client, other.input_mode().unwrap_or_default()))
            }
        })
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown condition {0:?}")]
pub struct UnknownCondition(pub String);

impl FromStr for Condition {
    type Err = UnknownCondition;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Condition::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| UnknownCondition(s.to_string()))
    }
}

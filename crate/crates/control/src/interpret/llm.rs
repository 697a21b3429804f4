//! Language-model interpreter: wire request, HTTP client and response parsing.

use std::sync::Arc;
use std::time::Duration;

use base64::Engine;
use serde::{Deserialize, Serialize};
use stressgate_core::evaluator::EvaluationResult;

use super::{DroppedCandidate, Interpreter, InterpreterContext, Proposal, RuleBased};
use crate::action::{rank, Action, ActionKind};

pub const PROMPT_TEMPLATE: &str = include_str!("../../assets/interpreter_prompt_v1.txt");
pub const PROMPT_VERSION: &str = "interpreter_prompt_v1";

pub const ENV_URL: &str = "STRESSGATE_LLM_URL";
pub const ENV_API_KEY: &str = "STRESSGATE_LLM_API_KEY";
pub const ENV_TIMEOUT_SECS: &str = "STRESSGATE_LLM_TIMEOUT_SECS";
const DEFAULT_TIMEOUT_SECS: u64 = 120;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LlmError {
    #[error("{ENV_URL} is not set")]
    MissingEndpoint,
    #[error("invalid {name}: {value}")]
    InvalidSetting { name: &'static str, value: String },
    #[error("transport: {0}")]
    Transport(String),
    #[error("unparseable response: {0}")]
    Parse(String),
}

/// Which parts of the step context reach the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    #[default]
    Both,
    DensityOnly,
    StressOnly,
    NumericOnly,
    /// Everything is sent, but only global actions are allowed.
    GlobalOnly,
}

impl InputMode {
    fn density_image(self) -> bool {
        matches!(self, InputMode::Both | InputMode::DensityOnly | InputMode::GlobalOnly)
    }

    fn stress_image(self) -> bool {
        matches!(self, InputMode::Both | InputMode::StressOnly | InputMode::GlobalOnly)
    }

    fn evaluation(self) -> bool {
        matches!(self, InputMode::Both | InputMode::NumericOnly | InputMode::GlobalOnly)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmImage {
    pub name: String,
    pub media_type: String,
    /// Standard base64 of the PNG bytes.
    pub data: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmStepContext {
    pub step: usize,
    pub budget: usize,
    pub c_current: f64,
    pub c_retained: Option<f64>,
    pub volume_fraction: f64,
    /// Domain size in element units.
    pub domain: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmRequest {
    pub prompt_version: String,
    pub prompt: String,
    pub temperature: f64,
    pub images: Vec<LlmImage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<EvaluationResult>,
    pub context: LlmStepContext,
    pub history: Vec<Action>,
    pub allowed_actions: Vec<ActionKind>,
}

impl LlmRequest {
    pub fn build(ctx: &InterpreterContext<'_>, mode: InputMode, allowed: Vec<ActionKind>) -> Self {
        let b64 = base64::engine::general_purpose::STANDARD;
        let image = |name: &str, bytes: &[u8]| LlmImage {
            name: name.to_string(),
            media_type: "image/png".to_string(),
            data: b64.encode(bytes),
        };
        let mut images = Vec::new();
        if mode.density_image() {
            images.push(image("density", ctx.density_png));
        }
        if mode.stress_image() {
            images.push(image("stress", ctx.stress_png));
        }
        let extent = ctx.spec.mesh.extent();
        let domain = extent[..ctx.spec.mesh.dims().len()].to_vec();
        Self {
            prompt_version: PROMPT_VERSION.to_string(),
            prompt: PROMPT_TEMPLATE.to_string(),
            temperature: 0.0,
            images,
            evaluation: mode.evaluation().then_some(*ctx.evaluation),
            context: LlmStepContext {
                step: ctx.step,
                budget: ctx.budget,
                c_current: ctx.c_current,
                c_retained: ctx.c_retained,
                volume_fraction: ctx.spec.vf,
                domain,
            },
            history: ctx.history.to_vec(),
            allowed_actions: allowed,
        }
    }
}

/// Sends one request and returns the raw response text.
pub trait LlmClient: Send + Sync {
    fn complete(&self, request: &LlmRequest) -> Result<String, LlmError>;
}

/// POSTs the request as JSON; the response body is the model's text, or a
/// JSON object carrying it under `content` or `text`.
#[derive(Debug, Clone)]
pub struct HttpLlmClient {
    url: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpLlmClient {
    pub fn new(url: impl Into<String>, api_key: Option<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        Self { url: url.into(), api_key, agent }
    }

    pub fn from_env() -> Result<Self, LlmError> {
        let url = std::env::var(ENV_URL).map_err(|_| LlmError::MissingEndpoint)?;
        let api_key = std::env::var(ENV_API_KEY).ok().filter(|k| !k.is_empty());
        let timeout = match std::env::var(ENV_TIMEOUT_SECS) {
            Ok(v) => {
                v.parse::<u64>().map_err(|_| LlmError::InvalidSetting { name: ENV_TIMEOUT_SECS, value: v.clone() })?
            }
            Err(_) => DEFAULT_TIMEOUT_SECS,
        };
        Ok(Self::new(url, api_key, Duration::from_secs(timeout)))
    }
}

impl LlmClient for HttpLlmClient {
    fn complete(&self, request: &LlmRequest) -> Result<String, LlmError> {
        let mut req = self.agent.post(&self.url);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut response = req.send_json(request).map_err(|e| LlmError::Transport(e.to_string()))?;
        let body = response.body_mut().read_to_string().map_err(|e| LlmError::Transport(e.to_string()))?;
        if let Ok(serde_json::Value::Object(map)) = serde_json::from_str::<serde_json::Value>(&body) {
            for key in ["content", "text"] {
                if let Some(serde_json::Value::String(s)) = map.get(key) {
                    return Ok(s.clone());
                }
            }
        }
        Ok(body)
    }
}

fn strip_fences(text: &str) -> &str {
    let t = text.trim();
    let Some(rest) = t.strip_prefix("```") else {
        return t;
    };
    let rest = rest.split_once('\n').map_or("", |(_, body)| body);
    rest.trim_end().strip_suffix("```").unwrap_or(rest).trim()
}

/// Parses a model response into actions. The response must be a JSON array
/// (optionally in a code fence, or under an `actions` key); entries that do
/// not decode or use a kind outside `allowed` are dropped with a reason.
pub fn parse_candidates(text: &str, allowed: &[ActionKind]) -> Result<(Vec<Action>, Vec<DroppedCandidate>), LlmError> {
    let value: serde_json::Value =
        serde_json::from_str(strip_fences(text)).map_err(|e| LlmError::Parse(e.to_string()))?;
    let items = match value {
        serde_json::Value::Array(items) => items,
        serde_json::Value::Object(mut map) => match map.remove("actions") {
            Some(serde_json::Value::Array(items)) => items,
            _ => return Err(LlmError::Parse("expected a JSON array of actions".into())),
        },
        _ => return Err(LlmError::Parse("expected a JSON array of actions".into())),
    };
    let mut actions = Vec::new();
    let mut dropped = Vec::new();
    for item in items {
        match serde_json::from_value::<Action>(item.clone()) {
            Ok(a) if a.priority == 0 => {
                dropped.push(DroppedCandidate { candidate: item, reason: "priority must be positive".into() })
            }
            Ok(a) if !allowed.contains(&a.kind()) => dropped.push(DroppedCandidate {
                candidate: item,
                reason: format!("action {} not in the allowed vocabulary", a.kind()),
            }),
            Ok(a) => actions.push(a),
            Err(e) => dropped.push(DroppedCandidate { candidate: item, reason: e.to_string() }),
        }
    }
    rank(&mut actions);
    Ok((actions, dropped))
}

/// Queries the model once per step. Rule-based proposals are appended after
/// the model's candidates (skipping exact duplicates) and stand in alone
/// when the call or parse fails.
pub struct LlmInterpreter {
    client: Arc<dyn LlmClient>,
    mode: InputMode,
    safeguard: RuleBased,
}

impl LlmInterpreter {
    pub fn new(client: Arc<dyn LlmClient>, mode: InputMode) -> Self {
        Self { client, mode, safeguard: RuleBased::default() }
    }

    pub fn mode(&self) -> InputMode {
        self.mode
    }
}

impl Interpreter for LlmInterpreter {
    fn propose(&mut self, ctx: &InterpreterContext<'_>) -> Proposal {
        let allowed: Vec<ActionKind> =
            ctx.allowed.iter().copied().filter(|k| self.mode != InputMode::GlobalOnly || k.is_global()).collect();
        let request = LlmRequest::build(ctx, self.mode, allowed.clone());
        let (mut actions, dropped, fallback) =
            match self.client.complete(&request).and_then(|text| parse_candidates(&text, &allowed)) {
                Ok((actions, dropped)) => (actions, dropped, None),
                Err(e) => (Vec::new(), Vec::new(), Some(e.to_string())),
            };
        let mut next = actions.iter().map(|a| a.priority).max().unwrap_or(0);
        for mut a in self.safeguard.actions(ctx) {
            if allowed.contains(&a.kind()) && !actions.iter().any(|m| m.params == a.params) {
                next += 1;
                a.priority = next;
                actions.push(a);
            }
        }
        Proposal { actions, dropped, fallback }
    }
}

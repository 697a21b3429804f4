use serde::{Deserialize, Serialize};

use super::{Interpreter, InterpreterContext, Proposal};
use crate::action::{Action, ActionParams, ScalarChange};
use crate::validate::{FILTER_RADIUS_BOUNDS, PENALTY_BOUNDS};

/// Scalar adjustments of the rule-based interpreter. The defaults are
/// plumbing values, not tuned constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RulePolicy {
    pub vf_step: f64,
    /// Volume-fraction raises stop at this target.
    pub vf_cap: f64,
    pub penalty_step: f64,
    pub filter_step: f64,
    pub checkerboard_trigger: f64,
}

impl Default for RulePolicy {
    fn default() -> Self {
        Self { vf_step: 0.04, vf_cap: 0.9, penalty_step: 0.5, filter_step: 0.3, checkerboard_trigger: 0.02 }
    }
}

/// Deterministic global-only policy:
///
/// | trigger                    | action                       |
/// |----------------------------|------------------------------|
/// | stress gate fails          | volume fraction `+vf_step`   |
/// | grayness gate fails        | penalization `+penalty_step` |
/// | checkerboard > trigger     | filter radius `+filter_step` |
/// | compliance ratio fails     | penalization `−penalty_step` |
///
/// All gates passing yields an empty proposal.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleBased {
    pub policy: RulePolicy,
}

impl RuleBased {
    pub fn new(policy: RulePolicy) -> Self {
        Self { policy }
    }

    pub fn actions(&self, ctx: &InterpreterContext<'_>) -> Vec<Action> {
        let p = &self.policy;
        let ev = ctx.evaluation;
        let spec = ctx.spec;
        if ev.all_gates_pass {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut push = |params| out.push(Action::new(out.len() as u32 + 1, params));
        if !ev.gates.max_stress.passed && spec.vf < p.vf_cap {
            let change = if spec.vf + p.vf_step > p.vf_cap {
                ScalarChange::value(p.vf_cap)
            } else {
                ScalarChange::delta(p.vf_step)
            };
            push(ActionParams::ChangeVolumeFraction(change));
        }
        let penalty = spec.solver.penalty_start;
        if !ev.gates.grayness.passed && penalty < PENALTY_BOUNDS.1 {
            push(ActionParams::ChangePenalization(clamped(penalty, p.penalty_step, PENALTY_BOUNDS)));
        }
        let radius = spec.solver.filter_radius;
        if ev.diagnostics.checkerboard > p.checkerboard_trigger && radius < FILTER_RADIUS_BOUNDS.1 {
            push(ActionParams::ChangeFilterRadius(clamped(radius, p.filter_step, FILTER_RADIUS_BOUNDS)));
        }
        if !ev.gates.compliance_ratio.passed && penalty > PENALTY_BOUNDS.0 {
            push(ActionParams::ChangePenalization(clamped(penalty, -p.penalty_step, PENALTY_BOUNDS)));
        }
        out
    }
}

/// A delta, or the bound itself when the delta would overshoot it.
fn clamped(current: f64, delta: f64, (lo, hi): (f64, f64)) -> ScalarChange {
    let target = current + delta;
    if target > hi {
        ScalarChange::value(hi)
    } else if target < lo {
        ScalarChange::value(lo)
    } else {
        ScalarChange::delta(delta)
    }
}

impl Interpreter for RuleBased {
    fn propose(&mut self, ctx: &InterpreterContext<'_>) -> Proposal {
        Proposal::ranked(self.actions(ctx))
    }
}

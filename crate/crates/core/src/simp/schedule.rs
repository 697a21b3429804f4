use serde::{Deserialize, Serialize};

use crate::problem::ProblemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Main,
    Tail,
}

/// Parameters in force at one optimizer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationParams {
    pub phase: Phase,
    pub penalty: f64,
    pub beta: f64,
    pub r_min: f64,
    pub move_limit: f64,
}

/// Fixed-length tail run after the main loop with frozen parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSettings {
    pub iterations: usize,
    pub penalty: f64,
    pub r_min: f64,
    pub move_limit: f64,
    pub beta: f64,
}

impl Default for TailSettings {
    fn default() -> Self {
        Self { iterations: 40, penalty: 4.5, r_min: 1.2, move_limit: 0.05, beta: 32.0 }
    }
}

/// Continuation of penalty, projection sharpness and filter radius.
///
/// Penalty rises linearly from `p_start` to `p_end` over the first half of
/// the main loop. `beta` stays at `beta_start` during that ramp and then
/// doubles every `beta_period` iterations up to `beta_max`. The filter radius
/// shrinks linearly from `r_min_start` to `r_min_end` over the final third.
/// The main-loop move limit is divided by `sqrt(beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationSchedule {
    pub max_iter: usize,
    pub p_start: f64,
    pub p_end: f64,
    pub beta_start: f64,
    pub beta_max: f64,
    pub beta_period: usize,
    pub r_min_start: f64,
    pub r_min_end: f64,
    pub move_limit: f64,
    pub tail: TailSettings,
}

impl ContinuationSchedule {
    pub fn for_spec(spec: &ProblemSpec) -> Self {
        let tail = TailSettings::default();
        Self {
            max_iter: spec.max_iter(),
            p_start: spec.solver.penalty_start.min(tail.penalty),
            p_end: tail.penalty,
            beta_start: 1.0,
            beta_max: tail.beta,
            beta_period: 10,
            r_min_start: spec.solver.filter_radius.max(tail.r_min),
            r_min_end: tail.r_min,
            move_limit: spec.solver.move_limit,
            tail,
        }
    }

    pub fn total_iterations(&self) -> usize {
        self.max_iter + self.tail.iterations
    }

    fn ramp_len(&self) -> usize {
        (self.max_iter / 2).max(1)
    }

    pub fn params(&self, k: usize) -> IterationParams {
        if k >= self.max_iter {
            let t = self.tail;
            return IterationParams {
                phase: Phase::Tail,
                penalty: t.penalty,
                beta: t.beta,
                r_min: t.r_min,
                move_limit: t.move_limit,
            };
        }
        let ramp = self.ramp_len();
        let s = (k as f64 / ramp as f64).min(1.0);
        let penalty = self.p_start + (self.p_end - self.p_start) * s;
        let beta = if k < ramp {
            self.beta_start
        } else {
            let doublings = 1 + (k - ramp) / self.beta_period.max(1);
            (self.beta_start * 2f64.powi(doublings as i32)).min(self.beta_max)
        };
        let shrink_from = (2 * self.max_iter).div_ceil(3);
        let r_min = if k < shrink_from || self.max_iter <= shrink_from + 1 {
            self.r_min_start
        } else {
            let span = (self.max_iter - 1 - shrink_from) as f64;
            let s = (k - shrink_from) as f64 / span;
            self.r_min_start + (self.r_min_end - self.r_min_start) * s
        };
        // Sharper projection amplifies each design step, so shrink the step.
        let move_limit = self.move_limit / beta.sqrt();
        IterationParams { phase: Phase::Main, penalty, beta, r_min, move_limit }
    }
}

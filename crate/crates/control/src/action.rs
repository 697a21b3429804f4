//! The action vocabulary shared by every interpreter.

use std::fmt;

use serde::{Deserialize, Serialize};
use stressgate_core::problem::{ProblemSpec, DEFAULT_HOTSPOT_SEED_DENSITY, DEFAULT_WIDEN_SEED_DENSITY};

/// Default radius of a hotspot circle, in element widths.
pub const DEFAULT_HOTSPOT_RADIUS: f64 = 2.0;
/// Default radius of each circle in a widened member.
pub const DEFAULT_WIDEN_RADIUS: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    ChangeVolumeFraction,
    ChangeFilterRadius,
    ChangePenalization,
    InsertPassiveVoid,
    InsertFrozenSolid,
    ReinforceHotspot,
    WidenMember,
    RedistributeMaterial,
}

impl ActionKind {
    pub const ALL: [ActionKind; 8] = [
        ActionKind::ChangeVolumeFraction,
        ActionKind::ChangeFilterRadius,
        ActionKind::ChangePenalization,
        ActionKind::InsertPassiveVoid,
        ActionKind::InsertFrozenSolid,
        ActionKind::ReinforceHotspot,
        ActionKind::WidenMember,
        ActionKind::RedistributeMaterial,
    ];

    pub const GLOBAL: [ActionKind; 3] =
        [ActionKind::ChangeVolumeFraction, ActionKind::ChangeFilterRadius, ActionKind::ChangePenalization];

    pub fn is_global(self) -> bool {
        Self::GLOBAL.contains(&self)
    }

    pub fn name(self) -> &'static str {
        match self {
            ActionKind::ChangeVolumeFraction => "change_volume_fraction",
            ActionKind::ChangeFilterRadius => "change_filter_radius",
            ActionKind::ChangePenalization => "change_penalization",
            ActionKind::InsertPassiveVoid => "insert_passive_void",
            ActionKind::InsertFrozenSolid => "insert_frozen_solid",
            ActionKind::ReinforceHotspot => "reinforce_hotspot",
            ActionKind::WidenMember => "widen_member",
            ActionKind::RedistributeMaterial => "redistribute_material",
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A scalar edit given either as a relative `delta` or an absolute `value`.
/// When both are present `value` wins.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScalarChange {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl ScalarChange {
    pub fn delta(delta: f64) -> Self {
        Self { delta: Some(delta), value: None }
    }

    pub fn value(value: f64) -> Self {
        Self { delta: None, value: Some(value) }
    }

    /// New target given the current one; `None` when neither field is set.
    pub fn target(&self, current: f64) -> Option<f64> {
        match (self.value, self.delta) {
            (Some(v), _) => Some(v),
            (None, Some(d)) => Some(current + d),
            (None, None) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", content = "params", rename_all = "snake_case")]
pub enum ActionParams {
    ChangeVolumeFraction(ScalarChange),
    ChangeFilterRadius(ScalarChange),
    ChangePenalization(ScalarChange),
    InsertPassiveVoid(Circle),
    InsertFrozenSolid(Circle),
    ReinforceHotspot {
        center: [f64; 2],
        #[serde(default = "default_hotspot_radius")]
        radius: f64,
        #[serde(default = "default_hotspot_density")]
        seed_density: f64,
    },
    WidenMember {
        polyline: Vec<[f64; 2]>,
        #[serde(default = "default_widen_radius")]
        radius: f64,
        #[serde(default = "default_widen_density")]
        seed_density: f64,
    },
    RedistributeMaterial {
        source: Circle,
        target: Circle,
        #[serde(default = "default_hotspot_density")]
        seed_density: f64,
    },
}

fn default_hotspot_radius() -> f64 {
    DEFAULT_HOTSPOT_RADIUS
}

fn default_hotspot_density() -> f64 {
    DEFAULT_HOTSPOT_SEED_DENSITY
}

fn default_widen_radius() -> f64 {
    DEFAULT_WIDEN_RADIUS
}

fn default_widen_density() -> f64 {
    DEFAULT_WIDEN_SEED_DENSITY
}

/// One ranked candidate: `{"priority": 1, "action": "...", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Action {
    /// 1 is the highest priority.
    pub priority: u32,
    #[serde(flatten)]
    pub params: ActionParams,
}

impl Action {
    pub fn new(priority: u32, params: ActionParams) -> Self {
        Self { priority, params }
    }

    pub fn hotspot(priority: u32, center: [f64; 2]) -> Self {
        Self::new(
            priority,
            ActionParams::ReinforceHotspot {
                center,
                radius: DEFAULT_HOTSPOT_RADIUS,
                seed_density: DEFAULT_HOTSPOT_SEED_DENSITY,
            },
        )
    }

    pub fn kind(&self) -> ActionKind {
        self.params.kind()
    }

    /// Same edit with scalar changes rewritten as absolute values against
    /// `spec`, so that repeated deltas compare as different edits.
    pub fn resolved(&self, spec: &ProblemSpec) -> Action {
        let absolute = |c: &ScalarChange, current: f64| match c.target(current) {
            Some(v) => ScalarChange::value(v),
            None => *c,
        };
        let params = match &self.params {
            ActionParams::ChangeVolumeFraction(c) => ActionParams::ChangeVolumeFraction(absolute(c, spec.vf)),
            ActionParams::ChangeFilterRadius(c) => {
                ActionParams::ChangeFilterRadius(absolute(c, spec.solver.filter_radius))
            }
            ActionParams::ChangePenalization(c) => {
                ActionParams::ChangePenalization(absolute(c, spec.solver.penalty_start))
            }
            other => other.clone(),
        };
        Action { priority: self.priority, params }
    }

    /// Circle centers of the seed regions this action creates, used for
    /// localization scoring.
    pub fn seed_centers(&self) -> Vec<[f64; 2]> {
        match &self.params {
            ActionParams::ReinforceHotspot { center, .. } => vec![*center],
            ActionParams::InsertFrozenSolid(c) => vec![c.center],
            ActionParams::RedistributeMaterial { target, .. } => vec![target.center],
            ActionParams::WidenMember { polyline, radius, .. } => widen_centers(polyline, *radius),
            _ => Vec::new(),
        }
    }
}

impl ActionParams {
    pub fn kind(&self) -> ActionKind {
        match self {
            ActionParams::ChangeVolumeFraction(_) => ActionKind::ChangeVolumeFraction,
            ActionParams::ChangeFilterRadius(_) => ActionKind::ChangeFilterRadius,
            ActionParams::ChangePenalization(_) => ActionKind::ChangePenalization,
            ActionParams::InsertPassiveVoid(_) => ActionKind::InsertPassiveVoid,
            ActionParams::InsertFrozenSolid(_) => ActionKind::InsertFrozenSolid,
            ActionParams::ReinforceHotspot { .. } => ActionKind::ReinforceHotspot,
            ActionParams::WidenMember { .. } => ActionKind::WidenMember,
            ActionParams::RedistributeMaterial { .. } => ActionKind::RedistributeMaterial,
        }
    }
}

/// Circle centers along a polyline at uniform arc-length spacing of at most
/// `spacing`, both endpoints included.
pub fn widen_centers(polyline: &[[f64; 2]], spacing: f64) -> Vec<[f64; 2]> {
    match polyline {
        [] => return Vec::new(),
        [p] => return vec![*p],
        _ => {}
    }
    let seg_len: Vec<f64> =
        polyline.windows(2).map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt()).collect();
    let total: f64 = seg_len.iter().sum();
    if total <= 0.0 || spacing <= 0.0 {
        return vec![polyline[0]];
    }
    let pieces = ((total / spacing) - 1e-9).ceil().max(1.0) as usize;
    let step = total / pieces as f64;
    let mut out = Vec::with_capacity(pieces + 1);
    let mut seg = 0;
    let mut seg_start = 0.0;
    for k in 0..=pieces {
        let s = if k == pieces { total } else { k as f64 * step };
        while seg + 1 < seg_len.len() && s > seg_start + seg_len[seg] {
            seg_start += seg_len[seg];
            seg += 1;
        }
        let t = if seg_len[seg] > 0.0 { ((s - seg_start) / seg_len[seg]).clamp(0.0, 1.0) } else { 0.0 };
        let (a, b) = (polyline[seg], polyline[seg + 1]);
        out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
    }
    out
}

/// Sorts by priority, keeping the original order among equal priorities.
pub fn rank(actions: &mut [Action]) {
    actions.sort_by_key(|a| a.priority);
}

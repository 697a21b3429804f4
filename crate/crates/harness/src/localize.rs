//! How close accepted spatial seeds land to the numerical stress hotspot.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use stressgate_control::{apply_action, ActionKind, RunTrace, SeedMode};
use stressgate_core::problem::RegionKind;

/// Top-stress fractions reported per record.
pub const TOP_FRACTIONS: [f64; 3] = [0.01, 0.05, 0.10];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRecord {
    pub run_id: String,
    pub step: usize,
    pub action: ActionKind,
    /// Seed center nearest the hotspot.
    pub seed_center: [f64; 2],
    pub hotspot_element: usize,
    pub hotspot_centroid: [f64; 2],
    /// In-plane distance divided by the domain diagonal.
    pub distance: f64,
    pub seed_elements: usize,
    pub overlap_top1: f64,
    pub overlap_top5: f64,
    pub overlap_top10: f64,
    /// `100 (σ_t − σ_{t+1}) / σ_t` of the solid maximum, when step `t+1` solved.
    pub stress_change_pct: Option<f64>,
}

/// Highest-stress `fraction` of all elements (at least one), ties broken
/// by lower index.
pub fn top_stress_set(von_mises: &[f64], fraction: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..von_mises.len()).collect();
    order.sort_by(|&a, &b| von_mises[b].total_cmp(&von_mises[a]).then(a.cmp(&b)));
    let k = ((fraction * order.len() as f64).ceil() as usize).clamp(1, order.len().max(1));
    order.truncate(k);
    order
}

/// `|seed ∩ top| / |seed|`; zero for an empty seed.
pub fn overlap(seed: &[usize], top: &[usize]) -> f64 {
    if seed.is_empty() {
        return 0.0;
    }
    let top: BTreeSet<usize> = top.iter().copied().collect();
    seed.iter().filter(|e| top.contains(e)).count() as f64 / seed.len() as f64
}

fn spatial_seed(kind: ActionKind) -> bool {
    matches!(
        kind,
        ActionKind::ReinforceHotspot
            | ActionKind::InsertFrozenSolid
            | ActionKind::WidenMember
            | ActionKind::RedistributeMaterial
    )
}

/// One record per applied action that places material. Steps without a
/// solved state or without a solid element are skipped.
pub fn localization_metrics(trace: &RunTrace) -> Vec<LocalizationRecord> {
    let mut out = Vec::new();
    for (i, step) in trace.steps.iter().enumerate() {
        let (Some(action), Some(hot), Some(eval)) = (&step.applied, step.max_stress_element, &step.evaluation) else {
            continue;
        };
        if !spatial_seed(action.kind()) || step.failure.is_some() {
            continue;
        }
        let mesh = &step.spec.mesh;
        let edited = apply_action(&step.spec, action, SeedMode::Soft);
        let mut seed: Vec<usize> = edited.regions[step.spec.regions.len()..]
            .iter()
            .filter(|r| r.kind != RegionKind::Void)
            .flat_map(|r| r.elements(mesh))
            .collect();
        seed.sort_unstable();
        seed.dedup();

        let c = mesh.centroid(hot);
        let hotspot_centroid = [c[0], c[1]];
        let dist = |p: &[f64; 2]| (p[0] - c[0]).hypot(p[1] - c[1]);
        let Some(seed_center) = action.seed_centers().into_iter().min_by(|a, b| dist(a).total_cmp(&dist(b))) else {
            continue;
        };
        let [o1, o5, o10] = TOP_FRACTIONS.map(|f| overlap(&seed, &top_stress_set(&step.von_mises, f)));
        let sigma = eval.gates.max_stress.value;
        let stress_change_pct = trace
            .steps
            .get(i + 1)
            .and_then(|n| n.evaluation.as_ref())
            .filter(|_| sigma > 0.0)
            .map(|n| 100.0 * (sigma - n.gates.max_stress.value) / sigma);
        out.push(LocalizationRecord {
            run_id: trace.run_id.clone(),
            step: step.step,
            action: action.kind(),
            seed_center,
            hotspot_element: hot,
            hotspot_centroid,
            distance: dist(&seed_center) / mesh.diagonal(),
            seed_elements: seed.len(),
            overlap_top1: o1,
            overlap_top5: o5,
            overlap_top10: o10,
            stress_change_pct,
        });
    }
    out
}

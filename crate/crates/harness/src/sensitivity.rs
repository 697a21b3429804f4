//! Threshold sensitivity: calibrate σ_yield at several percentiles and
//! count how many designs pass.

use serde::{Deserialize, Serialize};
use stressgate_control::Condition;
use stressgate_core::benchmarks::{builtin_problem, percentile, stress_maxima, IDS_2D};
use stressgate_core::BenchmarkError;

use crate::matrix::{run_matrix, MatrixConfig};

/// Percentiles swept by the preset.
pub const SWEEP_QS: [f64; 6] = [40.0, 45.0, 50.0, 55.0, 60.0, 70.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityPoint {
    pub condition: String,
    pub q: f64,
    pub sigma_yield: f64,
    /// Completed runs whose final state passes every gate.
    pub passed: usize,
    pub completed: usize,
    pub total: usize,
}

/// Solid-element stress maxima of the compliance-only designs of `ids`.
pub fn design_maxima(ids: &[u32]) -> Result<Vec<f64>, BenchmarkError> {
    let specs = ids.iter().map(|&id| builtin_problem(id)).collect::<Result<Vec<_>, _>>()?;
    stress_maxima(&specs)
}

/// Indices of `maxima` at or below the `q`-th percentile threshold.
pub fn stress_pass_set(maxima: &[f64], q: f64) -> Result<Vec<usize>, BenchmarkError> {
    let sigma = percentile(maxima, q)?;
    Ok((0..maxima.len()).filter(|&i| maxima[i] <= sigma).collect())
}

/// One seed per condition per `q`; thresholds come from the 2D designs
/// unless `base.problems` says otherwise.
pub fn sensitivity_sweep(base: &MatrixConfig, qs: &[f64]) -> Result<Vec<SensitivityPoint>, BenchmarkError> {
    let problems = if base.problems.is_empty() { IDS_2D.collect() } else { base.problems.clone() };
    let maxima = design_maxima(&problems)?;
    let mut out = Vec::new();
    for &q in qs {
        let sigma_yield = percentile(&maxima, q)?;
        let config = MatrixConfig {
            problems: problems.clone(),
            seeds: base.seeds.iter().take(1).copied().collect(),
            sigma_yield,
            ..base.clone()
        };
        let results = run_matrix(&config);
        let conditions: Vec<Condition> = config.conditions.clone();
        for c in conditions {
            let rows: Vec<_> = results.iter().filter(|r| r.slot.condition == c).collect();
            out.push(SensitivityPoint {
                condition: c.to_string(),
                q,
                sigma_yield,
                passed: rows.iter().filter(|r| r.summary.completed() && r.summary.all_gates_pass).count(),
                completed: rows.iter().filter(|r| r.summary.completed()).count(),
                total: rows.len(),
            });
        }
    }
    Ok(out)
}

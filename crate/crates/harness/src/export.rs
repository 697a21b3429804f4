//! Trace JSON, PNG and CSV persistence.

use std::fs;
use std::path::{Path, PathBuf};

use stressgate_control::{RunOutput, RunTrace};

use crate::localize::LocalizationRecord;
use crate::score::EndpointReport;
use crate::sensitivity::SensitivityPoint;
use crate::summary::RunSummary;

pub const TRACE_FILE: &str = "trace.json";
pub const SUMMARY_FILE: &str = "summaries.csv";
pub const RATIO_FILE: &str = "compliance_ratios.csv";
pub const LOCALIZATION_FILE: &str = "localization.csv";
pub const SENSITIVITY_FILE: &str = "sensitivity.csv";

/// Column order of the summary CSV; matches the [`RunSummary`] fields.
pub const SUMMARY_COLUMNS: [&str; 23] = [
    "run_id",
    "problem_id",
    "condition",
    "seed",
    "fixed_volume",
    "status",
    "stop_reason",
    "steps",
    "c_rep",
    "c_final",
    "c_feas",
    "c_final_feas",
    "initial_vf",
    "final_vf",
    "gate_load_outside_void",
    "gate_connectivity",
    "gate_compliance_ratio",
    "gate_grayness",
    "gate_volume_fraction",
    "gate_convergence",
    "gate_max_stress",
    "all_gates_pass",
    "error",
];

pub const RATIO_COLUMNS: [&str; 8] =
    ["condition", "baseline", "endpoint", "problem_id", "seed", "value", "baseline_value", "ratio"];

pub const LOCALIZATION_COLUMNS: [&str; 14] = [
    "run_id",
    "step",
    "action",
    "seed_x",
    "seed_y",
    "hotspot_element",
    "hotspot_x",
    "hotspot_y",
    "distance",
    "seed_elements",
    "overlap_top1",
    "overlap_top5",
    "overlap_top10",
    "stress_change_pct",
];

pub const SENSITIVITY_COLUMNS: [&str; 6] = ["condition", "q", "sigma_yield", "passed", "completed", "total"];

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ExportError + '_ {
    move |source| ExportError::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> ExportError + '_ {
    move |source| ExportError::Csv { path: path.to_path_buf(), source }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ExportError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io(parent))?;
    }
    fs::write(path, bytes).map_err(io(path))
}

/// Writes `{dir}/{run_id}/trace.json` and the step PNGs at the relative
/// paths recorded in the trace. Returns the trace path.
pub fn write_run(dir: &Path, output: &RunOutput) -> Result<PathBuf, ExportError> {
    let trace = &output.trace;
    let trace_path = dir.join(&trace.run_id).join(TRACE_FILE);
    write_file(&trace_path, trace.to_json().as_bytes())?;
    for (step, images) in trace.steps.iter().zip(&output.images) {
        if let (Some(paths), Some(bytes)) = (&step.images, images) {
            write_file(&dir.join(&paths.density), &bytes.density)?;
            write_file(&dir.join(&paths.stress), &bytes.stress)?;
        }
    }
    Ok(trace_path)
}

pub fn read_trace(path: &Path) -> Result<RunTrace, ExportError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    RunTrace::from_json(&text).map_err(|source| ExportError::Json { path: path.to_path_buf(), source })
}

/// Every `*/trace.json` directly under `dir`, sorted by run id.
pub fn read_traces(dir: &Path) -> Result<Vec<RunTrace>, ExportError> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(io(dir))? {
        let p = entry.map_err(io(dir))?.path().join(TRACE_FILE);
        if p.is_file() {
            paths.push(p);
        }
    }
    paths.sort();
    paths.iter().map(|p| read_trace(p)).collect()
}

fn writer(path: &Path, header: &[&str]) -> Result<csv::Writer<fs::File>, ExportError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io(parent))?;
    }
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    Ok(w)
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<(), ExportError> {
    w.flush().map_err(io(path))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per summary; an empty slice writes only the header.
pub fn write_summaries(path: &Path, summaries: &[RunSummary]) -> Result<(), ExportError> {
    let mut w = writer(path, &SUMMARY_COLUMNS)?;
    for s in summaries {
        w.serialize(s).map_err(csv_err(path))?;
    }
    finish(w, path)
}

pub fn read_summaries(path: &Path) -> Result<Vec<RunSummary>, ExportError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<Result<_, _>>().map_err(csv_err(path))
}

/// Per-pair ratios behind each endpoint report.
pub fn write_ratios(path: &Path, reports: &[EndpointReport]) -> Result<(), ExportError> {
    let mut w = writer(path, &RATIO_COLUMNS)?;
    for r in reports {
        for p in &r.pairs {
            w.write_record([
                r.condition.clone(),
                r.baseline.clone(),
                r.endpoint.to_string(),
                p.problem_id.to_string(),
                p.seed.to_string(),
                opt(p.value),
                opt(p.baseline),
                opt(p.ratio()),
            ])
            .map_err(csv_err(path))?;
        }
    }
    finish(w, path)
}

pub fn write_localization(path: &Path, records: &[LocalizationRecord]) -> Result<(), ExportError> {
    let mut w = writer(path, &LOCALIZATION_COLUMNS)?;
    for r in records {
        w.write_record([
            r.run_id.clone(),
            r.step.to_string(),
            r.action.to_string(),
            r.seed_center[0].to_string(),
            r.seed_center[1].to_string(),
            r.hotspot_element.to_string(),
            r.hotspot_centroid[0].to_string(),
            r.hotspot_centroid[1].to_string(),
            r.distance.to_string(),
            r.seed_elements.to_string(),
            r.overlap_top1.to_string(),
            r.overlap_top5.to_string(),
            r.overlap_top10.to_string(),
            opt(r.stress_change_pct),
        ])
        .map_err(csv_err(path))?;
    }
    finish(w, path)
}

pub fn write_sensitivity(path: &Path, points: &[SensitivityPoint]) -> Result<(), ExportError> {
    let mut w = writer(path, &SENSITIVITY_COLUMNS)?;
    for p in points {
        w.write_record([
            p.condition.clone(),
            p.q.to_string(),
            p.sigma_yield.to_string(),
            p.passed.to_string(),
            p.completed.to_string(),
            p.total.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    finish(w, path)
}

//! Experiment driver: run matrices over conditions, problems and seeds,
//! summarize and score them, and write traces, images and CSVs.

pub mod export;
pub mod localize;
pub mod matrix;
pub mod score;
pub mod sensitivity;
pub mod stats;
pub mod summary;

pub use localize::{localization_metrics, LocalizationRecord};
pub use matrix::{parse_ids, run_matrix, run_slot, slot_counts, MatrixConfig, Slot, SlotCounts, SlotResult};
pub use score::{endpoint_report, feasibility_score, Endpoint, EndpointReport};
pub use sensitivity::{sensitivity_sweep, SensitivityPoint};
pub use stats::{wilcoxon_signed_rank, StatsError, Wilcoxon};
pub use summary::{Completion, RunSummary};

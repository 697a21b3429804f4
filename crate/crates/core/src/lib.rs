//! Structured-grid finite elements, a three-field SIMP compliance solver,
//! post-solve von Mises stresses, PNG rendering, gate evaluation and the
//! built-in benchmark suite.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! outer design loop uses.

// `!(x > 0)` is used on purpose to reject NaN pivots.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod evaluator;
pub mod fea;
pub mod problem;
pub mod render;
pub mod scalar;
pub mod simp;
pub mod stress;

pub use scalar::Scalar;

pub use benchmarks::{builtin_problem, BenchmarkError};
pub use evaluator::{evaluate, EvaluationResult, Gates, SolverStats};
pub use fea::{FeaError, Mesh};
pub use problem::{ProblemSpec, SeedRegion, SpecError};
pub use render::RenderError;
pub use simp::{simp_solve, SimpError};
pub use stress::StressOptions;

pub type DensityField = simp::DensityField<f64>;
pub type StressField = stress::StressField<f64>;
pub type DisplacementField = fea::DisplacementField<f64>;
pub type BoundaryConditions = fea::BoundaryConditions<f64>;
pub type SimpResult = simp::SimpResult<f64>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Fea(#[from] FeaError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Simp(#[from] SimpError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
}

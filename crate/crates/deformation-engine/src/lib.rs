//! Deformations of a contracting flow by conjugation.
//!
//! Stage `k` adds a train of small bumps `φ_k` in the time coordinate; the deformed
//! flows are `f_k^t = ψ∘Φ_k⁻¹∘(+t)∘Φ_k∘ψ⁻¹` with `Φ_k = φ_k∘…∘φ₁`, and the deformed
//! fields are `ξ_k = ξ₀ / (DΦ_k∘ψ⁻¹)`.

use base_field::FieldError;
use cantor_schedule::ScheduleError;
use scalar_jet::JetError;
use thiserror::Error;
use time_chart::ChartError;

pub mod build;
pub mod choose;
pub mod measure;
pub mod record;
pub mod samples;
pub mod stack;
pub mod wave;

pub use build::{build_stack, BuildConfig, BuiltStack};
pub use choose::{choose_nk, choose_qk, general_levels, nk_sides, sergeraert_levels, Level};
pub use record::{NormsRecord, StackRecord, StageRecord};
pub use stack::{ConjugationStack, Deformed, Mode, StageNorms};
pub use wave::{WavePlan, WavePlanRecord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeformError {
    #[error("inverse of φ_{k} did not converge near t = {t:e}; the bump is too large")]
    Newton { k: usize, t: f64 },
    #[error("stage {0} is not built")]
    Stage(usize),
    #[error("the two evaluations of σ disagree: {0}")]
    Mismatch(String),
    #[error("stage {k}: {detail}")]
    Horizon { k: usize, detail: String },
    #[error("estimate violated: {0}")]
    Estimate(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

//! Numerical checks of a built conjugation stack.
//!
//! Every check returns a [`CheckReport`]. Exact finite-stage identities are
//! reported as `pass`; bounds on suprema that are only sampled are reported
//! as `sampled-pass`. [`run_all`] runs the checks on a thread pool and merges
//! the reports by id.

use base_field::FieldError;
use cantor_schedule::ScheduleError;
use deformation_engine::DeformError;
use scalar_jet::JetError;
use thiserror::Error;
use time_chart::ChartError;

pub mod config;
pub mod engine;
pub mod estimates;
pub mod flows;
pub mod identities;
pub mod ode;
pub mod oracle;
pub mod report;
pub mod suite;
pub mod wave;

pub use config::{Suite, Tolerances, VerifyConfig};
pub use ode::{ode_oracle_flow, TaylorConfig};
pub use report::{CheckReport, Report, Status, Summary};
pub use suite::{check_ids, run_all, run_one};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("Taylor step underflow near x = {0:e}")]
    StepUnderflow(f64),
    #[error("Taylor integration needed more than {0} steps")]
    StepBudget(usize),
    #[error("configuration: {0}")]
    Config(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("unknown check {0}")]
    UnknownCheck(String),
    #[error(transparent)]
    Deform(#[from] DeformError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

//! Base vector fields on the half line.
//!
//! The default field is Sergeraert's: flat at the origin, `-1` on `[1, ∞)`, and on each
//! dyadic block `[2^{-n-1}, 2^{-n}]` it alternates between the slow speed `u_n = 2^{-n⁴}`
//! and the faster speed `v_n = 2^{-n²}`.

use thiserror::Error;

pub mod bumps;
pub mod norms;
pub mod oracle;
pub mod sergeraert;

pub use bumps::{bump_jet, step, step_jet, step_series, Bump};
pub use norms::{block_derivative_sup, gamma_norms, xi0_c1_norm};
pub use oracle::{geometric_grid, oscillation_statistic, oscillation_statistic_on, BaseFieldOracle, LinearField};
pub use sergeraert::{origin_jet, Location, Piece, SergeraertField, WaveSizes, MAX_ORDER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    /// The field is only evaluated at `x > 0`; use [`origin_jet`] for the flat jet at 0.
    #[error("evaluation at the origin or below")]
    Origin,
    #[error("jet order {0} exceeds the supported maximum")]
    OrderTooLarge(usize),
    #[error("field is not contracting at x ≈ {0}")]
    NotContracting(f64),
    #[error("chart: {0}")]
    Chart(String),
}

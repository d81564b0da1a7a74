//! Time chart `ψ(t) = f₀^t(1)` of the Sergeraert flow.
//!
//! Travel times are tabulated block by block: plateau pieces are exact, transition
//! pieces use graded Gauss–Legendre quadrature. Orbit points are never iterated; every
//! query goes through [`TravelTable::travel_time`] and [`TravelTable::psi_point`].

use base_field::FieldError;
use thiserror::Error;

pub mod chart;
pub mod gauss;
pub mod indices;
pub mod plan;
pub mod table;
pub mod transition;

pub use chart::{flow_series_of, psi_inverse_jet_of, psi_inverse_series_of, psi_jet_of, SergeraertChart};
pub use gauss::GaussLegendre;
pub use indices::{find_indices, orbit_pairs, search_orbit_indices_general, OrbitIndex, OrbitPair};
pub use plan::{Plan, PlanBlock, PlanIndex};
pub use table::{flow_series, BlockTimes, TravelTable};
pub use transition::TransitionTable;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChartError {
    #[error("position or time beyond the tabulated blocks")]
    TableExhausted,
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("margin violation: {0}")]
    Margin(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("search budget exhausted: {0}")]
    Budget(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

//! Nested interval sets `I_k ⊂ [0, 1]`, the grid times `T_k` they are built around,
//! and addresses of points of the limiting Cantor set.

use thiserror::Error;

pub mod address;
pub mod intervals;
pub mod rationals;

pub use address::{cantor_point, CantorAddress};
pub use intervals::{refine_ik, select_tk, Component, ComponentRecord, GridTime, IntervalSet, IntervalSetRecord};
pub use rationals::{format_rational, parse_rational, RationalEnumeration};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("component {component} has fewer than two interior points of (1/{q})Z")]
    GridMiss { component: usize, q: u64 },
    #[error("half-width of the interval around {center} fell below 2^-{bits}")]
    WidthUnderflow { center: String, bits: u32 },
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("address of length {len} is longer than the {depth} built stages")]
    AddressTooLong { len: usize, depth: usize },
    #[error("invalid address {0:?}: only 0 and 1 are allowed")]
    BadAddress(String),
    #[error("invalid interval set: {0}")]
    Invalid(String),
    #[error("bound evaluation failed: {0}")]
    Bound(String),
}

//! Extended-precision scalars and truncated jets of one-dimensional maps.
//!
//! Jets carry raw derivatives; composition goes through truncated Taylor
//! series, so the cost is polynomial in the order.

pub mod jet;
pub mod scalar;
pub mod series;

pub use jet::{bell_number, jet_L, jet_compose, jet_compose_chain, jet_invert, Jet, JetError};
pub use scalar::{Prec, Scalar, ScalarError, MIN_PRECISION_BITS};
pub use series::{factorial, Series};

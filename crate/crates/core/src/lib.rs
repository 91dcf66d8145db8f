//! Core numerics for the `tropos` tool: exact piecewise-affine calculus,
//! non-archimedean and archimedean tropicalization, almost-periodic digit
//! sequences and their divisor lifts, Jessen zero-density functions, the
//! explicit-formula pairing against zeta zeros, and the rank-one Witt
//! construction with its Frobenius flow.

#![forbid(unsafe_code)]

pub mod apseq;
pub mod coord;
pub mod error;
pub mod jensen;
pub mod jessen;
pub mod lift;
mod jsonutil;
pub mod newton;
pub mod numeric;
pub mod pwa;
pub mod weil;
pub mod witt;

pub use coord::{Coord, Interval};
pub use error::{Error, Result};

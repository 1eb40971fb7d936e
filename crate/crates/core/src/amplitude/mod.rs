//! Exact amplitudes in `ℚ(ζ₈) = ℚ(i, √2)` and probabilities in `ℚ(√2)`.
//!
//! The field is a concrete computable subfield of `ℂ`: every amplitude used
//! by Hadamard-style rules (`±1`, `±i`, `±1/√2`) lives here, and equality is
//! decidable, which is what makes unitarity and reversibility checks exact.

mod cyclotomic;
pub mod literal;
mod real;

pub use cyclotomic::Cyc8;
pub use literal::{parse_amplitude, parse_rational, AmplitudeError};
pub use real::Real2;

/// A value too large for `f64` was converted for display.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("value out of floating-point range")]
pub struct RangeError;

//! Exact simulation and analysis of deterministic, probabilistic and quantum
//! Turing machines.
//!
//! Amplitudes live in the cyclotomic field `ℚ(ζ₈)` and probabilities in its
//! real subfield `ℚ(√2)`, so well-formedness, norm conservation and
//! reversibility are decided by exact equality. The algebra is generic over
//! the coefficient [`Scalar`]; the aliases below fix the exact instantiation
//! the engines run on.

pub mod amplitude;
pub mod classical;
pub mod corpus;
pub mod error;
pub mod harness;
pub mod machine;
pub mod quantum;
pub mod report;
pub mod scalar;

pub use amplitude::{parse_amplitude, Cyc8, Real2};
pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact rational, always in lowest terms with a positive denominator.
pub type Rat = num_rational::BigRational;
/// Exact amplitude in `ℚ(ζ₈)`.
pub type CycQ8 = Cyc8<Rat>;
/// Exact real in `ℚ(√2)`; the carrier for probabilities.
pub type RealQ2 = Real2<Rat>;
/// Approximate amplitude with `f64` coefficients.
pub type CycF64 = Cyc8<f64>;
/// Approximate `p + q√2` with `f64` coefficients.
pub type RealF64 = Real2<f64>;

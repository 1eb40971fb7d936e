//! Coefficient scalars for the amplitude algebra.
//!
//! The cyclotomic and real-quadratic types are generic over the coefficient
//! field. The simulator itself runs on [`BigRational`](num_rational::BigRational)
//! coefficients so that every comparison is an exact decision; the float
//! instantiations exist for quick approximate arithmetic and cross-checks.

use std::fmt::Debug;

use num_traits::{Num, Signed, ToPrimitive};

/// Coefficient field for [`Cyc8`](crate::Cyc8) and [`Real2`](crate::Real2).
///
/// Anything ordered, signed and numeric qualifies: `BigRational`,
/// `Ratio<i64>`, `f64`, `f32`. Only the rational instantiations are exact.
pub trait Scalar: Clone + Debug + Num + Signed + PartialOrd + ToPrimitive {
    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl<T> Scalar for T where T: Clone + Debug + Num + Signed + PartialOrd + ToPrimitive {}

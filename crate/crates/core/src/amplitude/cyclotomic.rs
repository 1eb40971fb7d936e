use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::real::Real2;
use super::RangeError;
use crate::scalar::Scalar;

/// An element `c0 + c1 ζ + c2 ζ² + c3 ζ³` of the cyclotomic field generated by
/// `ζ = e^{iπ/4}`, with `ζ⁴ = −1`.
///
/// `{1, ζ, ζ², ζ³}` is a basis, so equality is coefficientwise. The field
/// contains `i = ζ²` and `√2 = ζ − ζ³`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyc8<T> {
    c: [T; 4],
}

impl<T: Scalar> Cyc8<T> {
    pub fn new(c0: T, c1: T, c2: T, c3: T) -> Self {
        Cyc8 { c: [c0, c1, c2, c3] }
    }

    pub fn from_coeffs(c: [T; 4]) -> Self {
        Cyc8 { c }
    }

    pub fn from_scalar(r: T) -> Self {
        Cyc8::new(r, T::zero(), T::zero(), T::zero())
    }

    /// The primitive eighth root of unity `e^{iπ/4}`.
    pub fn zeta() -> Self {
        Cyc8::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn i() -> Self {
        Cyc8::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn sqrt2() -> Self {
        Cyc8::new(T::zero(), T::one(), T::zero(), -T::one())
    }

    pub fn coeffs(&self) -> &[T; 4] {
        &self.c
    }

    /// Complex conjugate: `ζ ↦ −ζ³`, `ζ² ↦ −ζ²`, `ζ³ ↦ −ζ`.
    pub fn conj(&self) -> Self {
        let [c0, c1, c2, c3] = &self.c;
        Cyc8::new(c0.clone(), -c3.clone(), -c2.clone(), -c1.clone())
    }

    /// `|a|² = a·conj(a)`, which always lies in the real subfield `ℚ(√2)`.
    pub fn norm_sq(&self) -> Real2<T> {
        let prod = self * &self.conj();
        // Real by construction: c2 = 0 and c3 = −c1.
        let [r0, r1, _, _] = prod.c;
        Real2::new(r0, r1)
    }

    /// `⟨a, b⟩ = conj(a)·b`, the one-dimensional inner product.
    pub fn inner(&self, other: &Self) -> Self {
        &self.conj() * other
    }

    /// Returns the rational value when the element lies in the coefficient field.
    pub fn as_scalar(&self) -> Option<&T> {
        let [c0, c1, c2, c3] = &self.c;
        (c1.is_zero() && c2.is_zero() && c3.is_zero()).then_some(c0)
    }

    /// Returns the element as `p + q√2` when it is real.
    pub fn as_real(&self) -> Option<Real2<T>> {
        let [c0, c1, c2, c3] = &self.c;
        if c2.is_zero() && (c1.clone() + c3.clone()).is_zero() {
            Some(Real2::new(c0.clone(), c1.clone()))
        } else {
            None
        }
    }

    /// Multiplicative inverse, `None` for zero.
    ///
    /// `a⁻¹ = conj(a) · |a|⁻²`, where the real inverse is taken in `ℚ(√2)`.
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sq().inv()?;
        Some(&self.conj() * &n.to_cyc())
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        Some(self * &rhs.inv()?)
    }

    /// Coordinates in the `{1, i, √2, i√2}` basis: `a + b i + c √2 + d i√2`.
    ///
    /// Uses `ζ = (√2 + i√2)/2` and `ζ³ = (−√2 + i√2)/2`.
    pub fn rect_coords(&self) -> [T; 4] {
        let [c0, c1, c2, c3] = &self.c;
        let two = T::two();
        [
            c0.clone(),
            c2.clone(),
            (c1.clone() - c3.clone()) / two.clone(),
            (c1.clone() + c3.clone()) / two,
        ]
    }

    /// Lossy conversion for display. Never used in decisions.
    pub fn to_complex64(&self) -> Result<Complex64, RangeError> {
        let [a, b, c, d] = self.rect_coords();
        let f = |x: &T| -> Result<f64, RangeError> {
            match x.to_f64() {
                Some(v) if v.is_finite() => Ok(v),
                _ => Err(RangeError),
            }
        };
        let s = std::f64::consts::SQRT_2;
        let re = f(&a)? + f(&c)? * s;
        let im = f(&b)? + f(&d)? * s;
        if re.is_finite() && im.is_finite() {
            Ok(Complex64::new(re, im))
        } else {
            Err(RangeError)
        }
    }
}

impl<T: Scalar> Zero for Cyc8<T> {
    fn zero() -> Self {
        Cyc8::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }
}

impl<T: Scalar> One for Cyc8<T> {
    fn one() -> Self {
        Cyc8::from_scalar(T::one())
    }
}

impl<T: Scalar> Default for Cyc8<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> From<T> for Cyc8<T> {
    fn from(r: T) -> Self {
        Cyc8::from_scalar(r)
    }
}

impl<'a, T: Scalar> Add<&'a Cyc8<T>> for &'a Cyc8<T> {
    type Output = Cyc8<T>;

    fn add(self, rhs: &'a Cyc8<T>) -> Cyc8<T> {
        let [a0, a1, a2, a3] = &self.c;
        let [b0, b1, b2, b3] = &rhs.c;
        Cyc8::new(
            a0.clone() + b0.clone(),
            a1.clone() + b1.clone(),
            a2.clone() + b2.clone(),
            a3.clone() + b3.clone(),
        )
    }
}

impl<T: Scalar> AddAssign<&Cyc8<T>> for Cyc8<T> {
    fn add_assign(&mut self, rhs: &Cyc8<T>) {
        for (a, b) in self.c.iter_mut().zip(&rhs.c) {
            if !b.is_zero() {
                *a = std::mem::replace(a, T::zero()) + b.clone();
            }
        }
    }
}

impl<'a, T: Scalar> Sub<&'a Cyc8<T>> for &'a Cyc8<T> {
    type Output = Cyc8<T>;

    fn sub(self, rhs: &'a Cyc8<T>) -> Cyc8<T> {
        let [a0, a1, a2, a3] = &self.c;
        let [b0, b1, b2, b3] = &rhs.c;
        Cyc8::new(
            a0.clone() - b0.clone(),
            a1.clone() - b1.clone(),
            a2.clone() - b2.clone(),
            a3.clone() - b3.clone(),
        )
    }
}

impl<'a, T: Scalar> Mul<&'a Cyc8<T>> for &'a Cyc8<T> {
    type Output = Cyc8<T>;

    /// Polynomial product reduced with `ζ⁴ = −1`.
    fn mul(self, rhs: &'a Cyc8<T>) -> Cyc8<T> {
        let mut out: [T; 4] = [T::zero(), T::zero(), T::zero(), T::zero()];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = a.clone() * b.clone();
                let k = i + j;
                if k < 4 {
                    out[k] = std::mem::replace(&mut out[k], T::zero()) + t;
                } else {
                    out[k - 4] = std::mem::replace(&mut out[k - 4], T::zero()) - t;
                }
            }
        }
        Cyc8 { c: out }
    }
}

impl<T: Scalar> Neg for &Cyc8<T> {
    type Output = Cyc8<T>;

    fn neg(self) -> Cyc8<T> {
        let [c0, c1, c2, c3] = &self.c;
        Cyc8::new(-c0.clone(), -c1.clone(), -c2.clone(), -c3.clone())
    }
}

impl<T: Scalar> Neg for Cyc8<T> {
    type Output = Cyc8<T>;

    fn neg(self) -> Cyc8<T> {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $f:ident),*) => {$(
        impl<T: Scalar> $tr for Cyc8<T> {
            type Output = Cyc8<T>;
            fn $f(self, rhs: Cyc8<T>) -> Cyc8<T> {
                (&self).$f(&rhs)
            }
        }
        impl<'a, T: Scalar> $tr<&'a Cyc8<T>> for Cyc8<T> {
            type Output = Cyc8<T>;
            fn $f(self, rhs: &'a Cyc8<T>) -> Cyc8<T> {
                (&self).$f(rhs)
            }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul);

impl<T: Scalar> Div for Cyc8<T> {
    type Output = Cyc8<T>;

    /// Panics on division by zero; use [`Cyc8::checked_div`] otherwise.
    fn div(self, rhs: Cyc8<T>) -> Cyc8<T> {
        self.checked_div(&rhs).expect("division by zero in Q(zeta8)")
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Cyc8<T> {
    /// Renders in the amplitude literal grammar, e.g. `1/2 - 1/2*i*r2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.rect_coords();
        super::literal::write_terms(f, &[(a, ""), (b, "i"), (c, "r2"), (d, "i*r2")])
    }
}

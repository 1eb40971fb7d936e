use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::cyclotomic::Cyc8;
use super::RangeError;
use crate::scalar::Scalar;

/// A real number `p + q√2`. Every squared modulus of a [`Cyc8`] lands here,
/// so probabilities stay exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Real2<T> {
    p: T,
    q: T,
}

fn sign_of<T: Scalar>(x: &T) -> Ordering {
    if x.is_zero() {
        Ordering::Equal
    } else if x.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

impl<T: Scalar> Real2<T> {
    pub fn new(p: T, q: T) -> Self {
        Real2 { p, q }
    }

    pub fn from_scalar(p: T) -> Self {
        Real2 { p, q: T::zero() }
    }

    pub fn sqrt2() -> Self {
        Real2::new(T::zero(), T::one())
    }

    /// Rational part.
    pub fn p(&self) -> &T {
        &self.p
    }

    /// Coefficient of `√2`.
    pub fn q(&self) -> &T {
        &self.q
    }

    pub fn as_scalar(&self) -> Option<&T> {
        self.q.is_zero().then_some(&self.p)
    }

    /// Exact sign of `p + q√2`.
    ///
    /// When `p` and `q` have opposite signs, compares `p²` with `2q²`; the two
    /// are never equal for nonzero values since `√2` is irrational.
    pub fn sign(&self) -> Ordering {
        let sp = sign_of(&self.p);
        let sq = sign_of(&self.q);
        match (sp, sq) {
            (s, Ordering::Equal) => s,
            (Ordering::Equal, s) => s,
            (a, b) if a == b => a,
            (sp, _) => {
                let d = self.p.clone() * self.p.clone() - T::two() * self.q.clone() * self.q.clone();
                match sp {
                    Ordering::Greater => sign_of(&d),
                    _ => sign_of(&d).reverse(),
                }
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Conjugate under `√2 ↦ −√2`.
    pub fn galois_conj(&self) -> Self {
        Real2::new(self.p.clone(), -self.q.clone())
    }

    /// `(p + q√2)⁻¹ = (p − q√2)/(p² − 2q²)`; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.p.clone() * self.p.clone() - T::two() * self.q.clone() * self.q.clone();
        Some(Real2::new(self.p.clone() / d.clone(), -self.q.clone() / d))
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        Some(self * &rhs.inv()?)
    }

    /// Embedding into the cyclotomic field, `√2 = ζ − ζ³`.
    pub fn to_cyc(&self) -> Cyc8<T> {
        Cyc8::new(self.p.clone(), self.q.clone(), T::zero(), -self.q.clone())
    }

    /// Lossy conversion for display.
    pub fn to_f64(&self) -> Result<f64, RangeError> {
        let p = self.p.to_f64().filter(|v| v.is_finite()).ok_or(RangeError)?;
        let q = self.q.to_f64().filter(|v| v.is_finite()).ok_or(RangeError)?;
        let v = p + q * std::f64::consts::SQRT_2;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(RangeError)
        }
    }
}

impl<T: Scalar> PartialOrd for Real2<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self - other).sign())
    }
}

impl<T: Scalar + Eq> Ord for Real2<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign()
    }
}

impl<T: Scalar> Zero for Real2<T> {
    fn zero() -> Self {
        Real2::new(T::zero(), T::zero())
    }

    fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }
}

impl<T: Scalar> One for Real2<T> {
    fn one() -> Self {
        Real2::from_scalar(T::one())
    }
}

impl<T: Scalar> Default for Real2<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> From<T> for Real2<T> {
    fn from(p: T) -> Self {
        Real2::from_scalar(p)
    }
}

impl<'a, T: Scalar> Add<&'a Real2<T>> for &'a Real2<T> {
    type Output = Real2<T>;

    fn add(self, rhs: &'a Real2<T>) -> Real2<T> {
        Real2::new(self.p.clone() + rhs.p.clone(), self.q.clone() + rhs.q.clone())
    }
}

impl<'a, T: Scalar> Sub<&'a Real2<T>> for &'a Real2<T> {
    type Output = Real2<T>;

    fn sub(self, rhs: &'a Real2<T>) -> Real2<T> {
        Real2::new(self.p.clone() - rhs.p.clone(), self.q.clone() - rhs.q.clone())
    }
}

impl<'a, T: Scalar> Mul<&'a Real2<T>> for &'a Real2<T> {
    type Output = Real2<T>;

    fn mul(self, rhs: &'a Real2<T>) -> Real2<T> {
        let (a, b, c, d) = (&self.p, &self.q, &rhs.p, &rhs.q);
        Real2::new(
            a.clone() * c.clone() + T::two() * b.clone() * d.clone(),
            a.clone() * d.clone() + b.clone() * c.clone(),
        )
    }
}

impl<T: Scalar> Neg for &Real2<T> {
    type Output = Real2<T>;

    fn neg(self) -> Real2<T> {
        Real2::new(-self.p.clone(), -self.q.clone())
    }
}

impl<T: Scalar> Neg for Real2<T> {
    type Output = Real2<T>;

    fn neg(self) -> Real2<T> {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $f:ident),*) => {$(
        impl<T: Scalar> $tr for Real2<T> {
            type Output = Real2<T>;
            fn $f(self, rhs: Real2<T>) -> Real2<T> {
                (&self).$f(&rhs)
            }
        }
        impl<'a, T: Scalar> $tr<&'a Real2<T>> for Real2<T> {
            type Output = Real2<T>;
            fn $f(self, rhs: &'a Real2<T>) -> Real2<T> {
                (&self).$f(rhs)
            }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul);

impl<T: Scalar> Sum for Real2<T> {
    fn sum<I: Iterator<Item = Real2<T>>>(iter: I) -> Self {
        iter.fold(Real2::zero(), |acc, x| acc + x)
    }
}

impl<'a, T: Scalar> Sum<&'a Real2<T>> for Real2<T> {
    fn sum<I: Iterator<Item = &'a Real2<T>>>(iter: I) -> Self {
        iter.fold(Real2::zero(), |acc, x| acc + x)
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Real2<T> {
    /// Renders in the amplitude literal grammar, e.g. `3 - 2*r2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::literal::write_terms(f, &[(self.p.clone(), ""), (self.q.clone(), "r2")])
    }
}

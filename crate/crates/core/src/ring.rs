//! Minimal commutative-ring abstraction over which the coordinate formulas
//! are written once and instantiated three ways: exact scalars for the
//! kernel, rational intervals for certified bounds, and polynomials for
//! symbolic regression tests.

use num_traits::{One, Zero};

use crate::scalar::Scalar;

pub trait Ring: Clone + PartialEq {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplication by an exact rational constant.
    fn scale(&self, q: &Scalar) -> Self;

    fn from_rational(q: &Scalar) -> Self {
        Self::ring_one().scale(q)
    }
}

impl Ring for Scalar {
    fn ring_zero() -> Self {
        Zero::zero()
    }
    fn ring_one() -> Self {
        One::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, q: &Scalar) -> Self {
        self * q
    }
    fn from_rational(q: &Scalar) -> Self {
        q.clone()
    }
}

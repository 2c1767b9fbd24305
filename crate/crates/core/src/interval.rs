//! Rational interval arithmetic.
//!
//! Endpoints are exact rationals, so enclosures computed here are certified:
//! no rounding direction to get wrong. Used by the subgroup-distance
//! branch-and-bound and by the norm-sum comparisons in `calibrate`.

use num_traits::{Signed, Zero};

use crate::ring::Ring;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct RatInterval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl RatInterval {
    pub fn new(lo: Scalar, hi: Scalar) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RatInterval { lo, hi }
    }

    pub fn point(x: Scalar) -> Self {
        RatInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn width(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Scalar {
        (&self.lo + &self.hi) / crate::scalar::int(2)
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    /// Splits at the midpoint.
    pub fn bisect(&self) -> (Self, Self) {
        let m = self.midpoint();
        (
            RatInterval::new(self.lo.clone(), m.clone()),
            RatInterval::new(m, self.hi.clone()),
        )
    }

    /// Enclosure of `|x|` over the interval.
    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            RatInterval::new(-self.hi.clone(), -self.lo.clone())
        } else {
            let m = std::cmp::max(-self.lo.clone(), self.hi.clone());
            RatInterval::new(Scalar::zero(), m)
        }
    }

    /// Tight enclosure of `x^k`; even powers account for a sign change
    /// inside the interval.
    pub fn powi(&self, k: u32) -> Self {
        if k == 0 {
            return RatInterval::point(crate::scalar::int(1));
        }
        if k % 2 == 1 {
            // odd powers are monotone
            RatInterval::new(
                crate::scalar::pow_i(&self.lo, k as i64),
                crate::scalar::pow_i(&self.hi, k as i64),
            )
        } else {
            let a = self.abs();
            RatInterval::new(
                crate::scalar::pow_i(&a.lo, k as i64),
                crate::scalar::pow_i(&a.hi, k as i64),
            )
        }
    }
}

impl Ring for RatInterval {
    fn ring_zero() -> Self {
        RatInterval::point(Scalar::zero())
    }
    fn ring_one() -> Self {
        RatInterval::point(crate::scalar::int(1))
    }
    fn add(&self, rhs: &Self) -> Self {
        RatInterval::new(&self.lo + &rhs.lo, &self.hi + &rhs.hi)
    }
    fn sub(&self, rhs: &Self) -> Self {
        RatInterval::new(&self.lo - &rhs.hi, &self.hi - &rhs.lo)
    }
    fn mul(&self, rhs: &Self) -> Self {
        let cands = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        RatInterval::new(lo, hi)
    }
    fn neg(&self) -> Self {
        RatInterval::new(-self.hi.clone(), -self.lo.clone())
    }
    fn scale(&self, q: &Scalar) -> Self {
        if q.is_negative() {
            RatInterval::new(&self.hi * q, &self.lo * q)
        } else {
            RatInterval::new(&self.lo * q, &self.hi * q)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn even_power_straddling_zero() {
        let i = RatInterval::new(rat(-2, 1), rat(1, 1));
        let sq = i.powi(2);
        assert_eq!(sq.lo, rat(0, 1));
        assert_eq!(sq.hi, rat(4, 1));
        let cube = i.powi(3);
        assert_eq!(cube.lo, rat(-8, 1));
        assert_eq!(cube.hi, rat(1, 1));
    }

    #[test]
    fn mul_signs() {
        let a = RatInterval::new(rat(-1, 2), rat(3, 1));
        let b = RatInterval::new(rat(-2, 1), rat(-1, 3));
        let p = a.mul(&b);
        assert_eq!(p.lo, rat(-6, 1));
        assert_eq!(p.hi, rat(1, 1));
    }
}

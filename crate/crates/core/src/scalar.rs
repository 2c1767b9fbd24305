//! Exact rational scalars and the few root-enclosure helpers the metric
//! layer needs.
//!
//! Every kernel computation in this crate is carried out on [`Scalar`]
//! values; floating point only ever appears in advisory output.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational number. Closed under `+`, `-`, `*`, `/`
/// (nonzero divisor); all comparisons are exact.
pub type Scalar = BigRational;

/// Shorthand for an integer scalar.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for the fraction `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `base^exp` for integer exponents, handling negatives. Panics on `0^-k`.
pub fn pow_i(base: &Scalar, exp: i64) -> Scalar {
    if exp >= 0 {
        num_traits::pow::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow::pow(base.clone(), (-exp) as usize).recip()
    }
}

/// Formats a scalar as `num` or `num/den`, the wire format used in reports
/// and by the CLI.
pub fn fmt_frac(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `num` or `num/den` (optionally signed) into a scalar.
pub fn parse_frac(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational literal {s:?}"));
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(n, d))
        }
    }
}

/// Best-effort `f64` value, for reporting only.
pub fn to_f64(x: &Scalar) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact `n`-th root of a nonnegative scalar, if one exists.
pub fn exact_nth_root(x: &Scalar, n: u32) -> Option<Scalar> {
    if x.is_negative() {
        return None;
    }
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    let rn = num.nth_root(n);
    let rd = den.nth_root(n);
    if rn.pow(n) == *num && rd.pow(n) == *den {
        Some(BigRational::new(
            BigInt::from_biguint(Sign::Plus, rn),
            BigInt::from_biguint(Sign::Plus, rd),
        ))
    } else {
        None
    }
}

/// Certified rational enclosure `[lo, hi]` of `x^(1/n)` for `x >= 0`, with
/// `hi - lo <= 2^-bits` guaranteed by construction.
pub fn nth_root_enclosure(x: &Scalar, n: u32, bits: u32) -> (Scalar, Scalar) {
    assert!(!x.is_negative(), "nth_root_enclosure of negative value");
    if x.is_zero() {
        return (Scalar::zero(), Scalar::zero());
    }
    // floor(((num * den^(n-1)) << n*bits)^(1/n)) / (den << bits) brackets the root.
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    let scaled: BigUint = (num * den.pow(n - 1)) << (n as u64 * bits as u64);
    let r = scaled.nth_root(n);
    let d = BigInt::from_biguint(Sign::Plus, den << bits);
    let lo = BigRational::new(BigInt::from_biguint(Sign::Plus, r.clone()), d.clone());
    let hi = BigRational::new(BigInt::from_biguint(Sign::Plus, r + 1u32), d);
    (lo, hi)
}

/// `f64` approximation of `x^(1/n)` via a 64-bit enclosure.
pub fn nth_root_f64(x: &Scalar, n: u32) -> f64 {
    if x.is_negative() {
        return f64::NAN;
    }
    let (lo, hi) = nth_root_enclosure(x, n, 64);
    (to_f64(&lo) + to_f64(&hi)) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_round_trip() {
        for s in ["0", "-7", "3/8", "-11/64", "1/2097152"] {
            let x = parse_frac(s).unwrap();
            assert_eq!(fmt_frac(&x), s);
        }
        assert!(parse_frac("1/0").is_err());
        assert!(parse_frac("a/b").is_err());
    }

    #[test]
    fn exact_roots() {
        assert_eq!(exact_nth_root(&rat(1, 64), 6), Some(rat(1, 2)));
        assert_eq!(exact_nth_root(&rat(729, 64), 6), Some(rat(3, 2)));
        assert_eq!(exact_nth_root(&rat(2, 1), 2), None);
        assert_eq!(exact_nth_root(&rat(-8, 1), 3), None);
    }

    #[test]
    fn enclosure_brackets_root() {
        let x = rat(2, 1);
        let (lo, hi) = nth_root_enclosure(&x, 2, 40);
        assert!(lo.clone() * lo.clone() <= x);
        assert!(hi.clone() * hi.clone() >= x);
        assert!(hi - lo <= rat(1, 1 << 40));
    }

    #[test]
    fn pow_negative_exponent() {
        assert_eq!(pow_i(&rat(1, 8), -2), int(64));
        assert_eq!(pow_i(&rat(2, 3), 3), rat(8, 27));
    }
}

//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Small and deliberately unoptimized: the polynomials that arise here have
//! a handful of terms. Running the coordinate formulas over `Poly`
//! indeterminates recovers the group law symbolically, which is how the
//! frozen product formulas are regression-tested term by term.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::ring::Ring;
use crate::scalar::{fmt_frac, Scalar};

/// Invariant: no stored coefficient is zero; all exponent vectors have
/// length `nvars`.
#[derive(Debug, Clone)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u16>, Scalar>,
}

/// Equality is semantic: trailing unused variables are ignored, so the
/// zero polynomial compares equal regardless of arity bookkeeping.
impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        let n = self.nvars.max(other.nvars);
        let widen_all = |p: &Poly| -> BTreeMap<Vec<u16>, Scalar> {
            p.terms
                .iter()
                .map(|(e, c)| (widen(e, n), c.clone()))
                .collect()
        };
        widen_all(self) == widen_all(other)
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        Poly { nvars, terms }
    }

    /// The indeterminate `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut exp = vec![0u16; nvars];
        exp[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(exp, crate::scalar::int(1));
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], &Scalar)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Coefficient of the monomial with the given exponent vector.
    pub fn coeff(&self, exp: &[u16]) -> Scalar {
        self.terms.get(exp).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Scalar::zero();
        for (exp, c) in &self.terms {
            let mut m = c.clone();
            for (x, &e) in point.iter().zip(exp.iter()) {
                if e > 0 {
                    m *= crate::scalar::pow_i(x, e as i64);
                }
            }
            acc += m;
        }
        acc
    }

    fn insert(&mut self, exp: Vec<u16>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }
}

impl Ring for Poly {
    fn ring_zero() -> Self {
        // nvars is fixed up on first combination with a sized operand
        Poly {
            nvars: 0,
            terms: BTreeMap::new(),
        }
    }
    fn ring_one() -> Self {
        Poly::constant(0, crate::scalar::int(1))
    }
    fn add(&self, rhs: &Self) -> Self {
        let nvars = unify(self, rhs);
        let mut out = Poly {
            nvars,
            terms: BTreeMap::new(),
        };
        for (e, c) in self.terms.iter().chain(rhs.terms.iter()) {
            out.insert(widen(e, nvars), c.clone());
        }
        out
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        let nvars = unify(self, rhs);
        let mut out = Poly {
            nvars,
            terms: BTreeMap::new(),
        };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let ea = widen(ea, nvars);
                let eb = widen(eb, nvars);
                let exp: Vec<u16> = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                out.insert(exp, ca * cb);
            }
        }
        out
    }
    fn neg(&self) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }
    fn scale(&self, q: &Scalar) -> Self {
        if q.is_zero() {
            return Poly {
                nvars: self.nvars,
                terms: BTreeMap::new(),
            };
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * q)).collect(),
        }
    }
}

fn unify(a: &Poly, b: &Poly) -> usize {
    a.nvars.max(b.nvars)
}

fn widen(exp: &[u16], nvars: usize) -> Vec<u16> {
    let mut e = exp.to_vec();
    e.resize(nvars, 0);
    e
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exp, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", fmt_frac(c))?;
            for (i, &e) in exp.iter().enumerate() {
                if e == 1 {
                    write!(f, "*v{i}")?;
                } else if e > 1 {
                    write!(f, "*v{i}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn arithmetic_and_eval() {
        let n = 2;
        let x = Poly::var(n, 0);
        let y = Poly::var(n, 1);
        // (x + y)^2 = x^2 + 2xy + y^2
        let s = x.add(&y);
        let sq = s.mul(&s);
        assert_eq!(sq.coeff(&[2, 0]), int(1));
        assert_eq!(sq.coeff(&[1, 1]), int(2));
        assert_eq!(sq.coeff(&[0, 2]), int(1));
        assert_eq!(sq.eval(&[rat(1, 2), rat(3, 2)]), int(4));
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = Poly::var(1, 0);
        let z = x.sub(&x);
        assert!(z.is_zero());
    }
}

//! Cone and semigroup membership predicates.
//!
//! Three kinds of cone share one [`ConeSpec`]: the open Euclidean cone in
//! the horizontal layer, the metric cone of points near a one-parameter
//! subgroup, and the closure of the semigroup reachable by cone-directed
//! flows, which for the `X2` axis is cut out by an explicit polynomial.
//! Boundary points count as inside for the closure predicates and outside
//! for the open Euclidean cone, matching the strict/non-strict inequalities
//! as stated.

use num_traits::{Signed, Zero};

use crate::group::{horizontal_dot, horizontal_norm_sq, AlgebraVector, Group, GroupPoint};
use crate::metric::{box_norm, dist_to_subgroup_with, DistOptions, MetricParams};
use crate::scalar::{exact_nth_root, int, nth_root_enclosure, pow_i, to_f64, Scalar};
use crate::{Error, Result};

/// An axis in the horizontal layer plus an opening `sigma` in `(0, 1)`.
/// The axis must be an exact rational unit vector, e.g. `(3/5, 4/5)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeSpec {
    axis: AlgebraVector,
    sigma: Scalar,
}

impl ConeSpec {
    pub fn new(group: Group, e1: Scalar, e2: Scalar, sigma: Scalar) -> Result<ConeSpec> {
        if &e1 * &e1 + &e2 * &e2 != int(1) {
            return Err(Error::NotUnit);
        }
        if !sigma.is_positive() || sigma >= int(1) {
            return Err(Error::InvalidParameter(format!(
                "cone opening must lie in (0,1), got {}",
                sigma
            )));
        }
        Ok(ConeSpec {
            axis: group.horizontal(e1, e2),
            sigma,
        })
    }

    /// The cone around the `X2` axis.
    pub fn axis_x2(group: Group, sigma: Scalar) -> Result<ConeSpec> {
        ConeSpec::new(group, int(0), int(1), sigma)
    }

    pub fn axis(&self) -> &AlgebraVector {
        &self.axis
    }

    pub fn sigma(&self) -> &Scalar {
        &self.sigma
    }

    pub fn group(&self) -> Group {
        self.axis.group()
    }
}

/// Membership in the open Euclidean cone `<v, e> > (1 - sigma^2) |v|`,
/// decided exactly by sign analysis and squaring.
pub fn in_euclidean_cone(v: &AlgebraVector, c: &ConeSpec) -> Result<bool> {
    if !v.is_horizontal() {
        return Err(Error::NotHorizontal);
    }
    if v.group() != c.group() {
        return Err(Error::GroupMismatch {
            left: v.group(),
            right: c.group(),
        });
    }
    let dot = horizontal_dot(v, &c.axis);
    if !dot.is_positive() {
        return Ok(false);
    }
    let rhs = int(1) - &c.sigma * &c.sigma;
    // dot > rhs * |v|  <=>  dot^2 > rhs^2 |v|^2 (both sides nonnegative)
    Ok(&dot * &dot > &rhs * &rhs * horizontal_norm_sq(v))
}

/// Outcome of a predicate that may be certified either way or left
/// undecided at the requested tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeDecision {
    Inside,
    Outside,
    Undecided,
}

/// Membership in the metric cone `dist(w, N(e)) <= sigma |w|`.
///
/// Exact for axis-aligned configurations; otherwise certified via the
/// interval search in [`dist_to_subgroup_with`], reporting `Undecided` when
/// the distance enclosure straddles the threshold.
pub fn in_metric_cone(w: &GroupPoint, c: &ConeSpec, p: &MetricParams) -> Result<ConeDecision> {
    in_metric_cone_with(w, c, p, &DistOptions::default())
}

pub fn in_metric_cone_with(
    w: &GroupPoint,
    c: &ConeSpec,
    p: &MetricParams,
    opts: &DistOptions,
) -> Result<ConeDecision> {
    let norm = box_norm(w, p);
    let threshold = pow_i(&c.sigma, 6) * norm.pow6();
    let mut opts = opts.clone();
    opts.threshold_pow6 = Some(threshold.clone());
    let d = dist_to_subgroup_with(w, &c.axis, p, &opts)?;
    Ok(match d.le_pow6(&threshold) {
        Some(true) => ConeDecision::Inside,
        Some(false) => ConeDecision::Outside,
        None => ConeDecision::Undecided,
    })
}

/// The quantities that must all be nonnegative for membership in the
/// closure of the semigroup generated by `X2`-directed cone flows.
///
/// These polynomial systems are taken as given predicates; the flow
/// experiments test them empirically against sampled reachable points.
pub fn semigroup_margins(x: &GroupPoint) -> Vec<Scalar> {
    let c = x.coords();
    match x.group() {
        Group::F23 => {
            let (x2, x3, x4, x5) = (&c[1], &c[2], &c[3], &c[4]);
            // x2^3 x4 - 2 x2^2 x3^2 - 6 x2 x3 x5 - 6 x5^2
            let poly = x2 * x2 * x2 * x4
                - int(2) * x2 * x2 * x3 * x3
                - int(6) * x2 * x3 * x5
                - int(6) * x5 * x5;
            vec![x2.clone(), poly]
        }
        Group::Engel => {
            let (x2, x3, x4) = (&c[1], &c[2], &c[3]);
            let poly = int(2) * x2 * x4 - x3 * x3;
            vec![x2.clone(), x4.clone(), poly]
        }
    }
}

/// Exact membership in the closure of the `X2` cone semigroup.
pub fn in_semigroup_closure(x: &GroupPoint) -> bool {
    semigroup_margins(x).iter().all(|m| !m.is_negative())
}

/// Whether `q` lies in the translate by `p` of the semigroup closure,
/// i.e. whether a cone-directed flow leaving `p` could reach `q`.
pub fn in_translated_constraint(p: &GroupPoint, q: &GroupPoint) -> Result<bool> {
    Ok(in_semigroup_closure(&p.inv().mul(q)?))
}

// ---------------------------------------------------------------------------
// Intrinsic Lipschitz assessment.
// ---------------------------------------------------------------------------

/// Result of scanning all ordered sample pairs of a graph for the cone
/// condition `dist(F(s), F(t) N(e)) <= sigma |F(t)^-1 F(s)|`.
///
/// `sigma6_lo..=sigma6_hi` encloses the sixth power of the smallest opening
/// that passes; the enclosure is a point when every pair was resolved
/// exactly.
#[derive(Debug, Clone)]
pub struct LipschitzAssessment {
    pub pairs: u64,
    pub sigma6_lo: Scalar,
    pub sigma6_hi: Scalar,
    pub exact: bool,
    /// Parameters of the pair realizing the worst ratio.
    pub worst_pair: Option<(Scalar, Scalar)>,
}

impl LipschitzAssessment {
    /// Does the sample set satisfy the cone condition at opening `sigma`?
    /// `None` when the assessment is not tight enough to decide.
    pub fn passes_at(&self, sigma: &Scalar) -> Option<bool> {
        let s6 = pow_i(sigma, 6);
        if s6 >= self.sigma6_hi {
            Some(true)
        } else if s6 < self.sigma6_lo {
            Some(false)
        } else if self.exact {
            Some(s6 >= self.sigma6_lo)
        } else {
            None
        }
    }

    /// Advisory float for the minimal passing opening.
    pub fn min_sigma_approx(&self) -> f64 {
        crate::scalar::nth_root_f64(&self.sigma6_hi, 6)
    }
}

/// Scans every ordered pair of graph samples `(t, F(t))` for the intrinsic
/// cone condition and reports the minimal opening that passes.
pub fn assess_intrinsic_lipschitz(
    samples: &[(Scalar, GroupPoint)],
    axis: &AlgebraVector,
    p: &MetricParams,
) -> Result<LipschitzAssessment> {
    let mut ts: Vec<&Scalar> = samples.iter().map(|(t, _)| t).collect();
    ts.sort();
    if ts.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicateParameter);
    }
    let mut sigma6_lo = Scalar::zero();
    let mut sigma6_hi = Scalar::zero();
    let mut exact = true;
    let mut worst: Option<(Scalar, Scalar)> = None;
    let mut pairs = 0u64;
    for (ti, pi) in samples {
        for (tj, pj) in samples {
            if ti == tj {
                continue;
            }
            pairs += 1;
            // w = F(t)^-1 F(s) with t = ti, s = tj
            let w = pi.inv().mul(pj)?;
            let norm = box_norm(&w, p);
            if norm.is_zero() {
                // coincident graph points satisfy the condition trivially
                continue;
            }
            let d = dist_to_subgroup_with(&w, axis, p, &DistOptions::default())?;
            let lo = &d.lower_pow6 / norm.pow6();
            let hi = d.upper.pow6() / norm.pow6();
            if !d.exact {
                exact = false;
            }
            if hi > sigma6_hi {
                sigma6_hi = hi;
                worst = Some((ti.clone(), tj.clone()));
            }
            if lo > sigma6_lo {
                sigma6_lo = lo;
            }
        }
    }
    Ok(LipschitzAssessment {
        pairs,
        sigma6_lo,
        sigma6_hi,
        exact,
        worst_pair: worst,
    })
}

// ---------------------------------------------------------------------------
// Graph-to-cone opening conversion.
// ---------------------------------------------------------------------------

/// A possibly-irrational nested radical value with a certified error bound.
#[derive(Debug, Clone)]
pub struct NestedRadical {
    pub exact: Option<Scalar>,
    pub approx: f64,
    /// Width of the certified enclosure behind `approx`.
    pub error_bound: f64,
}

/// The opening `sqrt(1 - sqrt(1 - sigma^2))` of the Euclidean cone swept by
/// the graph map of an intrinsic Lipschitz function with opening `sigma`.
pub fn graph_cone_opening(sigma: &Scalar) -> Result<NestedRadical> {
    if sigma.is_negative() || *sigma > int(1) {
        return Err(Error::InvalidParameter(format!(
            "opening must lie in [0,1], got {sigma}"
        )));
    }
    let inner = int(1) - sigma * sigma;
    if let Some(s) = exact_nth_root(&inner, 2) {
        let outer = int(1) - s;
        if let Some(r) = exact_nth_root(&outer, 2) {
            return Ok(NestedRadical {
                approx: to_f64(&r),
                exact: Some(r),
                error_bound: 0.0,
            });
        }
    }
    let bits = 80;
    let (slo, shi) = nth_root_enclosure(&inner, 2, bits);
    let outer_lo = int(1) - shi;
    let outer_hi = int(1) - slo;
    let outer_lo = if outer_lo.is_negative() {
        Scalar::zero()
    } else {
        outer_lo
    };
    let (rlo, _) = nth_root_enclosure(&outer_lo, 2, bits);
    let (_, rhi) = nth_root_enclosure(&outer_hi, 2, bits);
    Ok(NestedRadical {
        exact: None,
        approx: (to_f64(&rlo) + to_f64(&rhi)) / 2.0,
        error_bound: to_f64(&(rhi - rlo)),
    })
}

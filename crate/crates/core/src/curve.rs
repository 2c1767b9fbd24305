//! The nested interval families, the plateau curve iterates over them, and
//! the exact verifier for their stated properties.
//!
//! Level 1 is the single interval `[0,1]`. Passing from level `k` to
//! `k+1`, every interval splits at its barycenter `c` with the open gap
//! `(c - 8^-k, c + 8^-k)` removed, so level `k` carries `2^(k-1)`
//! pairwise-disjoint increasing intervals. The curve iterate at level `k`
//! is constant on each interval, equal to `(0, t, 0, omega, 0)` where the
//! plateau value `omega` is a multiple of `eps3^-3`:
//!
//! ```text
//!     omega(1,1) = 0
//!     omega(k+1, 2j-1) = omega(k, j)
//!     omega(k+1, 2j)   = omega(k, j) - eps3^-3 * 8^(-6k)
//! ```
//!
//! Plateau values are stored in units of `eps3^-3`; everything here is
//! exact rational and independent of the metric parameters until a group
//! point is materialized.

use num_traits::{One, Signed, Zero};

use crate::group::{Group, GroupPoint};
use crate::metric::{box_norm, MetricParams};
use crate::scalar::{fmt_frac, int, pow_i, rat, Scalar};
use crate::{Error, Result};

/// A closed interval with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Interval {
    pub fn length(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn contains(&self, t: &Scalar) -> bool {
        self.lo <= *t && *t <= self.hi
    }

    pub fn midpoint(&self) -> Scalar {
        (&self.lo + &self.hi) / int(2)
    }
}

/// One level of the construction: `2^(k-1)` disjoint increasing intervals.
#[derive(Debug, Clone)]
pub struct CantorLevel {
    pub k: u32,
    pub intervals: Vec<Interval>,
}

impl CantorLevel {
    /// Exact total length of the level.
    pub fn measure(&self) -> Scalar {
        self.intervals.iter().map(|i| i.length()).sum()
    }
}

/// Left/right choice when an interval splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The interval tower together with the plateau values of the curve
/// iterates, built once to a fixed depth.
#[derive(Debug, Clone)]
pub struct CurveTower {
    levels: Vec<CantorLevel>,
    /// `units[k-1][j]` is the plateau value of interval `j` (0-based) at
    /// level `k`, in units of `eps3^-3`; nonpositive and decreasing in `j`.
    units: Vec<Vec<Scalar>>,
}

impl CurveTower {
    pub fn build(depth: u32) -> CurveTower {
        assert!(depth >= 1);
        let mut levels = vec![CantorLevel {
            k: 1,
            intervals: vec![Interval {
                lo: int(0),
                hi: int(1),
            }],
        }];
        let mut units = vec![vec![Scalar::zero()]];
        for k in 1..depth {
            let radius = pow_i(&rat(1, 8), k as i64);
            let step = pow_i(&rat(1, 8), 6 * k as i64);
            let prev = &levels[(k - 1) as usize];
            let prev_units = &units[(k - 1) as usize];
            let mut intervals = Vec::with_capacity(prev.intervals.len() * 2);
            let mut next_units = Vec::with_capacity(prev.intervals.len() * 2);
            for (iv, u) in prev.intervals.iter().zip(prev_units) {
                let c = iv.midpoint();
                let left = Interval {
                    lo: iv.lo.clone(),
                    hi: &c - &radius,
                };
                let right = Interval {
                    lo: &c + &radius,
                    hi: iv.hi.clone(),
                };
                debug_assert!(left.lo < left.hi && right.lo < right.hi);
                intervals.push(left);
                intervals.push(right);
                next_units.push(u.clone());
                next_units.push(u - &step);
            }
            levels.push(CantorLevel {
                k: k + 1,
                intervals,
            });
            units.push(next_units);
        }
        CurveTower { levels, units }
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn level(&self, k: u32) -> Result<&CantorLevel> {
        self.check_depth(k)?;
        Ok(&self.levels[(k - 1) as usize])
    }

    fn check_depth(&self, k: u32) -> Result<()> {
        if k == 0 || k > self.depth() {
            return Err(Error::DepthExceeded {
                requested: k,
                depth: self.depth(),
            });
        }
        Ok(())
    }

    /// Plateau value of interval `j` (1-based) at level `k`, in units of
    /// `eps3^-3`.
    pub fn omega_unit(&self, k: u32, j: usize) -> Result<&Scalar> {
        self.check_depth(k)?;
        let row = &self.units[(k - 1) as usize];
        if j == 0 || j > row.len() {
            return Err(Error::IndexRange(format!(
                "interval index {j} at level {k} (have {})",
                row.len()
            )));
        }
        Ok(&row[j - 1])
    }

    /// The materialized plateau value `omega(k, j)` under the given metric
    /// parameters.
    pub fn omega_value(&self, k: u32, j: usize, p: &MetricParams) -> Result<Scalar> {
        Ok(self.omega_unit(k, j)? * p.eps3_inv_cubed())
    }

    pub fn units_at(&self, k: u32) -> Result<&[Scalar]> {
        self.check_depth(k)?;
        Ok(&self.units[(k - 1) as usize])
    }

    /// Index (0-based) of the interval of level `k` containing `t`, or the
    /// gap it fell into.
    pub fn locate(&self, k: u32, t: &Scalar) -> Result<usize> {
        let level = self.level(k)?;
        let ivs = &level.intervals;
        let pos = ivs.partition_point(|iv| iv.hi < *t);
        if pos < ivs.len() && ivs[pos].contains(t) {
            return Ok(pos);
        }
        let gap_lo = if pos == 0 {
            "-inf".to_string()
        } else {
            fmt_frac(&ivs[pos - 1].hi)
        };
        let gap_hi = if pos == ivs.len() {
            "+inf".to_string()
        } else {
            fmt_frac(&ivs[pos].lo)
        };
        Err(Error::OutsideCantorSet {
            level: k,
            t: fmt_frac(t),
            gap_lo,
            gap_hi,
        })
    }

    /// The level-`k` curve point above `t`, materialized in `group` with
    /// the given metric parameters.
    pub fn curve_point(
        &self,
        k: u32,
        t: &Scalar,
        group: Group,
        p: &MetricParams,
    ) -> Result<GroupPoint> {
        let j = self.locate(k, t)?;
        let unit = &self.units[(k - 1) as usize][j];
        Ok(plateau_point(group, p, t, unit))
    }

    /// All interval endpoints of level `k` with their interval index,
    /// increasing in `t`. These endpoints persist to every deeper level
    /// and are the canonical finite sample of the limit set.
    pub fn endpoint_samples(&self, k: u32) -> Result<Vec<(Scalar, usize)>> {
        let level = self.level(k)?;
        let mut out = Vec::with_capacity(level.intervals.len() * 2);
        for (j, iv) in level.intervals.iter().enumerate() {
            out.push((iv.lo.clone(), j));
            out.push((iv.hi.clone(), j));
        }
        Ok(out)
    }

    /// Exact measure of the level-`k` set.
    pub fn level_measure(&self, k: u32) -> Result<Scalar> {
        Ok(self.level(k)?.measure())
    }
}

/// Exact measure of the intersection of all levels: the removed gaps sum
/// to a geometric series with total `1/3`.
pub fn limit_measure() -> Scalar {
    rat(2, 3)
}

/// The group point `(0, t, 0, unit * eps3^-3 [, 0])`.
pub fn plateau_point(group: Group, p: &MetricParams, t: &Scalar, unit: &Scalar) -> GroupPoint {
    let omega = unit * p.eps3_inv_cubed();
    let coords = match group {
        Group::F23 => vec![
            Scalar::zero(),
            t.clone(),
            Scalar::zero(),
            omega,
            Scalar::zero(),
        ],
        Group::Engel => vec![Scalar::zero(), t.clone(), Scalar::zero(), omega],
    };
    group
        .point(coords)
        .expect("plateau coordinates match the dimension")
}

// ---------------------------------------------------------------------------
// Points of the limit set, addressed by their splitting choices.
// ---------------------------------------------------------------------------

/// A point of the limit set: finitely many recorded choices followed by an
/// eventually-constant tail. Interval endpoints are exactly the points of
/// this form, so their limit values are exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CantorPoint {
    pub prefix: Vec<Side>,
    pub tail: Side,
}

impl CantorPoint {
    pub fn new(prefix: Vec<Side>, tail: Side) -> CantorPoint {
        CantorPoint { prefix, tail }
    }

    /// The splitting choice at level transition `l` (1-based).
    fn bit(&self, l: usize) -> Side {
        self.prefix.get(l - 1).copied().unwrap_or(self.tail)
    }

    /// Index (0-based) of the containing interval at level `k`.
    pub fn interval_index(&self, k: u32) -> usize {
        (1..k as usize).fold(0usize, |j, l| {
            2 * j + if self.bit(l) == Side::Right { 1 } else { 0 }
        })
    }

    /// The exact parameter value of this point.
    pub fn value(&self, tower: &CurveTower) -> Result<Scalar> {
        let k = self.prefix.len() as u32 + 1;
        let iv = &tower.level(k)?.intervals[self.interval_index(k)];
        Ok(match self.tail {
            Side::Left => iv.lo.clone(),
            Side::Right => iv.hi.clone(),
        })
    }

    /// The truncated fourth-coordinate value at level `k`, in `eps3^-3`
    /// units: `-sum_{l=1}^{k-1} bit_l 8^(-6l)`.
    pub fn gamma4_unit_truncated(&self, k: u32) -> Scalar {
        let mut acc = Scalar::zero();
        for l in 1..k as usize {
            if self.bit(l) == Side::Right {
                acc -= pow_i(&rat(1, 8), 6 * l as i64);
            }
        }
        acc
    }

    /// The exact limit value of the fourth coordinate in `eps3^-3` units;
    /// the eventually-constant tail sums as a geometric series.
    pub fn gamma4_unit_limit(&self) -> Scalar {
        let m = self.prefix.len();
        let mut acc = self.gamma4_unit_truncated(m as u32 + 1);
        if self.tail == Side::Right {
            // sum_{l=m+1}^inf 8^(-6l) = 8^(-6(m+1)) / (1 - 8^-6)
            let tail = pow_i(&rat(1, 8), 6 * (m as i64 + 1)) / (int(1) - pow_i(&rat(1, 8), 6));
            acc -= tail;
        }
        acc
    }
}

/// Certified truncation error of the level-`k` partial sum, in `eps3^-3`
/// units: the increments to all deeper levels telescope to at most
/// `8^(-6k) / (1 - 8^-6)`.
pub fn truncation_error_unit(k: u32) -> Scalar {
    pow_i(&rat(1, 8), 6 * k as i64) / (int(1) - pow_i(&rat(1, 8), 6))
}

/// The truncated limit-curve point at a limit-set address, together with
/// the certified bound on the fourth-coordinate truncation error.
pub fn gamma_limit(
    pt: &CantorPoint,
    k_trunc: u32,
    tower: &CurveTower,
    group: Group,
    p: &MetricParams,
) -> Result<(GroupPoint, Scalar)> {
    let t = pt.value(tower)?;
    let unit = pt.gamma4_unit_truncated(k_trunc);
    let err = truncation_error_unit(k_trunc) * p.eps3_inv_cubed();
    Ok((plateau_point(group, p, &t, &unit), err))
}

// ---------------------------------------------------------------------------
// The per-level verifier.
// ---------------------------------------------------------------------------

/// The vertical-over-horizontal ratio bound of the level-`k` iterate:
/// `(8^-1 - 8^-k) / (1 - 8^-1)`, increasing to `1/7`.
pub fn ratio_bound(k: u32) -> Scalar {
    let eighth = rat(1, 8);
    (&eighth - pow_i(&eighth, k as i64)) / (int(1) - eighth)
}

#[derive(Debug, Clone)]
pub struct IterateVerification {
    pub level: u32,
    pub pass: bool,
    pub endpoint_pairs: u64,
    /// Worst slack of the successive-difference bounds, in `eps3^-3` units.
    pub refinement_margin: Scalar,
    /// Worst slack of `ratio_bound(k)^3 |s-t|^3 - |d omega|`, `eps3`-free.
    pub ratio_margin: Scalar,
    /// Worst cross-interval decrease gap beyond the required step.
    pub decrease_margin: Scalar,
    /// Number of endpoint pairs for which the box norm of the displacement
    /// equals `eps1 |s-t|` exactly.
    pub isometry_pairs_ok: u64,
    pub failures: Vec<String>,
}

/// Runs the exact per-level checks on the iterate at level `k`:
/// successive refinement bounds, the cubed ratio bound over all endpoint
/// pairs, plateau-value membership in the admissible sum set, the
/// cross-interval decrease gap, and the exact isometry of the materialized
/// curve through the group operations themselves.
pub fn verify_iterate(
    tower: &CurveTower,
    k: u32,
    group: Group,
    p: &MetricParams,
) -> Result<IterateVerification> {
    if k < 2 {
        return Err(Error::InvalidParameter(
            "verification needs level >= 2".into(),
        ));
    }
    tower.check_depth(k)?;
    let units = tower.units_at(k)?;
    let parent_units = tower.units_at(k - 1)?;
    let mut failures = Vec::new();

    // (a) refinement: 0 <= parent - child <= 8^(-6(k-1)) on every interval
    let step = pow_i(&rat(1, 8), 6 * (k as i64 - 1));
    let mut refinement_margin: Option<Scalar> = None;
    for (j, u) in units.iter().enumerate() {
        let parent = &parent_units[j / 2];
        let diff = parent - u;
        if diff.is_negative() || diff > step {
            failures.push(format!("refinement bound fails at interval {}", j + 1));
        }
        let slack = std::cmp::min(diff.clone(), &step - &diff);
        refinement_margin = Some(match refinement_margin {
            None => slack,
            Some(m) => std::cmp::min(m, slack),
        });
    }

    // (c) plateau values lie in the admissible sum set: base-8^6 digits of
    // -unit * 8^(6(k-1)) must all be 0 or 1, using at most k-1 digits
    let scale = pow_i(&int(8), 6 * (k as i64 - 1));
    for (j, u) in units.iter().enumerate() {
        let scaled = -u * &scale;
        if !scaled.denom().is_one() || scaled.is_negative() {
            failures.push(format!(
                "plateau value at interval {} not admissible",
                j + 1
            ));
            continue;
        }
        let mut n = scaled.numer().clone();
        let base = num_bigint::BigInt::from(262144u64); // 8^6
        let mut digits = 0;
        while !n.is_zero() {
            let d = &n % &base;
            if !(d == num_bigint::BigInt::from(0u8) || d == num_bigint::BigInt::from(1u8)) {
                failures.push(format!("plateau digits at interval {} not 0/1", j + 1));
                break;
            }
            n /= &base;
            digits += 1;
        }
        if digits > k - 1 {
            failures.push(format!("plateau value at interval {} too deep", j + 1));
        }
    }

    // (d) strict decrease across intervals with the required gap
    let mut decrease_margin: Option<Scalar> = None;
    for j1 in 0..units.len() {
        for j2 in (j1 + 1)..units.len() {
            let drop = &units[j1] - &units[j2]; // positive required
            let slack = &drop - &step;
            if slack.is_negative() {
                failures.push(format!(
                    "decrease gap fails between intervals {} and {}",
                    j1 + 1,
                    j2 + 1
                ));
            }
            decrease_margin = Some(match decrease_margin.take() {
                None => slack,
                Some(m) => std::cmp::min(m, slack),
            });
        }
    }

    // (b) cubed ratio bound and (e) exact isometry over all endpoint pairs
    let samples = tower.endpoint_samples(k)?;
    let cb3 = pow_i(&ratio_bound(k), 3);
    let eps1_6 = pow_i(p.eps1(), 6);
    let mut ratio_margin: Option<Scalar> = None;
    let mut pairs = 0u64;
    let mut isometry_ok = 0u64;
    for a in 0..samples.len() {
        for b in (a + 1)..samples.len() {
            let (t, j1) = &samples[a];
            let (s, j2) = &samples[b];
            if t == s {
                continue;
            }
            pairs += 1;
            let du = (&units[*j1] - &units[*j2]).abs();
            let dt = (s - t).abs();
            // eps3 |d gamma4|^(1/3) <= c(k) |s-t|, cubed and eps3-free
            let slack = &cb3 * pow_i(&dt, 3) - &du;
            if slack.is_negative() {
                failures.push(format!("ratio bound fails for t={t}, s={s}"));
            }
            ratio_margin = Some(match ratio_margin.take() {
                None => slack,
                Some(m) => std::cmp::min(m, slack),
            });
            // materialized isometry via the actual group operations
            let pa = plateau_point(group, p, t, &units[*j1]);
            let pb = plateau_point(group, p, s, &units[*j2]);
            let n = box_norm(&pa.inv().mul(&pb)?, p);
            if *n.pow6() == &eps1_6 * pow_i(&dt, 6) {
                isometry_ok += 1;
            } else {
                failures.push(format!("isometry fails for t={t}, s={s}"));
            }
        }
    }

    Ok(IterateVerification {
        level: k,
        pass: failures.is_empty(),
        endpoint_pairs: pairs,
        refinement_margin: refinement_margin.unwrap_or_else(Scalar::zero),
        ratio_margin: ratio_margin.unwrap_or_else(Scalar::zero),
        decrease_margin: decrease_margin.unwrap_or_else(Scalar::zero),
        isometry_pairs_ok: isometry_ok,
        failures,
    })
}

/// Worst-case certified lower bound, in `eps3^-3` units, for the limit-gap
/// inequality at level `k`: over every pair of points in different
/// level-`k` intervals, the truncated gap at level `trunc` minus twice the
/// truncation error, minus the required `5 * 8^(-6k)`.
pub fn monotone_gap_margin(tower: &CurveTower, k: u32, trunc: u32) -> Result<Scalar> {
    tower.check_depth(k)?;
    tower.check_depth(trunc)?;
    if trunc < k {
        return Err(Error::InvalidParameter(
            "truncation level below pair level".into(),
        ));
    }
    let units = tower.units_at(k)?;
    // a point of interval j can lose at most the all-right tail below level k
    let mut descent = Scalar::zero();
    for l in k..trunc {
        descent += pow_i(&rat(1, 8), 6 * l as i64);
    }
    let err = truncation_error_unit(trunc);
    let required = int(5) * pow_i(&rat(1, 8), 6 * k as i64);
    let mut worst: Option<Scalar> = None;
    for j1 in 0..units.len() {
        for j2 in (j1 + 1)..units.len() {
            // gap between gamma4 over interval j1 (earlier, larger) and j2
            let gap = (&units[j1] - &descent) - &units[j2];
            let margin = &gap - int(2) * &err - &required;
            worst = Some(match worst.take() {
                None => margin,
                Some(m) => std::cmp::min(m, margin),
            });
        }
    }
    worst.ok_or_else(|| Error::InvalidParameter("no interval pairs at this level".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_two_matches_construction() {
        let tower = CurveTower::build(4);
        let l2 = tower.level(2).unwrap();
        assert_eq!(l2.intervals.len(), 2);
        assert_eq!(
            l2.intervals[0],
            Interval {
                lo: int(0),
                hi: rat(3, 8)
            }
        );
        assert_eq!(
            l2.intervals[1],
            Interval {
                lo: rat(5, 8),
                hi: int(1)
            }
        );
        let l3 = tower.level(3).unwrap();
        assert_eq!(
            l3.intervals[0],
            Interval {
                lo: int(0),
                hi: rat(11, 64)
            }
        );
        assert_eq!(
            l3.intervals[1],
            Interval {
                lo: rat(13, 64),
                hi: rat(3, 8)
            }
        );
    }

    #[test]
    fn level_counts_and_ordering() {
        let tower = CurveTower::build(8);
        for k in 1..=8 {
            let level = tower.level(k).unwrap();
            assert_eq!(level.intervals.len(), 1usize << (k - 1));
            for w in level.intervals.windows(2) {
                assert!(w[0].hi < w[1].lo, "intervals must be disjoint increasing");
            }
        }
    }

    #[test]
    fn measures_follow_geometric_series() {
        let tower = CurveTower::build(12);
        for k in 1..=12u32 {
            let expected = rat(2, 3) + rat(1, 3) * pow_i(&rat(1, 4), k as i64 - 1);
            assert_eq!(tower.level_measure(k).unwrap(), expected);
        }
        assert_eq!(tower.level_measure(1).unwrap(), int(1));
        assert_eq!(tower.level_measure(2).unwrap(), rat(3, 4));
        assert!(limit_measure() >= rat(2, 3));
    }

    #[test]
    fn omega_recurrence_values() {
        let tower = CurveTower::build(4);
        let e = pow_i(&rat(1, 8), 6);
        assert_eq!(*tower.omega_unit(2, 1).unwrap(), int(0));
        assert_eq!(*tower.omega_unit(2, 2).unwrap(), -e.clone());
        // omega(3,4) = -(8^-6 + 8^-12)
        assert_eq!(
            *tower.omega_unit(3, 4).unwrap(),
            -(e.clone() + pow_i(&rat(1, 8), 12))
        );
        // all-left stays zero forever
        for k in 1..=4 {
            assert_eq!(*tower.omega_unit(k, 1).unwrap(), int(0));
        }
        assert!(tower.omega_unit(3, 5).is_err());
    }

    #[test]
    fn omega_closed_form_matches_recurrence() {
        let tower = CurveTower::build(7);
        for k in 1..=7u32 {
            for j in 0..(1usize << (k - 1)) {
                let mut expect = Scalar::zero();
                for l in 1..k as usize {
                    if (j >> (k as usize - 1 - l)) & 1 == 1 {
                        expect -= pow_i(&rat(1, 8), 6 * l as i64);
                    }
                }
                assert_eq!(*tower.omega_unit(k, j + 1).unwrap(), expect);
            }
        }
    }

    #[test]
    fn locate_reports_gaps() {
        let tower = CurveTower::build(3);
        assert_eq!(tower.locate(2, &rat(1, 4)).unwrap(), 0);
        assert_eq!(tower.locate(2, &rat(7, 8)).unwrap(), 1);
        let err = tower.locate(2, &rat(1, 2)).unwrap_err();
        match err {
            Error::OutsideCantorSet { gap_lo, gap_hi, .. } => {
                assert_eq!(gap_lo, "3/8");
                assert_eq!(gap_hi, "5/8");
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(tower.locate(2, &int(2)).is_err());
    }

    #[test]
    fn curve_points_match_stated_levels() {
        let tower = CurveTower::build(3);
        let p = MetricParams::default();
        let g = Group::F23;
        // level 1 is the axis curve
        let x = tower.curve_point(1, &rat(2, 5), g, &p).unwrap();
        assert_eq!(x.coords(), &[int(0), rat(2, 5), int(0), int(0), int(0)]);
        // level 2 at t = 3/4: fourth coordinate -eps3^-3 8^-6
        let x = tower.curve_point(2, &rat(3, 4), g, &p).unwrap();
        let expected = -p.eps3_inv_cubed() * pow_i(&rat(1, 8), 6);
        assert_eq!(*x.coord(3), expected);
        // level 3, fourth interval
        let t = tower.level(3).unwrap().intervals[3].midpoint();
        let x = tower.curve_point(3, &t, g, &p).unwrap();
        assert_eq!(
            *x.coord(3),
            tower.omega_unit(3, 4).unwrap() * p.eps3_inv_cubed()
        );
        // engel variant materializes in four coordinates
        let xe = tower.curve_point(2, &rat(3, 4), Group::Engel, &p).unwrap();
        assert_eq!(xe.coords().len(), 4);
        assert_eq!(*xe.coord(3), expected);
    }

    #[test]
    fn addresses_biject_with_intervals() {
        let tower = CurveTower::build(6);
        for k in 1..=6u32 {
            let n = 1usize << (k - 1);
            for j in 0..n {
                let prefix: Vec<Side> = (0..k as usize - 1)
                    .map(|l| {
                        if (j >> (k as usize - 2 - l)) & 1 == 1 {
                            Side::Right
                        } else {
                            Side::Left
                        }
                    })
                    .collect();
                let pt = CantorPoint::new(prefix, Side::Left);
                assert_eq!(pt.interval_index(k), j);
                // the value is consistent with every level of the address
                let v = pt.value(&tower).unwrap();
                for kk in 1..=k {
                    let idx = pt.interval_index(kk);
                    assert!(tower.level(kk).unwrap().intervals[idx].contains(&v));
                }
            }
        }
    }

    #[test]
    fn limit_values_at_constant_tails() {
        let tower = CurveTower::build(5);
        let p = MetricParams::default();
        // all-left address: gamma4 = 0 exactly
        let left = CantorPoint::new(vec![], Side::Left);
        assert_eq!(left.value(&tower).unwrap(), int(0));
        assert_eq!(left.gamma4_unit_limit(), int(0));
        // all-right address: t = 1, gamma4 = -sum 8^-6l = -1/(8^6 - 1)
        let right = CantorPoint::new(vec![], Side::Right);
        assert_eq!(right.value(&tower).unwrap(), int(1));
        assert_eq!(right.gamma4_unit_limit(), -rat(1, 262143));
        // truncation at level 3 keeps two digits and certifies the error
        let (pt, err) = gamma_limit(&right, 3, &tower, Group::F23, &p).unwrap();
        let expect_unit = -(pow_i(&rat(1, 8), 6) + pow_i(&rat(1, 8), 12));
        assert_eq!(*pt.coord(3), expect_unit * p.eps3_inv_cubed());
        let true_val = right.gamma4_unit_limit() * p.eps3_inv_cubed();
        assert!((pt.coord(3) - &true_val).abs() <= err);
    }

    #[test]
    fn ratio_bound_values() {
        assert_eq!(ratio_bound(2), rat(1, 8));
        // increases toward 1/7
        let mut prev = ratio_bound(2);
        for k in 3..=30 {
            let c = ratio_bound(k);
            assert!(c > prev && c < rat(1, 7));
            prev = c;
        }
    }

    #[test]
    fn verifier_passes_at_moderate_depth() {
        let tower = CurveTower::build(5);
        let p = MetricParams::default();
        for k in 2..=5 {
            let v = verify_iterate(&tower, k, Group::F23, &p).unwrap();
            assert!(v.pass, "level {k} failed: {:?}", v.failures);
            assert!(!v.refinement_margin.is_negative());
            assert!(!v.ratio_margin.is_negative());
            assert!(!v.decrease_margin.is_negative());
            assert_eq!(v.isometry_pairs_ok, v.endpoint_pairs);
            let ve = verify_iterate(&tower, k, Group::Engel, &p).unwrap();
            assert!(ve.pass);
        }
    }

    #[test]
    fn verifier_output_is_eps3_free() {
        // the reported margins cancel the eps3 dependence exactly
        let tower = CurveTower::build(4);
        let pa = MetricParams::default();
        let pb = MetricParams::with_eps(rat(1, 4), rat(2, 7)).unwrap();
        for k in 2..=4 {
            let va = verify_iterate(&tower, k, Group::F23, &pa).unwrap();
            let vb = verify_iterate(&tower, k, Group::F23, &pb).unwrap();
            assert_eq!(va.refinement_margin, vb.refinement_margin);
            assert_eq!(va.ratio_margin, vb.ratio_margin);
            assert_eq!(va.decrease_margin, vb.decrease_margin);
            assert_eq!(va.isometry_pairs_ok, vb.isometry_pairs_ok);
        }
    }

    #[test]
    fn monotone_gap_certified() {
        let tower = CurveTower::build(8);
        for k in 2..=8 {
            let m = monotone_gap_margin(&tower, k, 8).unwrap();
            assert!(!m.is_negative(), "limit gap margin negative at level {k}");
        }
    }
}

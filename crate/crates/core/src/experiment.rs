//! The experiment suite: intersection rigidity, reachability, transport to
//! arbitrary horizontal directions, the Engel variant, and difference-
//! quotient ladders, each emitting a reproducible report.
//!
//! Reports are reproducible from `(name, params)` alone: all randomness is
//! seeded, witnesses are collected in deterministic scan order, and map
//! fields serialize in key order. `wall_ms` is the one informational field
//! excluded from that contract.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::automorphism::rotation_to;
use crate::cone::{in_semigroup_closure, in_translated_constraint, semigroup_margins, ConeSpec};
use crate::curve::{plateau_point, CurveTower};
use crate::flow::{integrate, pansu_quotient_points, sample_cone_curve, SampleOptions};
use crate::group::{exp_c2, Group, GroupPoint};
use crate::metric::{box_norm, MetricParams};
use crate::scalar::{fmt_frac, int, pow_i, rat, to_f64, Scalar};
use crate::{Error, Result};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Witness {
    pub kind: String,
    pub detail: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    pub version: u32,
    pub params: BTreeMap<String, String>,
    pub pass: bool,
    pub counts: BTreeMap<String, u64>,
    pub witnesses: Vec<Witness>,
    pub wall_ms: u64,
}

impl ExperimentReport {
    fn new(name: &str) -> Self {
        ExperimentReport {
            name: name.to_string(),
            version: REPORT_VERSION,
            params: BTreeMap::new(),
            pass: true,
            counts: BTreeMap::new(),
            witnesses: Vec::new(),
            wall_ms: 0,
        }
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }

    fn count(&mut self, key: &str, value: u64) {
        self.counts.insert(key.to_string(), value);
    }

    fn witness(&mut self, kind: &str, detail: &[(&str, String)]) {
        const WITNESS_CAP: usize = 16;
        if self.witnesses.len() < WITNESS_CAP {
            self.witnesses.push(Witness {
                kind: kind.to_string(),
                detail: detail
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.clone()))
                    .collect(),
            });
        }
    }

    /// The report with timing removed; this is the part covered by the
    /// byte-for-byte determinism guarantee.
    pub fn without_wall_time(&self) -> Self {
        let mut r = self.clone();
        r.wall_ms = 0;
        r
    }
}

/// The level-`k` plateau samples `(t, unit, point)` at every interval
/// endpoint, increasing in `t`.
fn plateau_samples(
    tower: &CurveTower,
    k: u32,
    group: Group,
    p: &MetricParams,
) -> Result<Vec<(Scalar, usize, GroupPoint)>> {
    let units = tower.units_at(k)?;
    let samples = tower.endpoint_samples(k)?;
    Ok(samples
        .into_iter()
        .map(|(t, j)| {
            let pt = plateau_point(group, p, &t, &units[j]);
            (t, j, pt)
        })
        .collect())
}

/// Sixth power of the box distance between two plateau points; for points
/// `(0,t,0,omega,0)` this is `max(eps1^6 dt^6, d_unit^2)`, independent of
/// `eps3` because the cube root cancels the stored unit scale.
fn plateau_dist_pow6(eps1: &Scalar, t1: &Scalar, u1: &Scalar, t2: &Scalar, u2: &Scalar) -> Scalar {
    let dt6 = pow_i(eps1, 6) * pow_i(&(t2 - t1), 6);
    let du2 = pow_i(&(u2 - u1), 2);
    std::cmp::max(dt6, du2)
}

// ---------------------------------------------------------------------------
// Intersection certificate.
// ---------------------------------------------------------------------------

/// Exhaustively scans ordered endpoint pairs `(t0 < t)` in different
/// level-`k` intervals and certifies that no cone-directed flow leaving the
/// earlier curve point can reach the later one: the translated semigroup
/// constraint must fail for every such pair.
///
/// Same-interval pairs sit on a common plateau where the displacement lies
/// on the constraint boundary; they are excluded from the certificate set
/// and counted separately.
pub fn intersection_certificate(
    tower: &CurveTower,
    k: u32,
    group: Group,
    p: &MetricParams,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = ExperimentReport::new("intersection-certificate");
    report.param("depth", k);
    report.param("group", group);
    report.param("eps3", fmt_frac(p.eps3()));

    let samples = plateau_samples(tower, k, group, p)?;
    let mut checked = 0u64;
    let mut excluded = 0u64;
    let mut violations = 0u64;
    for a in 0..samples.len() {
        for b in (a + 1)..samples.len() {
            let (ta, ja, pa) = &samples[a];
            let (tb, jb, pb) = &samples[b];
            if ja == jb {
                excluded += 1;
                continue;
            }
            checked += 1;
            if in_translated_constraint(pa, pb)? {
                violations += 1;
                report.witness(
                    "reachable-pair",
                    &[("t0", fmt_frac(ta)), ("t", fmt_frac(tb))],
                );
            }
        }
    }
    report.count("pairs_checked", checked);
    report.count("pairs_excluded_same_plateau", excluded);
    report.count("violations", violations);
    report.pass = violations == 0;
    report.wall_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Monte Carlo companion.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct MonteCarloConfig {
    pub trials: u64,
    pub seed: u64,
    pub segments: usize,
    pub refine: usize,
    /// Box-norm approach tolerance.
    pub tol: Scalar,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig {
            trials: 100,
            seed: 0,
            segments: 12,
            refine: 3,
            tol: rat(1, 4096),
        }
    }
}

/// Advisory companion to the certificate: random full cone curves are
/// translated through a random curve point and the polyline samples are
/// matched against the whole curve point set at the given tolerance.
/// Approached parameters within mutual distance `2 tol` form one cluster;
/// more than one cluster per trial would be a separated double approach.
pub fn monte_carlo_intersections(
    tower: &CurveTower,
    k: u32,
    group: Group,
    p: &MetricParams,
    cone: &ConeSpec,
    cfg: &MonteCarloConfig,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = ExperimentReport::new("monte-carlo-intersections");
    report.param("depth", k);
    report.param("group", group);
    report.param("sigma", fmt_frac(cone.sigma()));
    report.param("trials", cfg.trials);
    report.param("seed", cfg.seed);
    report.param("segments", cfg.segments);
    report.param("refine", cfg.refine);
    report.param("tol", fmt_frac(&cfg.tol));

    let samples = plateau_samples(tower, k, group, p)?;
    let units = tower.units_at(k)?;
    let ends = tower.endpoint_samples(k)?;

    // half the minimum pairwise curve-point distance bounds the meaningful
    // tolerance range
    let mut min_pow6: Option<Scalar> = None;
    for a in 0..ends.len() {
        for b in (a + 1)..ends.len() {
            let (ta, ja) = &ends[a];
            let (tb, jb) = &ends[b];
            let d6 = plateau_dist_pow6(p.eps1(), ta, &units[*ja], tb, &units[*jb]);
            min_pow6 = Some(match min_pow6.take() {
                None => d6,
                Some(m) => std::cmp::min(m, d6),
            });
        }
    }
    let min_pow6 = min_pow6.unwrap_or_else(Scalar::zero);
    let tol6 = pow_i(&cfg.tol, 6);
    let chain6 = pow_i(&(int(2) * &cfg.tol), 6);
    let tolerance_dominated = chain6 >= min_pow6;
    report.param("tolerance_dominated", tolerance_dominated);

    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut max_raw = 0u64;
    let mut max_clusters = 0u64;
    for trial in 0..cfg.trials {
        let curve_seed = cfg.seed ^ (trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let ctrl = sample_cone_curve(cone, cfg.segments, curve_seed, &SampleOptions::default())?;
        let base = integrate(&ctrl, cfg.refine)?;
        // translate the flow through a random curve point at a random
        // anchor sample
        let anchor_curve = rng.gen_range(0..samples.len());
        let anchor_line = rng.gen_range(0..base.samples().len());
        let (_, _, through) = &samples[anchor_curve];
        let shift = through.mul(&base.samples()[anchor_line].1.inv())?;
        let line: Vec<GroupPoint> = base
            .samples()
            .iter()
            .map(|(_, q)| shift.mul(q))
            .collect::<Result<_>>()?;

        // parameters approached within tol (by index into `samples`);
        // the box distance is at least eps1 * |each first-layer coordinate
        // difference|, and curve points have first coordinate zero, so two
        // exact rational comparisons pre-filter almost every pair before a
        // full distance is evaluated
        let eps1_6 = pow_i(p.eps1(), 6);
        let near_plane: Vec<&GroupPoint> = line
            .iter()
            .filter(|q| &eps1_6 * pow_i(q.coord(0), 6) <= tol6)
            .collect();
        let mut approached: Vec<usize> = Vec::new();
        for (idx, (t, _, cp)) in samples.iter().enumerate() {
            let hit = near_plane.iter().any(|q| {
                if &eps1_6 * pow_i(&(t - q.coord(1)), 6) > tol6 {
                    return false;
                }
                let d = box_norm(&q.inv().mul(cp).expect("same group"), p);
                *d.pow6() <= tol6
            });
            if hit {
                approached.push(idx);
            }
        }
        let raw = approached.len() as u64;
        // chain into clusters by mutual curve distance <= 2 tol
        let mut clusters = 0u64;
        for (pos, &idx) in approached.iter().enumerate() {
            if pos == 0 {
                clusters = 1;
                continue;
            }
            let prev = approached[pos - 1];
            let (tp, jp) = &ends[prev];
            let (tc, jc) = &ends[idx];
            let d6 = plateau_dist_pow6(p.eps1(), tp, &units[*jp], tc, &units[*jc]);
            if d6 > chain6 {
                clusters += 1;
            }
        }
        if raw > max_raw {
            max_raw = raw;
        }
        if clusters > max_clusters {
            max_clusters = clusters;
            if clusters > 1 {
                report.witness(
                    "separated-approach",
                    &[
                        ("trial", trial.to_string()),
                        ("clusters", clusters.to_string()),
                    ],
                );
            }
        }
    }
    report.count("max_parameters_approached", max_raw);
    report.count("max_clusters", max_clusters);
    report.pass = tolerance_dominated || max_clusters <= 1;
    report.wall_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Reachability.
// ---------------------------------------------------------------------------

/// Flows seeded cone-directed controls from the origin and checks every
/// endpoint against the exact semigroup-closure polynomial of its group.
pub fn reachability_experiment(
    group: Group,
    sigma: &Scalar,
    segments: usize,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = ExperimentReport::new("reachability");
    report.param("group", group);
    report.param("sigma", fmt_frac(sigma));
    report.param("segments", segments);
    report.param("trials", trials);
    report.param("seed", seed);

    let cone = ConeSpec::axis_x2(group, sigma.clone())?;
    let mut violations = 0u64;
    let mut worst_margin: Option<Scalar> = None;
    for trial in 0..trials {
        let s = seed ^ (trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let ctrl = sample_cone_curve(&cone, segments, s, &SampleOptions::default())?;
        let end = integrate(&ctrl, 0)?.endpoint().clone();
        let margins = semigroup_margins(&end);
        let m = margins.into_iter().min().expect("margins are nonempty");
        if m.is_negative() {
            violations += 1;
            report.witness(
                "closure-violation",
                &[("seed", s.to_string()), ("endpoint", end.fmt_coords())],
            );
        }
        worst_margin = Some(match worst_margin.take() {
            None => m,
            Some(w) => std::cmp::min(w, m),
        });
    }
    report.count("violations", violations);
    if let Some(w) = worst_margin {
        report.param("worst_margin", to_f64(&w));
    }
    report.pass = violations == 0;
    report.wall_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Transport to an arbitrary horizontal direction.
// ---------------------------------------------------------------------------

/// Transports the level-`k` curve through the rotation automorphism taking
/// `X2` to the exact unit direction `(e1, e2)` and re-runs the rigidity
/// checks on the transported points:
///
/// (a) difference quotients of the transported curve land exactly on
///     `exp(e)` over plateau pairs, with exact horizontal part `(e1, e2)`
///     over all pairs;
/// (b) the intersection certificate conjugates exactly: pulling the
///     transported displacement back through the inverse automorphism
///     reproduces the original displacement, which must violate the
///     semigroup constraint;
/// (c) the automorphism preserves brackets and layers and is a group
///     homomorphism on seeded random pairs; its box-norm distortion is
///     sampled on the unit sphere (advisory).
pub fn transport_experiment(
    tower: &CurveTower,
    k: u32,
    group: Group,
    p: &MetricParams,
    e1: &Scalar,
    e2: &Scalar,
    seed: u64,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = ExperimentReport::new("transport");
    report.param("depth", k);
    report.param("group", group);
    report.param("direction", format!("{},{}", fmt_frac(e1), fmt_frac(e2)));
    report.param("seed", seed);

    let psi = rotation_to(group, e1, e2)?;
    let psi_inv = crate::automorphism::free_automorphism(
        [[e2.clone(), -e1.clone()], [e1.clone(), e2.clone()]],
        group,
    )?;

    let mut failures = 0u64;
    if !psi.preserves_brackets() || !psi.preserves_layers() {
        failures += 1;
        report.witness(
            "automorphism-invariant",
            &[("which", "bracket/layer".into())],
        );
    }

    // homomorphism and dilation compatibility on seeded random pairs
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let dim = group.dimension();
    let rand_point = |rng: &mut ChaCha12Rng| -> GroupPoint {
        let coords = (0..dim).map(|_| rat(rng.gen_range(-32..=32), 16)).collect();
        group.point(coords).expect("dimension is correct")
    };
    let mut hom_checked = 0u64;
    for _ in 0..100 {
        let x = rand_point(&mut rng);
        let y = rand_point(&mut rng);
        hom_checked += 1;
        let lhs = psi.apply_point(&x.mul(&y)?)?;
        let rhs = psi.apply_point(&x)?.mul(&psi.apply_point(&y)?)?;
        if lhs != rhs {
            failures += 1;
            report.witness(
                "homomorphism",
                &[("x", x.fmt_coords()), ("y", y.fmt_coords())],
            );
        }
        let lam = rat(rng.gen_range(1..=32), 8);
        if psi.apply_point(&x.dilate(&lam)?)? != psi.apply_point(&x)?.dilate(&lam)? {
            failures += 1;
            report.witness("dilation-commutation", &[("x", x.fmt_coords())]);
        }
        // round trip through the inverse
        if psi_inv.apply_point(&psi.apply_point(&x)?)? != x {
            failures += 1;
            report.witness("inverse-round-trip", &[("x", x.fmt_coords())]);
        }
    }
    report.count("homomorphism_pairs", hom_checked);

    // (a) difference quotients of the transported curve
    let samples = plateau_samples(tower, k, group, p)?;
    let transported: Vec<(Scalar, usize, GroupPoint)> = samples
        .iter()
        .map(|(t, j, pt)| Ok((t.clone(), *j, psi.apply_point(pt)?)))
        .collect::<Result<_>>()?;
    let target = exp_c2(&group.horizontal(e1.clone(), e2.clone()));
    let mut quotient_pairs = 0u64;
    for a in 0..transported.len() {
        for b in (a + 1)..transported.len() {
            let (ta, ja, pa) = &transported[a];
            let (tb, jb, pb) = &transported[b];
            let s = tb - ta;
            let q = pansu_quotient_points(pa, pb, &s)?;
            quotient_pairs += 1;
            if ja == jb {
                // plateau pairs: the quotient is exp(e) exactly
                if q != target {
                    failures += 1;
                    report.witness(
                        "plateau-quotient",
                        &[("t", fmt_frac(ta)), ("s", fmt_frac(tb))],
                    );
                }
            } else if q.coord(0) != e1 || q.coord(1) != e2 {
                // across plateaus the horizontal part is still exact
                failures += 1;
                report.witness(
                    "horizontal-part",
                    &[("t", fmt_frac(ta)), ("s", fmt_frac(tb))],
                );
            }
        }
    }
    report.count("quotient_pairs", quotient_pairs);

    // (b) conjugated certificate on transported pairs
    let mut certificate_pairs = 0u64;
    let mut cert_violations = 0u64;
    for a in 0..transported.len() {
        for b in (a + 1)..transported.len() {
            let (_, ja, pa) = &transported[a];
            let (_, jb, pb) = &transported[b];
            if ja == jb {
                continue;
            }
            certificate_pairs += 1;
            let disp = psi_inv.apply_point(&pa.inv().mul(pb)?)?;
            // conjugation consistency: this is the untransported displacement
            let (_, _, qa) = &samples[a];
            let (_, _, qb) = &samples[b];
            if disp != qa.inv().mul(qb)? {
                failures += 1;
                report.witness("conjugation", &[("pair", format!("{a},{b}"))]);
            }
            if in_semigroup_closure(&disp) {
                cert_violations += 1;
                report.witness("reachable-pair", &[("pair", format!("{a},{b}"))]);
            }
        }
    }
    report.count("certificate_pairs", certificate_pairs);
    report.count("certificate_violations", cert_violations);

    // (c) advisory distortion of the box norm on the unit sphere
    let mut max_ratio = 0.0f64;
    let mut min_ratio = f64::INFINITY;
    for _ in 0..200 {
        let x = rand_point(&mut rng);
        let n = box_norm(&x, p);
        if n.is_zero() {
            continue;
        }
        // rescale to the unit sphere via an exact dilation when the norm
        // is exactly rational, else measure the raw ratio (homogeneity
        // makes the ratio scale-invariant anyway)
        let y = psi.apply_point(&x)?;
        let ny = box_norm(&y, p);
        let ratio = (ny.approx() / n.approx()).max(0.0);
        if ratio > max_ratio {
            max_ratio = ratio;
        }
        if ratio < min_ratio {
            min_ratio = ratio;
        }
    }
    report.param("distortion_max", max_ratio);
    report.param("distortion_min", min_ratio);

    report.count("failures", failures);
    report.pass = failures == 0 && cert_violations == 0;
    report.wall_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Engel variant.
// ---------------------------------------------------------------------------

/// Rebuilds the curve in the Engel group and runs the full battery there:
/// per-level verification, reachability against the Engel closure
/// polynomial, the intersection certificate, and the rejection of
/// transport off the `X2` axis.
pub fn engel_experiment(
    tower: &CurveTower,
    k: u32,
    p: &MetricParams,
    seed: u64,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = ExperimentReport::new("engel");
    report.param("depth", k);
    report.param("seed", seed);

    let verify = crate::curve::verify_iterate(tower, k, Group::Engel, p)?;
    report.count("iterate_pairs", verify.endpoint_pairs);
    report.count("iterate_isometry_ok", verify.isometry_pairs_ok);
    let mut pass = verify.pass;
    for f in verify.failures.iter().take(8) {
        report.witness("iterate-check", &[("failure", f.clone())]);
    }

    let reach = reachability_experiment(Group::Engel, &rat(1, 2), 12, 60, seed)?;
    report.count("reach_violations", reach.counts["violations"]);
    pass &= reach.pass;

    let cert = intersection_certificate(tower, k, Group::Engel, p)?;
    report.count("certificate_pairs", cert.counts["pairs_checked"]);
    report.count("certificate_violations", cert.counts["violations"]);
    pass &= cert.pass;

    // the only transportable direction is the X2 axis
    let rejected = matches!(
        rotation_to(Group::Engel, &rat(3, 5), &rat(4, 5)),
        Err(Error::UnsupportedDirection(_))
    );
    let axis_ok = rotation_to(Group::Engel, &int(0), &int(-1)).is_ok();
    report.param("off_axis_transport_rejected", rejected);
    pass &= rejected && axis_ok;

    report.pass = pass;
    report.wall_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Difference-quotient ladder.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct LadderRung {
    /// The scale `2^-m`.
    pub step: String,
    /// Exact supremum of the fourth quotient coordinate (in `eps3^-3`
    /// units) over all difference quotients of the curve at offsets up to
    /// this scale.
    pub sup_q4_unit: String,
    /// Base parameter of the gap-facing endpoint pair attaining it.
    pub witness_t: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PansuLadder {
    pub entries: Vec<LadderRung>,
    /// The running suprema are non-increasing down the ladder.
    pub monotone: bool,
    /// Strictly smaller at the last rung than at the first.
    pub strictly_decays: bool,
    /// Horizontal part `(0, 1)` exact on every evaluated quotient.
    pub horizontal_exact: bool,
    /// Vertical coordinates other than the fourth vanish on every
    /// evaluated quotient.
    pub vertical_zero: bool,
    /// Rungs fine enough to fit inside one plateau, where the quotient is
    /// the constant `(0,1,0,...,0)` exactly.
    pub plateau_rungs: u32,
}

/// Evaluates the decay of the non-horizontal part of the curve's
/// difference quotients down the dyadic scale ladder `s = 2^-1 .. 2^-rungs`.
///
/// For each rung the exact supremum of `|q4|` over all quotients at
/// offsets `<= s` is computed; for a fixed interval pair the quotient is
/// maximal at the minimal offset, which is the gap between facing
/// endpoints, so the supremum is attained by an endpoint pair and is
/// exact. The suprema are non-increasing by construction and the ladder
/// certifies how fast they fall; no single base parameter admits the whole
/// dyadic ladder inside the level set (the exact window intersection runs
/// empty), so the per-scale supremum is the faithful pointwise-limit
/// surrogate.
pub fn pansu_ladder(
    tower: &CurveTower,
    k: u32,
    group: Group,
    p: &MetricParams,
    rungs: u32,
) -> Result<PansuLadder> {
    let level = tower.level(k)?;
    let units = tower.units_at(k)?;
    let ivs = &level.intervals;

    // per interval pair: the minimal offset (facing-endpoint gap) and the
    // plateau drop across it
    let mut gaps: Vec<(Scalar, Scalar, Scalar)> = Vec::new(); // (gap, |d unit|, left point)
    for i in 0..ivs.len() {
        for j in (i + 1)..ivs.len() {
            let g = &ivs[j].lo - &ivs[i].hi;
            let du = (&units[j] - &units[i]).abs();
            gaps.push((g, du, ivs[i].hi.clone()));
        }
    }

    let mut entries = Vec::new();
    let mut monotone = true;
    let mut horizontal_exact = true;
    let mut vertical_zero = true;
    let mut plateau_rungs = 0u32;
    let mut prev: Option<Scalar> = None;
    let mut first: Option<Scalar> = None;
    let mut last: Option<Scalar> = None;
    for m in 1..=rungs {
        let s = pow_i(&rat(1, 2), m as i64);
        let mut sup = Scalar::zero();
        let mut witness: Option<(Scalar, Scalar)> = None; // (t, offset)
        for (g, du, t) in &gaps {
            if *g <= s {
                let q = du / pow_i(g, 3);
                if q > sup {
                    sup = q;
                    witness = Some((t.clone(), g.clone()));
                }
            }
        }
        // evaluate the witnessing quotient through the group operations
        if let Some((t, g)) = &witness {
            let j0 = tower.locate(k, t)?;
            let t1 = t + g;
            let j1 = tower.locate(k, &t1)?;
            let a = plateau_point(group, p, t, &units[j0]);
            let b = plateau_point(group, p, &t1, &units[j1]);
            let q = pansu_quotient_points(&a, &b, g)?;
            if !q.coord(0).is_zero() || *q.coord(1) != int(1) {
                horizontal_exact = false;
            }
            if !q.coord(2).is_zero() || (group == Group::F23 && !q.coord(4).is_zero()) {
                vertical_zero = false;
            }
            // the evaluated vertical quotient matches the tabulated supremum
            debug_assert_eq!(q.coord(3).abs(), &sup * p.eps3_inv_cubed());
        }
        // rungs that fit inside a single plateau give the constant quotient
        if ivs.iter().any(|iv| iv.length() >= s) {
            plateau_rungs += 1;
            let iv = ivs
                .iter()
                .find(|iv| iv.length() >= s)
                .expect("just checked");
            let j = tower.locate(k, &iv.lo)?;
            let a = plateau_point(group, p, &iv.lo, &units[j]);
            let b = plateau_point(group, p, &(&iv.lo + &s), &units[j]);
            let q = pansu_quotient_points(&a, &b, &s)?;
            let mut expect = vec![Scalar::zero(); group.dimension()];
            expect[1] = int(1);
            if q.coords() != expect.as_slice() {
                horizontal_exact = false;
            }
        }
        if let Some(pv) = &prev {
            if sup > *pv {
                monotone = false;
            }
        }
        if first.is_none() {
            first = Some(sup.clone());
        }
        last = Some(sup.clone());
        prev = Some(sup.clone());
        entries.push(LadderRung {
            step: fmt_frac(&s),
            sup_q4_unit: fmt_frac(&sup),
            witness_t: witness.map(|(t, _)| fmt_frac(&t)).unwrap_or_default(),
        });
    }
    let strictly_decays = match (&first, &last) {
        (Some(f), Some(l)) => l < f,
        _ => false,
    };
    Ok(PansuLadder {
        entries,
        monotone,
        strictly_decays,
        horizontal_exact,
        vertical_zero,
        plateau_rungs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_p() -> MetricParams {
        MetricParams::default()
    }

    #[test]
    fn certificate_holds_at_small_depth() {
        let tower = CurveTower::build(5);
        let p = default_p();
        for g in [Group::F23, Group::Engel] {
            let r = intersection_certificate(&tower, 5, g, &p).unwrap();
            assert!(r.pass, "{g}: {:?}", r.witnesses);
            assert_eq!(r.counts["violations"], 0);
            assert_eq!(r.counts["pairs_excluded_same_plateau"], 16);
            // 32 endpoints, C(32,2) = 496 pairs, 16 within plateaus
            assert_eq!(r.counts["pairs_checked"], 480);
        }
    }

    #[test]
    fn plateau_distance_is_the_box_distance() {
        let tower = CurveTower::build(4);
        let p = default_p();
        let units = tower.units_at(4).unwrap();
        let ends = tower.endpoint_samples(4).unwrap();
        for a in (0..ends.len()).step_by(3) {
            for b in ((a + 1)..ends.len()).step_by(2) {
                let (ta, ja) = &ends[a];
                let (tb, jb) = &ends[b];
                let pa = plateau_point(Group::F23, &p, ta, &units[*ja]);
                let pb = plateau_point(Group::F23, &p, tb, &units[*jb]);
                let honest = box_norm(&pa.inv().mul(&pb).unwrap(), &p);
                let quick = plateau_dist_pow6(p.eps1(), ta, &units[*ja], tb, &units[*jb]);
                assert_eq!(*honest.pow6(), quick);
            }
        }
    }

    #[test]
    fn monte_carlo_agrees_with_certificate() {
        let tower = CurveTower::build(5);
        let p = default_p();
        let cone = ConeSpec::axis_x2(Group::F23, rat(1, 2)).unwrap();
        // half the minimum pairwise curve distance at depth 5 is 8^-4, so
        // 2^-13 stays below the tolerance-domination threshold
        let cfg = MonteCarloConfig {
            trials: 10,
            seed: 3,
            segments: 8,
            refine: 2,
            tol: rat(1, 8192),
        };
        let r = monte_carlo_intersections(&tower, 5, Group::F23, &p, &cone, &cfg).unwrap();
        assert!(r.pass, "{:?}", r.witnesses);
        assert!(r.counts["max_parameters_approached"] >= 1);
        assert!(r.counts["max_clusters"] <= 1);
        assert_eq!(r.params["tolerance_dominated"], "false");
    }

    #[test]
    fn monte_carlo_flags_degenerate_tolerance() {
        let tower = CurveTower::build(4);
        let p = default_p();
        let cone = ConeSpec::axis_x2(Group::F23, rat(1, 2)).unwrap();
        let cfg = MonteCarloConfig {
            trials: 3,
            seed: 1,
            segments: 5,
            refine: 1,
            tol: int(1),
        };
        let r = monte_carlo_intersections(&tower, 4, Group::F23, &p, &cone, &cfg).unwrap();
        assert_eq!(r.params["tolerance_dominated"], "true");
        assert!(r.counts["max_parameters_approached"] > 1);
    }

    #[test]
    fn reachability_zero_violations() {
        for g in [Group::F23, Group::Engel] {
            let r = reachability_experiment(g, &rat(1, 2), 8, 25, 11).unwrap();
            assert!(r.pass);
            assert_eq!(r.counts["violations"], 0);
        }
    }

    #[test]
    fn transport_axis_direction_reduces_to_certificate() {
        let tower = CurveTower::build(4);
        let p = default_p();
        let r = transport_experiment(&tower, 4, Group::F23, &p, &int(0), &int(1), 5).unwrap();
        assert!(r.pass, "{:?}", r.witnesses);
        assert_eq!(r.counts["certificate_violations"], 0);
        // the identity rotation is an exact isometry of the box norm
        assert_eq!(r.params["distortion_max"], "1");
        assert_eq!(r.params["distortion_min"], "1");
    }

    #[test]
    fn transport_pythagorean_directions() {
        let tower = CurveTower::build(4);
        let p = default_p();
        for (e1, e2) in [
            (rat(3, 5), rat(4, 5)),
            (int(0), int(-1)),
            (rat(5, 13), rat(12, 13)),
        ] {
            let r = transport_experiment(&tower, 4, Group::F23, &p, &e1, &e2, 5).unwrap();
            assert!(r.pass, "direction ({e1},{e2}): {:?}", r.witnesses);
        }
        // non-unit directions are rejected
        assert!(matches!(
            transport_experiment(&tower, 4, Group::F23, &p, &int(1), &int(1), 5),
            Err(Error::NotUnit)
        ));
    }

    #[test]
    fn engel_battery() {
        let tower = CurveTower::build(5);
        let p = default_p();
        let r = engel_experiment(&tower, 5, &p, 19).unwrap();
        assert!(r.pass, "{:?}", r.witnesses);
        assert_eq!(r.params["off_axis_transport_rejected"], "true");
    }

    #[test]
    fn ladder_is_exact_and_monotone() {
        let tower = CurveTower::build(6);
        let p = default_p();
        let ladder = pansu_ladder(&tower, 6, Group::F23, &p, 10).unwrap();
        assert!(ladder.horizontal_exact);
        assert!(ladder.vertical_zero);
        assert!(ladder.monotone, "ladder entries: {:?}", ladder.entries);
        assert!(ladder.strictly_decays);
        assert!(ladder.plateau_rungs > 0);
        assert_eq!(ladder.entries.len(), 10);
        // same in the Engel group
        let le = pansu_ladder(&tower, 6, Group::Engel, &p, 10).unwrap();
        assert!(le.monotone && le.horizontal_exact && le.vertical_zero);
    }

    #[test]
    fn reports_are_deterministic() {
        let tower = CurveTower::build(4);
        let p = default_p();
        let a = transport_experiment(&tower, 4, Group::F23, &p, &rat(3, 5), &rat(4, 5), 9).unwrap();
        let b = transport_experiment(&tower, 4, Group::F23, &p, &rat(3, 5), &rat(4, 5), 9).unwrap();
        assert_eq!(a.without_wall_time(), b.without_wall_time());
        let ja = serde_json::to_string(&a.without_wall_time()).unwrap();
        let jb = serde_json::to_string(&b.without_wall_time()).unwrap();
        assert_eq!(ja, jb);
    }
}

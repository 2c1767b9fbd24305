//! Left-invariant vector fields and exact horizontal flows.
//!
//! For a piecewise-constant horizontal control the flow is a finite product
//! of right translations by `exp(duration * h)`, so integration is exact;
//! no numeric ODE stepping enters any verification path. (A float
//! Runge-Kutta integrator exists in the test suite as an independent
//! cross-check.)

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::cone::{in_euclidean_cone, ConeSpec};
use crate::group::{exp_c2, AlgebraVector, Group, GroupPoint};
use crate::scalar::{int, rat, Scalar};
use crate::{Error, Result};

/// Columns of the first two left-invariant vector fields at `x`, in
/// second-type coordinates: row `i` holds `(X1(x)_i, X2(x)_i)`.
pub fn vf_matrix(x: &GroupPoint) -> Vec<[Scalar; 2]> {
    let c = x.coords();
    let x1 = &c[0];
    let half_x1_sq = x1 * x1 / int(2);
    match x.group() {
        Group::F23 => {
            let x2 = &c[1];
            vec![
                [int(1), int(0)],
                [int(0), int(1)],
                [int(0), -x1.clone()],
                [int(0), half_x1_sq],
                [int(0), x1 * x2],
            ]
        }
        Group::Engel => vec![
            [int(1), int(0)],
            [int(0), int(1)],
            [int(0), x1.clone()],
            [int(0), half_x1_sq],
        ],
    }
}

/// Exact time-`s` flow of the constant horizontal control `h` from `x`:
/// `x * exp(s h)`.
pub fn flow_constant(x: &GroupPoint, h: &AlgebraVector, s: &Scalar) -> Result<GroupPoint> {
    if h.group() != x.group() {
        return Err(Error::GroupMismatch {
            left: x.group(),
            right: h.group(),
        });
    }
    if !h.is_horizontal() {
        return Err(Error::NotHorizontal);
    }
    x.mul(&exp_c2(&h.scale(s)))
}

/// A piecewise-constant horizontal control: segment `i` applies `control`
/// for `duration > 0`, starting from `start` at time zero.
#[derive(Debug, Clone)]
pub struct ControlCurve {
    start: GroupPoint,
    segments: Vec<(Scalar, AlgebraVector)>,
}

impl ControlCurve {
    pub fn new(start: GroupPoint, segments: Vec<(Scalar, AlgebraVector)>) -> Result<ControlCurve> {
        for (dur, h) in &segments {
            if !dur.is_positive() {
                return Err(Error::InvalidParameter(
                    "segment durations must be positive".into(),
                ));
            }
            if h.group() != start.group() {
                return Err(Error::GroupMismatch {
                    left: start.group(),
                    right: h.group(),
                });
            }
            if !h.is_horizontal() {
                return Err(Error::NotHorizontal);
            }
        }
        Ok(ControlCurve { start, segments })
    }

    pub fn start(&self) -> &GroupPoint {
        &self.start
    }

    pub fn segments(&self) -> &[(Scalar, AlgebraVector)] {
        &self.segments
    }

    pub fn total_time(&self) -> Scalar {
        self.segments.iter().map(|(d, _)| d.clone()).sum()
    }

    /// Largest squared Euclidean control speed; the curve is Lipschitz with
    /// constant the square root of this.
    pub fn max_speed_sq(&self) -> Scalar {
        self.segments
            .iter()
            .map(|(_, h)| crate::group::horizontal_norm_sq(h))
            .max()
            .unwrap_or_else(Scalar::zero)
    }
}

/// Time-stamped samples along a flow; `t` strictly increasing.
#[derive(Debug, Clone)]
pub struct Polyline {
    samples: Vec<(Scalar, GroupPoint)>,
}

impl Polyline {
    pub fn samples(&self) -> &[(Scalar, GroupPoint)] {
        &self.samples
    }

    pub fn endpoint(&self) -> &GroupPoint {
        &self.samples.last().expect("polyline is never empty").1
    }
}

/// Exact integration of a control curve, sampling each segment at
/// `refine + 1` equal steps (so `refine = 0` samples only breakpoints).
pub fn integrate(c: &ControlCurve, refine: usize) -> Result<Polyline> {
    let mut t = Scalar::zero();
    let mut x = c.start.clone();
    let mut samples = vec![(t.clone(), x.clone())];
    let parts = int(refine as i64 + 1);
    for (dur, h) in &c.segments {
        let dt = dur / &parts;
        for _ in 0..=refine {
            x = flow_constant(&x, h, &dt)?;
            t += &dt;
            samples.push((t.clone(), x.clone()));
        }
    }
    Ok(Polyline { samples })
}

/// The dilated difference quotient `delta_{1/s}(a^-1 b)` for points
/// `a = f(t)`, `b = f(t + s)`; its limit as `s -> 0` is the intrinsic
/// derivative of the curve.
pub fn pansu_quotient_points(a: &GroupPoint, b: &GroupPoint, s: &Scalar) -> Result<GroupPoint> {
    if s.is_zero() {
        return Err(Error::InvalidParameter(
            "difference-quotient step must be nonzero".into(),
        ));
    }
    a.inv().mul(b)?.dilate(&s.recip())
}

/// Difference quotient of a curve given as a function of the parameter.
pub fn pansu_quotient<F>(f: F, t: &Scalar, s: &Scalar) -> Result<GroupPoint>
where
    F: Fn(&Scalar) -> Result<GroupPoint>,
{
    let a = f(t)?;
    let b = f(&(t + s))?;
    pansu_quotient_points(&a, &b, s)
}

/// Options for [`sample_cone_curve`]. Controls are drawn on the rational
/// grid of denominator `2^16` inside `[-speed, speed]^2` so every
/// downstream computation stays exact; durations on the grid of
/// denominator 256 in `(0, 1]`.
#[derive(Debug, Clone)]
pub struct SampleOptions {
    pub speed: Scalar,
    pub max_attempts: u32,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            speed: int(1),
            max_attempts: 1 << 20,
        }
    }
}

/// Draws a random piecewise-constant control curve from the origin whose
/// every segment control lies in the given Euclidean cone (rejection
/// sampling, reproducible by seed).
pub fn sample_cone_curve(
    cone: &ConeSpec,
    segments: usize,
    seed: u64,
    opts: &SampleOptions,
) -> Result<ControlCurve> {
    if segments == 0 {
        return Err(Error::InvalidParameter("need at least one segment".into()));
    }
    let group = cone.group();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let grid = 1i64 << 16;
    let mut segs = Vec::with_capacity(segments);
    let mut attempts = 0u32;
    while segs.len() < segments {
        attempts += 1;
        if attempts > opts.max_attempts {
            return Err(Error::InvalidParameter(
                "cone rejection sampling exceeded the attempt budget".into(),
            ));
        }
        let h1 = rat(rng.gen_range(-grid..=grid), grid) * &opts.speed;
        let h2 = rat(rng.gen_range(-grid..=grid), grid) * &opts.speed;
        let h = group.horizontal(h1, h2);
        if in_euclidean_cone(&h, cone)? {
            let dur = rat(rng.gen_range(1..=256), 256);
            segs.push((dur, h));
        }
    }
    ControlCurve::new(group.identity(), segs)
}

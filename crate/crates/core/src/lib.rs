//! Exact-arithmetic kernel for the two rank-2, step-3 Carnot groups (the
//! free group and the Engel group), together with the construction of a
//! strictly descending plateau curve over a fat Cantor set and the
//! verification experiments built around it.
//!
//! Everything that feeds a verdict is computed over arbitrary-precision
//! rationals: group products, box-norm comparisons (cross-powered to sixth
//! powers), semigroup membership polynomials, interval towers, and flow
//! endpoints. Floating point appears only in advisory report fields.
//!
//! All values are immutable plain data and every operation is a pure
//! function, so anything here can be called from any number of threads
//! without synchronization.
//!
//! Module map:
//!
//! * [`group`] — descriptors, points, BCH, coordinate conversions;
//! * [`automorphism`] — graded automorphisms from horizontal maps;
//! * [`metric`] — the smooth-box quasi-norm and subgroup distances;
//! * [`cone`] — Euclidean/metric/semigroup cone predicates;
//! * [`curve`] — the interval tower, plateau iterates, and their verifier;
//! * [`flow`] — horizontal flows, difference quotients, cone sampling;
//! * [`experiment`] — the rigidity experiments and report types.

pub mod automorphism;
pub mod cone;
pub mod curve;
pub mod experiment;
pub mod flow;
pub mod group;
pub mod interval;
pub mod metric;
pub mod poly;
pub mod ring;
pub mod scalar;

use group::Group;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("group mismatch: {left} vs {right}")]
    GroupMismatch { left: Group, right: Group },
    #[error("expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("dilation factor must be nonzero")]
    ZeroDilation,
    #[error("vector must be horizontal and nonzero")]
    NotHorizontal,
    #[error("horizontal map is singular")]
    SingularMap,
    #[error("axis must be an exact rational unit vector")]
    NotUnit,
    #[error("unsupported direction: {0}")]
    UnsupportedDirection(String),
    #[error("duplicate graph parameter")]
    DuplicateParameter,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("t = {t} lies outside the level-{level} set, in the gap ({gap_lo}, {gap_hi})")]
    OutsideCantorSet {
        level: u32,
        t: String,
        gap_lo: String,
        gap_hi: String,
    },
    #[error("level {requested} exceeds built depth {depth}")]
    DepthExceeded { requested: u32, depth: u32 },
    #[error("index out of range: {0}")]
    IndexRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use automorphism::{free_automorphism, rotation_to, AutomorphismSpec};
pub use cone::{
    assess_intrinsic_lipschitz, graph_cone_opening, in_euclidean_cone, in_metric_cone,
    in_metric_cone_with, in_semigroup_closure, in_translated_constraint, semigroup_margins,
    ConeDecision, ConeSpec,
};
pub use curve::{
    gamma_limit, limit_measure, monotone_gap_margin, plateau_point, ratio_bound,
    truncation_error_unit, verify_iterate, CantorLevel, CantorPoint, CurveTower, Side,
};
pub use experiment::{
    engel_experiment, intersection_certificate, monte_carlo_intersections, pansu_ladder,
    reachability_experiment, transport_experiment, ExperimentReport, MonteCarloConfig, PansuLadder,
};
pub use flow::{
    flow_constant, integrate, pansu_quotient, pansu_quotient_points, sample_cone_curve, vf_matrix,
    ControlCurve, Polyline, SampleOptions,
};
pub use group::{bch, exp_c2, lie_bracket, log_c2, AlgebraVector, GroupPoint};
pub use metric::{
    box_norm, calibrate, dist_to_subgroup, distance, CalibrationReport, MetricParams, NormValue,
};
pub use scalar::Scalar;

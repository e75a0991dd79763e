//! Wildfire front propagation driven by a Finsler metric whose indicatrix is
//! a Gielis superformula.
//!
//! Fire trajectories are integrated as geodesics of the metric (or, when the
//! parameters depend on time, as lightlike pregeodesics parametrized by
//! absolute time). Fronts are the positions of the still first-arriving rays
//! at a given time.

// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod field_expr;
pub mod front;
pub mod geodesic;
pub mod geometry;
pub mod metric;
pub mod output;
pub mod profile;
pub mod scenario;
mod series;

pub use field_expr::{eval_jet, parse_expr, Expr, ExprError, ScalarJet};
pub use front::{extract_front, prune_crossings, shoot_fan, Fan, Front, FrontError, FrontPoint};
pub use geodesic::{integrate_ray, rhs, GeodesicError, RayState, RayStatus, Trajectory};
pub use metric::{
    cartesian_tensor, christoffel, christoffel_from, gamma_contraction, polar_tensor,
    ChristoffelSet, MetricError, MetricJet, PolarTensor,
};
pub use profile::{
    check_strong_convexity, gielis_theta_jet, speed_jet, AnalyticProfile, AngularProfile,
    ConvexityReport, GielisParams, ParamField, ProfileError, SpeedJet, ThetaJet,
};
pub use scenario::{load_scenario, run_scenario, RunResult, Scenario, ScenarioError};

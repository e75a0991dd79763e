//! Fire trajectories as unit-speed geodesics (time-independent fields) or
//! time-parametrized lightlike pregeodesics (time-dependent fields).
//!
//! The state is `(x1, x2, θ)`; the speed along the ray is always `v(θ)`, so
//! the radial velocity component is never integrated.

use thiserror::Error;

use crate::metric::{cartesian_tensor, christoffel_from, gamma_contraction, MetricError};
use crate::profile::{speed_jet, wrap_angle, ParamField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeodesicError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("non-finite ray state at t = {t}")]
    NonFinite { t: f64 },
    #[error("invalid integration window: {0}")]
    InvalidWindow(String),
}

impl From<crate::profile::ProfileError> for GeodesicError {
    fn from(e: crate::profile::ProfileError) -> Self {
        GeodesicError::Metric(MetricError::Profile(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayState {
    pub x1: f64,
    pub x2: f64,
    /// Velocity angle in `[0, 2π)`.
    pub theta: f64,
}

impl RayState {
    pub fn new(x1: f64, x2: f64, theta: f64) -> Self {
        RayState {
            x1,
            x2,
            theta: wrap_angle(theta),
        }
    }

    pub fn position(&self) -> [f64; 2] {
        [self.x1, self.x2]
    }

    fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.theta.is_finite()
    }

    fn advance(&self, d: [f64; 3], h: f64) -> RayState {
        RayState::new(
            self.x1 + h * d[0],
            self.x2 + h * d[1],
            self.theta + h * d[2],
        )
    }
}

/// One RHS evaluation with the by-products the driver records.
#[derive(Debug, Clone, Copy)]
struct RhsEval {
    deriv: [f64; 3],
    v: f64,
    margin: f64,
}

fn rhs_eval(
    field: &ParamField,
    t: f64,
    s: &RayState,
    time_dependent: bool,
) -> Result<RhsEval, GeodesicError> {
    let jet = speed_jet(field, t, s.position(), s.theta)?;
    let mj = cartesian_tensor(&jet, s.theta, time_dependent)?;
    let cs = christoffel_from(&mj)?;
    let [g1, g2] = gamma_contraction(&cs, &mj, s.theta, jet.v, time_dependent);
    let (sn, c) = s.theta.sin_cos();
    let v = jet.v;
    let deriv = [v * c, v * sn, (sn * g1 - c * g2) / v];
    if deriv.iter().any(|d| !d.is_finite()) {
        return Err(GeodesicError::NonFinite { t });
    }
    Ok(RhsEval {
        deriv,
        v,
        margin: jet.theta().convexity_margin(),
    })
}

/// `(dx1/dt, dx2/dt, dθ/dt)` at `(t, s)`.
pub fn rhs(
    field: &ParamField,
    t: f64,
    s: &RayState,
    time_dependent: bool,
) -> Result<[f64; 3], GeodesicError> {
    rhs_eval(field, t, s, time_dependent).map(|e| e.deriv)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: RayState,
    /// Speed `v(θ)` at this sample.
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RayStatus {
    Complete,
    /// Integration stopped at the last stored sample.
    Truncated {
        at: f64,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Time from which the ray no longer arrives first. Set by crossing pruning.
    pub death_time: Option<f64>,
    pub status: RayStatus,
    /// Smallest convexity margin `2v̇² - v̈v + v²` seen along the ray's direction.
    pub min_margin: f64,
}

impl Trajectory {
    pub fn theta0(&self) -> f64 {
        self.samples[0].state.theta
    }

    pub fn start_time(&self) -> f64 {
        self.samples[0].t
    }

    pub fn end_time(&self) -> f64 {
        self.samples.last().map_or(f64::NAN, |s| s.t)
    }

    pub fn endpoint(&self) -> [f64; 2] {
        self.samples
            .last()
            .expect("trajectory has samples")
            .state
            .position()
    }

    pub fn is_complete(&self) -> bool {
        self.status == RayStatus::Complete
    }

    /// Alive at `t`: integrated up to `t` and not yet overtaken.
    pub fn alive_at(&self, t: f64) -> bool {
        t <= self.end_time() && self.death_time.is_none_or(|d| d > t)
    }

    /// Linear interpolation of the position at time `t`.
    pub fn position_at(&self, t: f64) -> Option<[f64; 2]> {
        let s = &self.samples;
        if s.is_empty() || t < s[0].t || t > self.end_time() {
            return None;
        }
        let i = s.partition_point(|x| x.t <= t);
        if i == s.len() {
            return Some(s[i - 1].state.position());
        }
        let (a, b) = (&s[i - 1], &s[i]);
        let u = (t - a.t) / (b.t - a.t);
        Some([
            a.state.x1 + u * (b.state.x1 - a.state.x1),
            a.state.x2 + u * (b.state.x2 - a.state.x2),
        ])
    }
}

fn rk4_step(
    field: &ParamField,
    t: f64,
    y: &RayState,
    k1: [f64; 3],
    h: f64,
    time_dependent: bool,
) -> Result<RayState, GeodesicError> {
    let k2 = rhs(field, t + 0.5 * h, &y.advance(k1, 0.5 * h), time_dependent)?;
    let k3 = rhs(field, t + 0.5 * h, &y.advance(k2, 0.5 * h), time_dependent)?;
    let k4 = rhs(field, t + h, &y.advance(k3, h), time_dependent)?;
    let mut d = [0.0; 3];
    for i in 0..3 {
        d[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    }
    let next = y.advance(d, h);
    if !next.is_finite() {
        return Err(GeodesicError::NonFinite { t: t + h });
    }
    Ok(next)
}

/// Classical RK4 from `t0` to `t_end` with step `dt`, plus a final partial
/// step when `dt` does not divide the window.
///
/// A failing RHS truncates the trajectory at the last valid sample and marks
/// it [`RayStatus::Truncated`]; only an invalid window is an error.
pub fn integrate_ray(
    field: &ParamField,
    s0: RayState,
    t0: f64,
    t_end: f64,
    dt: f64,
    time_dependent: bool,
) -> Result<Trajectory, GeodesicError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(GeodesicError::InvalidWindow(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !(t_end > t0) {
        return Err(GeodesicError::InvalidWindow(format!(
            "t_end ({t_end}) must exceed t0 ({t0})"
        )));
    }
    if !s0.is_finite() {
        return Err(GeodesicError::NonFinite { t: t0 });
    }
    let span = t_end - t0;
    let n_full = (span / dt * (1.0 + 1e-12)).floor() as usize;
    let remainder = span - n_full as f64 * dt;
    let n_steps = if remainder > 1e-9 * dt {
        n_full + 1
    } else {
        n_full
    };

    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut min_margin = f64::INFINITY;
    let mut state = RayState::new(s0.x1, s0.x2, s0.theta);
    let mut status = RayStatus::Complete;
    for k in 0..=n_steps {
        let t = if k == n_steps {
            t_end
        } else {
            t0 + k as f64 * dt
        };
        let eval = match rhs_eval(field, t, &state, time_dependent) {
            Ok(e) => e,
            Err(e) => {
                status = RayStatus::Truncated {
                    at: t,
                    reason: e.to_string(),
                };
                break;
            }
        };
        min_margin = min_margin.min(eval.margin);
        samples.push(Sample {
            t,
            state,
            v: eval.v,
        });
        if k == n_steps {
            break;
        }
        let h = if k + 1 == n_steps { t_end - t } else { dt };
        match rk4_step(field, t, &state, eval.deriv, h, time_dependent) {
            Ok(next) => state = next,
            Err(e) => {
                status = RayStatus::Truncated {
                    at: t,
                    reason: e.to_string(),
                };
                break;
            }
        }
    }
    if samples.is_empty() {
        // the ignition point itself is invalid; keep a single sample so the
        // ray still has a position
        samples.push(Sample {
            t: t0,
            state,
            v: f64::NAN,
        });
    }
    Ok(Trajectory {
        samples,
        death_time: None,
        status,
        min_margin,
    })
}

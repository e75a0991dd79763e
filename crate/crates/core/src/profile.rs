//! Superformula speed profiles and their derivative data.
//!
//! The fire speed in direction `θ` is
//!
//! ```text
//! v(θ) = λ (|cos(m(θ-φ)/4) / a|^n2 + |sin(m(θ-φ)/4) / b|^n3)^(-1/n1)
//! ```
//!
//! where `φ` (here `varphi`) rotates the figure and `λ` scales it. The
//! parameters may vary with position and time through a [`ParamField`];
//! [`speed_jet`] returns `v` with every derivative the metric needs.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::field_expr::{parse_expr, Expr, ExprError, ScalarJet, Var};
use crate::series::{Kink, Series};

/// Exponents that keep the superformula a strongly convex double
/// semi-ellipse for every `a, b, λ, φ`.
pub const BASE_M: f64 = 2.0;
pub const BASE_N1: f64 = 2.0;
pub const BASE_N2: f64 = 3.0;
pub const BASE_N3: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("invalid superformula parameter: {0}")]
    InvalidParams(String),
    #[error(
        "profile derivative of order {order} undefined at a vanishing base (exponent {exponent})"
    )]
    Kink { exponent: f64, order: usize },
    #[error("non-finite profile value at theta = {theta}")]
    NonFinite { theta: f64 },
    #[error("field `{name}`: {source}")]
    Field {
        name: &'static str,
        #[source]
        source: ExprError,
    },
}

impl From<Kink> for ProfileError {
    fn from(k: Kink) -> Self {
        ProfileError::Kink {
            exponent: k.exponent,
            order: k.order,
        }
    }
}

/// Superformula parameters at a single `(t, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GielisParams {
    pub a: f64,
    pub b: f64,
    pub m: f64,
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
    pub lambda: f64,
    pub varphi: f64,
}

impl GielisParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: f64,
        b: f64,
        m: f64,
        n1: f64,
        n2: f64,
        n3: f64,
        lambda: f64,
        varphi: f64,
    ) -> Result<Self, ProfileError> {
        let all = [a, b, m, n1, n2, n3, lambda, varphi];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(ProfileError::InvalidParams(format!(
                "non-finite value in {all:?}"
            )));
        }
        if a == 0.0 {
            return Err(ProfileError::InvalidParams("a must be nonzero".into()));
        }
        if b == 0.0 {
            return Err(ProfileError::InvalidParams("b must be nonzero".into()));
        }
        if n1 == 0.0 {
            return Err(ProfileError::InvalidParams("n1 must be nonzero".into()));
        }
        if lambda <= 0.0 {
            return Err(ProfileError::InvalidParams(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(GielisParams {
            a,
            b,
            m,
            n1,
            n2,
            n3,
            lambda,
            varphi: wrap_angle(varphi),
        })
    }

    /// Base exponents `m = 2, n1 = 2, n2 = 3, n3 = 2`.
    pub fn base(a: f64, b: f64, lambda: f64, varphi: f64) -> Result<Self, ProfileError> {
        Self::new(a, b, BASE_M, BASE_N1, BASE_N2, BASE_N3, lambda, varphi)
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// `v` and its first two θ-derivatives at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaJet {
    pub v: f64,
    pub v_th: f64,
    pub v_thth: f64,
}

impl ThetaJet {
    /// `2v̇² - v̈v + v²`; positive exactly where the indicatrix is strongly convex.
    pub fn convexity_margin(&self) -> f64 {
        2.0 * self.v_th * self.v_th - self.v_thth * self.v + self.v * self.v
    }

    /// `ü + u` for `u = 1/v`. Same sign as [`Self::convexity_margin`].
    pub fn reciprocal_margin(&self) -> f64 {
        let (v, v1, v2) = (self.v, self.v_th, self.v_thth);
        let u = 1.0 / v;
        let u_thth = -v2 / (v * v) + 2.0 * v1 * v1 / (v * v * v);
        u_thth + u
    }
}

/// Anything that yields a polar speed profile `θ ↦ v(θ)`.
pub trait AngularProfile {
    fn theta_jet(&self, theta: f64) -> Result<ThetaJet, ProfileError>;
}

impl AngularProfile for GielisParams {
    fn theta_jet(&self, theta: f64) -> Result<ThetaJet, ProfileError> {
        gielis_theta_jet(self, theta)
    }
}

/// Closed-form profile supplied directly as `θ ↦ (v, v̇, v̈)`.
///
/// Used as an oracle for the metric and the integrator, independent of the
/// superformula.
pub struct AnalyticProfile {
    f: Box<dyn Fn(f64) -> (f64, f64, f64) + Send + Sync>,
}

impl AnalyticProfile {
    pub fn new(f: impl Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static) -> Self {
        AnalyticProfile { f: Box::new(f) }
    }

    pub fn circle(radius: f64) -> Self {
        Self::new(move |_| (radius, 0.0, 0.0))
    }

    /// Axis-aligned ellipse with semi-axes `a` (along x1) and `b`.
    pub fn ellipse(a: f64, b: f64) -> Self {
        Self::new(move |th| {
            let (s, c) = th.sin_cos();
            let q = b * b * c * c + a * a * s * s;
            let dq = (a * a - b * b) * (2.0 * th).sin();
            let ddq = 2.0 * (a * a - b * b) * (2.0 * th).cos();
            let ab = a * b;
            let v = ab / q.sqrt();
            let v1 = -0.5 * ab * q.powf(-1.5) * dq;
            let v2 = ab * (0.75 * q.powf(-2.5) * dq * dq - 0.5 * q.powf(-1.5) * ddq);
            (v, v1, v2)
        })
    }
}

impl AngularProfile for AnalyticProfile {
    fn theta_jet(&self, theta: f64) -> Result<ThetaJet, ProfileError> {
        let (v, v_th, v_thth) = (self.f)(theta);
        if !(v.is_finite() && v_th.is_finite() && v_thth.is_finite()) || v <= 0.0 {
            return Err(ProfileError::NonFinite { theta });
        }
        Ok(ThetaJet { v, v_th, v_thth })
    }
}

/// θ-series of `v`, `∂v/∂a` and `∂v/∂b`.
struct Sensitivities {
    v: Series,
    dv_da: Series,
    dv_db: Series,
}

fn sensitivities(
    p: &GielisParams,
    theta: f64,
    order: usize,
) -> Result<Sensitivities, ProfileError> {
    let k = p.m / 4.0;
    let psi = Series::linear(k * (theta - p.varphi), k);
    let cos_term = psi.cos().abs_pow(p.n2, order)?.scale(p.a.abs().powf(-p.n2));
    let sin_term = psi.sin().abs_pow(p.n3, order)?.scale(p.b.abs().powf(-p.n3));
    let sum = cos_term + sin_term;
    if !(sum.value() > 0.0) || !sum.value().is_finite() {
        return Err(ProfileError::NonFinite { theta });
    }
    let v = sum.powf(-1.0 / p.n1).scale(p.lambda);
    // ∂/∂a |c/a|^n2 = -n2 |c/a|^n2 / a, then chain through S^(-1/n1)
    let v_over_sum = v * sum.recip();
    let dv_da = (v_over_sum * cos_term).scale(p.n2 / (p.n1 * p.a));
    let dv_db = (v_over_sum * sin_term).scale(p.n3 / (p.n1 * p.b));
    if v.0
        .iter()
        .chain(&dv_da.0)
        .chain(&dv_db.0)
        .any(|x| !x.is_finite())
        || v.value() <= 0.0
    {
        return Err(ProfileError::NonFinite { theta });
    }
    Ok(Sensitivities { v, dv_da, dv_db })
}

/// `v`, `v̇`, `v̈` of the superformula at `theta`.
pub fn gielis_theta_jet(params: &GielisParams, theta: f64) -> Result<ThetaJet, ProfileError> {
    let s = sensitivities(params, theta, 2)?;
    let [v, v_th, v_thth, _] = s.v.0;
    Ok(ThetaJet { v, v_th, v_thth })
}

/// Parameter fields in `(t, x1, x2)` with constant exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamField {
    pub a: Expr,
    pub b: Expr,
    pub lambda: Expr,
    pub varphi: Expr,
    pub m: f64,
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
}

impl ParamField {
    /// Field with base exponents built from expression strings.
    pub fn parse(a: &str, b: &str, lambda: &str, varphi: &str) -> Result<Self, ProfileError> {
        let p = |name: &'static str, s: &str| {
            parse_expr(s).map_err(|source| ProfileError::Field { name, source })
        };
        Ok(ParamField {
            a: p("a", a)?,
            b: p("b", b)?,
            lambda: p("lambda", lambda)?,
            varphi: p("varphi", varphi)?,
            m: BASE_M,
            n1: BASE_N1,
            n2: BASE_N2,
            n3: BASE_N3,
        })
    }

    pub fn constant(params: &GielisParams) -> Self {
        ParamField {
            a: Expr::Const(params.a),
            b: Expr::Const(params.b),
            lambda: Expr::Const(params.lambda),
            varphi: Expr::Const(params.varphi),
            m: params.m,
            n1: params.n1,
            n2: params.n2,
            n3: params.n3,
        }
    }

    fn exprs(&self) -> [(&'static str, &Expr); 4] {
        [
            ("a", &self.a),
            ("b", &self.b),
            ("lambda", &self.lambda),
            ("varphi", &self.varphi),
        ]
    }

    /// True when any parameter expression mentions `t`.
    pub fn depends_on_time(&self) -> bool {
        self.exprs().iter().any(|(_, e)| e.mentions(Var::T))
    }

    /// The same field with `t` frozen to `t0`.
    pub fn frozen_at(&self, t0: f64) -> Self {
        ParamField {
            a: self.a.substitute(Var::T, t0),
            b: self.b.substitute(Var::T, t0),
            lambda: self.lambda.substitute(Var::T, t0),
            varphi: self.varphi.substitute(Var::T, t0),
            ..self.clone()
        }
    }

    pub fn params_at(&self, t: f64, p: [f64; 2]) -> Result<GielisParams, ProfileError> {
        let [a, b, lambda, varphi] = self.exprs().map(|(_, e)| e.eval(t, p[0], p[1]));
        GielisParams::new(a, b, self.m, self.n1, self.n2, self.n3, lambda, varphi)
    }

    fn jets_at(&self, t: f64, p: [f64; 2]) -> Result<[ScalarJet; 4], ProfileError> {
        let mut out = [ScalarJet::default(); 4];
        for (slot, (name, e)) in out.iter_mut().zip(self.exprs()) {
            *slot = e
                .eval_jet(t, p[0], p[1])
                .map_err(|source| ProfileError::Field { name, source })?;
        }
        Ok(out)
    }
}

/// `v` with its θ, spatial, temporal and mixed derivatives.
///
/// The gradient arrays are ordered `[∂/∂x1, ∂/∂x2, ∂/∂t]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedJet {
    pub v: f64,
    pub v_th: f64,
    pub v_thth: f64,
    pub grad_v: [f64; 3],
    pub grad_v_th: [f64; 3],
    pub grad_v_thth: [f64; 3],
}

impl SpeedJet {
    /// A jet with no spatial or temporal variation.
    pub fn from_theta(j: ThetaJet) -> Self {
        SpeedJet {
            v: j.v,
            v_th: j.v_th,
            v_thth: j.v_thth,
            grad_v: [0.0; 3],
            grad_v_th: [0.0; 3],
            grad_v_thth: [0.0; 3],
        }
    }

    pub fn theta(&self) -> ThetaJet {
        ThetaJet {
            v: self.v,
            v_th: self.v_th,
            v_thth: self.v_thth,
        }
    }
}

pub fn speed_jet(
    field: &ParamField,
    t: f64,
    p: [f64; 2],
    theta: f64,
) -> Result<SpeedJet, ProfileError> {
    let [a, b, lambda, varphi] = field.jets_at(t, p)?;
    let params = GielisParams::new(
        a.value,
        b.value,
        field.m,
        field.n1,
        field.n2,
        field.n3,
        lambda.value,
        varphi.value,
    )?;
    let dvarphi = varphi.grad();
    // ∂/∂φ = -∂/∂θ, so a moving φ needs one extra θ-derivative
    let order = if dvarphi.iter().any(|d| *d != 0.0) {
        3
    } else {
        2
    };
    let s = sensitivities(&params, theta, order)?;

    let (da, db, dl) = (a.grad(), b.grad(), lambda.grad());
    let row = |k: usize| -> [f64; 3] {
        let mut g = [0.0; 3];
        for (j, gj) in g.iter_mut().enumerate() {
            *gj = s.dv_da.0[k] * da[j] + s.dv_db.0[k] * db[j] + s.v.0[k] / params.lambda * dl[j]
                - s.v.0[k + 1] * dvarphi[j];
        }
        g
    };
    let jet = SpeedJet {
        v: s.v.0[0],
        v_th: s.v.0[1],
        v_thth: s.v.0[2],
        grad_v: row(0),
        grad_v_th: row(1),
        grad_v_thth: row(2),
    };
    let finite = [jet.grad_v, jet.grad_v_th, jet.grad_v_thth]
        .iter()
        .flatten()
        .all(|x| x.is_finite());
    if !finite {
        return Err(ProfileError::NonFinite { theta });
    }
    Ok(jet)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityReport {
    pub min_margin: f64,
    pub argmin_theta: f64,
    pub grid_size: usize,
    pub passed: bool,
}

/// Minimum of `2v̇² - v̈v + v²` over `grid_size` uniform angles in `[0, 2π)`.
pub fn check_strong_convexity(
    profile: &dyn AngularProfile,
    grid_size: usize,
) -> Result<ConvexityReport, ProfileError> {
    if grid_size < 64 {
        return Err(ProfileError::InvalidParams(format!(
            "convexity grid needs at least 64 nodes, got {grid_size}"
        )));
    }
    let mut min_margin = f64::INFINITY;
    let mut argmin_theta = 0.0;
    for k in 0..grid_size {
        let theta = TAU * k as f64 / grid_size as f64;
        let margin = profile.theta_jet(theta)?.convexity_margin();
        if margin < min_margin {
            min_margin = margin;
            argmin_theta = theta;
        }
    }
    Ok(ConvexityReport {
        min_margin,
        argmin_theta,
        grid_size,
        passed: min_margin > 0.0,
    })
}

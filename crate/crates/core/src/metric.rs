//! Fundamental tensor of `F(w) = |w| / v(arg w)` and formal Christoffel symbols.
//!
//! Velocities are kept in polar form `(r, θ)` while positions stay
//! Cartesian. The Cartesian components of `g` only depend on `θ`, so every
//! quantity here is evaluated at a direction, never at a particular `r`.

use thiserror::Error;

use crate::profile::{speed_jet, ParamField, ProfileError, SpeedJet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("degenerate fundamental tensor (det = {det:e}); profile is not strongly convex here")]
    Degenerate { det: f64 },
    #[error("non-finite metric entry")]
    NonFinite,
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// `g` in the polar frame `(∂_r, ∂_θ)` at `w = (r, θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarTensor {
    pub g_rr: f64,
    pub g_rtheta: f64,
    pub g_thetatheta: f64,
}

pub fn polar_tensor(
    v: f64,
    v_th: f64,
    v_thth: f64,
    r: f64,
    _theta: f64,
) -> Result<PolarTensor, MetricError> {
    if !(v > 0.0 && r > 0.0) || !v_th.is_finite() || !v_thth.is_finite() {
        return Err(MetricError::NonFinite);
    }
    let v2 = v * v;
    Ok(PolarTensor {
        g_rr: 1.0 / v2,
        g_rtheta: -r * v_th / (v2 * v),
        g_thetatheta: r * r / v2 * (3.0 * v_th * v_th / v2 - v_thth / v + 1.0),
    })
}

/// Symmetric 2x2 entries `[s11, s12, s22]`.
pub type Sym2 = [f64; 3];

/// Cartesian `g_ij` with its derivative blocks and inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricJet {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub dgdx1: Sym2,
    pub dgdx2: Sym2,
    pub dgdt: Sym2,
    /// `g11 g22 - g12²`
    pub det: f64,
    /// `[g^11, g^12, g^22]`
    pub inv: Sym2,
}

impl MetricJet {
    pub fn g(&self) -> Sym2 {
        [self.g11, self.g12, self.g22]
    }

    /// `g(w, w)` for Cartesian `w`.
    pub fn quadratic(&self, w: [f64; 2]) -> f64 {
        self.g11 * w[0] * w[0] + 2.0 * self.g12 * w[0] * w[1] + self.g22 * w[1] * w[1]
    }
}

pub fn cartesian_tensor(
    jet: &SpeedJet,
    theta: f64,
    time_dependent: bool,
) -> Result<MetricJet, MetricError> {
    let v = jet.v;
    if !(v > 0.0) {
        return Err(MetricError::NonFinite);
    }
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (2.0 * s * c, c * c - s * s);
    let (f1, f2) = (s * s, c * c);
    let iv2 = 1.0 / (v * v);

    // φ = v̇/v, ϕ = v̈/v
    let phi = jet.v_th / v;
    let ddphi = jet.v_thth / v;
    let h = 3.0 * phi * phi - ddphi;

    let g12 = iv2 * (-phi * c2 - 0.5 * s2 * h);
    let g11 = iv2 * (1.0 + s2 * phi + f1 * h);
    let g22 = iv2 * (1.0 - s2 * phi + f2 * h);

    let block = |q: usize| -> Sym2 {
        let vq = jet.grad_v[q];
        let phi_q = (jet.grad_v_th[q] * v - jet.v_th * vq) * iv2;
        let ddphi_q = (jet.grad_v_thth[q] * v - jet.v_thth * vq) * iv2;
        let h_q = 6.0 * phi * phi_q - ddphi_q;
        let k = -2.0 * vq / v;
        [
            k * g11 + iv2 * (s2 * phi_q + f1 * h_q),
            k * g12 + iv2 * (-phi_q * c2 - 0.5 * s2 * h_q),
            k * g22 + iv2 * (-s2 * phi_q + f2 * h_q),
        ]
    };

    let det = g11 * g22 - g12 * g12;
    let mj = MetricJet {
        g11,
        g12,
        g22,
        dgdx1: block(0),
        dgdx2: block(1),
        dgdt: if time_dependent { block(2) } else { [0.0; 3] },
        det,
        inv: [g22 / det, -g12 / det, g11 / det],
    };
    let finite = mj
        .g()
        .iter()
        .chain(&mj.dgdx1)
        .chain(&mj.dgdx2)
        .chain(&mj.dgdt)
        .chain(&mj.inv)
        .all(|x| x.is_finite());
    if !(det > 0.0) {
        return Err(MetricError::Degenerate { det });
    }
    if !finite {
        return Err(MetricError::NonFinite);
    }
    Ok(mj)
}

/// Formal Christoffel symbols `γ^k_ij`, lower indices symmetric.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChristoffelSet {
    pub gamma1_11: f64,
    pub gamma1_12: f64,
    pub gamma1_22: f64,
    pub gamma2_11: f64,
    pub gamma2_12: f64,
    pub gamma2_22: f64,
}

impl ChristoffelSet {
    /// `γ^k_ij` with zero-based indices.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        match (k, i.min(j), i.max(j)) {
            (0, 0, 0) => self.gamma1_11,
            (0, 0, 1) => self.gamma1_12,
            (0, 1, 1) => self.gamma1_22,
            (1, 0, 0) => self.gamma2_11,
            (1, 0, 1) => self.gamma2_12,
            (1, 1, 1) => self.gamma2_22,
            _ => panic!("index out of range: ({k}, {i}, {j})"),
        }
    }
}

/// Christoffel symbols from the metric and its spatial derivative blocks.
pub fn christoffel_from(mj: &MetricJet) -> Result<ChristoffelSet, MetricError> {
    if !(mj.det > 0.0) {
        return Err(MetricError::Degenerate { det: mj.det });
    }
    let [d1_11, d1_12, d1_22] = mj.dgdx1;
    let [d2_11, d2_12, d2_22] = mj.dgdx2;
    let (g11, g12, g22) = (mj.g11, mj.g12, mj.g22);
    let k = 0.5 / mj.det;
    let p1 = 2.0 * d1_12 - d2_11;
    let p2 = 2.0 * d2_12 - d1_22;
    Ok(ChristoffelSet {
        gamma1_11: k * (g22 * d1_11 - g12 * p1),
        gamma1_12: k * (g22 * d2_11 - g12 * d1_22),
        gamma1_22: k * (g22 * p2 - g12 * d2_22),
        gamma2_22: k * (-g12 * p2 + g11 * d2_22),
        gamma2_12: k * (-g12 * d2_11 + g11 * d1_22),
        gamma2_11: k * (-g12 * d1_11 + g11 * p1),
    })
}

/// Symbols and metric of `field` at `(t, p)` in direction `theta`.
pub fn christoffel(
    field: &ParamField,
    t: f64,
    p: [f64; 2],
    theta: f64,
    time_dependent: bool,
) -> Result<(ChristoffelSet, MetricJet), MetricError> {
    let jet = speed_jet(field, t, p, theta)?;
    let mj = cartesian_tensor(&jet, theta, time_dependent)?;
    Ok((christoffel_from(&mj)?, mj))
}

/// `Γ^k`, the acceleration terms of the geodesic (or lightlike
/// pregeodesic) equation for the unit velocity `v (cos θ, sin θ)`.
pub fn gamma_contraction(
    cs: &ChristoffelSet,
    mj: &MetricJet,
    theta: f64,
    v: f64,
    time_dependent: bool,
) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    let (cc, cs2, ss) = (c * c, 2.0 * c * s, s * s);
    let q1 = cc * cs.gamma1_11 + cs2 * cs.gamma1_12 + ss * cs.gamma1_22;
    let q2 = cc * cs.gamma2_11 + cs2 * cs.gamma2_12 + ss * cs.gamma2_22;
    let v2 = v * v;
    let mut out = [v2 * q1, v2 * q2];
    if time_dependent {
        let [t11, t12, t22] = mj.dgdt;
        let tq = cc * t11 + cs2 * t12 + ss * t22;
        // c_i ∂_t g_ij for j = 1, 2
        let w1 = c * t11 + s * t12;
        let w2 = c * t12 + s * t22;
        let [i11, i12, i22] = mj.inv;
        out[0] += 0.5 * v * c * v2 * tq + v * (i11 * w1 + i12 * w2);
        out[1] += 0.5 * v * s * v2 * tq + v * (i12 * w1 + i22 * w2);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{AnalyticProfile, AngularProfile, GielisParams};

    #[test]
    fn polar_examples() {
        let p = polar_tensor(1.0, 0.0, 0.0, 2.0, 0.3).unwrap();
        assert_eq!((p.g_rr, p.g_rtheta, p.g_thetatheta), (1.0, 0.0, 4.0));

        let (v, v1, v2) = (1.7, 0.4, -0.9);
        let p = polar_tensor(v, v1, v2, v, 0.0).unwrap();
        assert!((p.g_rr - 1.0 / (v * v)).abs() < 1e-15);
        assert!((p.g_rtheta + v1 / (v * v)).abs() < 1e-15);
        assert!((p.g_thetatheta - (3.0 * v1 * v1 / (v * v) - v2 / v + 1.0)).abs() < 1e-14);
        // tangent to the indicatrix
        let q = v1 * v1 * p.g_rr + 2.0 * v1 * p.g_rtheta + p.g_thetatheta;
        assert!((q - (2.0 * v1 * v1 / (v * v) - v2 / v + 1.0)).abs() < 1e-14);

        assert!(polar_tensor(0.0, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(polar_tensor(1.0, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn circle_metric() {
        let lambda = 2.5;
        let jet = SpeedJet::from_theta(AnalyticProfile::circle(lambda).theta_jet(0.4).unwrap());
        let mj = cartesian_tensor(&jet, 0.4, true).unwrap();
        let d = 1.0 / (lambda * lambda);
        assert!((mj.g11 - d).abs() < 1e-15 && mj.g12.abs() < 1e-15 && (mj.g22 - d).abs() < 1e-15);
        assert_eq!([mj.dgdx1, mj.dgdx2, mj.dgdt], [[0.0; 3]; 3]);
        let cs = christoffel_from(&mj).unwrap();
        assert_eq!(cs, ChristoffelSet::default());
        assert_eq!(gamma_contraction(&cs, &mj, 0.4, lambda, true), [0.0, 0.0]);
    }

    #[test]
    fn ellipse_at_zero() {
        let jet = SpeedJet::from_theta(crate::profile::ThetaJet {
            v: 2.0,
            v_th: 0.0,
            v_thth: -6.0,
        });
        let mj = cartesian_tensor(&jet, 0.0, false).unwrap();
        assert!((mj.g11 - 0.25).abs() < 1e-15);
        assert!(mj.g12.abs() < 1e-15);
        assert!((mj.g22 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_and_unit_norm_on_indicatrix() {
        let p = GielisParams::base(3.0, 1.0, 1.3, 0.4).unwrap();
        for k in 0..40 {
            let th = 0.157 * k as f64;
            let j = p.theta_jet(th).unwrap();
            let mj = cartesian_tensor(&SpeedJet::from_theta(j), th, false).unwrap();
            let [i11, i12, i22] = mj.inv;
            assert!((mj.g11 * i11 + mj.g12 * i12 - 1.0).abs() < 1e-12);
            assert!((mj.g11 * i12 + mj.g12 * i22).abs() < 1e-12);
            assert!((mj.g12 * i12 + mj.g22 * i22 - 1.0).abs() < 1e-12);
            let w = [j.v * th.cos(), j.v * th.sin()];
            assert!((mj.quadratic(w) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_convex_profile_is_degenerate() {
        // v = 1 + 0.5 cos 3θ at θ = π/3: margin -2 < 0
        let th = std::f64::consts::FRAC_PI_3;
        let jet = SpeedJet::from_theta(crate::profile::ThetaJet {
            v: 1.0 + 0.5 * (3.0 * th).cos(),
            v_th: -1.5 * (3.0 * th).sin(),
            v_thth: -4.5 * (3.0 * th).cos(),
        });
        assert!(matches!(
            cartesian_tensor(&jet, th, false),
            Err(MetricError::Degenerate { .. })
        ));
    }

    #[test]
    fn time_block_only_when_requested() {
        let field = ParamField::parse("4+cos(x1/2)+t/2", "2+sin(x2/2)", "1", "t").unwrap();
        let (_, off) = christoffel(&field, 0.5, [0.3, 0.2], 1.0, false).unwrap();
        let (_, on) = christoffel(&field, 0.5, [0.3, 0.2], 1.0, true).unwrap();
        assert_eq!(off.dgdt, [0.0; 3]);
        assert!(on.dgdt.iter().any(|x| x.abs() > 1e-6));
        assert_eq!(off.dgdx1, on.dgdx1);
    }
}

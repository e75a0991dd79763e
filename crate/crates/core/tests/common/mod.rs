#![allow(dead_code)]

use std::f64::consts::TAU;

use firefront::geometry::{point_in_polygon, Point};
use firefront::metric::Sym2;
use firefront::{
    cartesian_tensor, gielis_theta_jet, speed_jet, GielisParams, ParamField, SpeedJet,
};

pub fn sim0_field() -> ParamField {
    ParamField::parse("4", "2", "1", "0").unwrap()
}

pub fn sim1_field() -> ParamField {
    ParamField::parse("4+cos(x1/2)", "2+sin(x2/2)", "1", "0").unwrap()
}

pub fn sim2_field() -> ParamField {
    ParamField::parse("4+cos(x1/2)+t/2", "2+sin(x2/2)", "1", "t").unwrap()
}

/// `F(w) = |w| / v(arg w)` for a single Gielis profile.
pub fn finsler_norm(p: &GielisParams, w: [f64; 2]) -> f64 {
    let r = w[0].hypot(w[1]);
    let theta = w[1].atan2(w[0]);
    r / gielis_theta_jet(p, theta).unwrap().v
}

/// Central-difference Hessian of `½F²` at `w`.
pub fn fd_hessian(p: &GielisParams, w: [f64; 2], h: f64) -> Sym2 {
    let e = |dx: f64, dy: f64| {
        let f = finsler_norm(p, [w[0] + dx, w[1] + dy]);
        0.5 * f * f
    };
    let c = e(0.0, 0.0);
    let h11 = (e(h, 0.0) - 2.0 * c + e(-h, 0.0)) / (h * h);
    let h22 = (e(0.0, h) - 2.0 * c + e(0.0, -h)) / (h * h);
    let h12 = (e(h, h) - e(h, -h) - e(-h, h) + e(-h, -h)) / (4.0 * h * h);
    [h11, h12, h22]
}

/// Cartesian `g_ij` of `field` at `(t, p)` in direction `theta`, no derivatives.
pub fn metric_entries(field: &ParamField, t: f64, p: Point, theta: f64) -> Sym2 {
    let jet = speed_jet(field, t, p, theta).unwrap();
    let mj = cartesian_tensor(&SpeedJet::from_theta(jet.theta()), theta, false).unwrap();
    mj.g()
}

fn sym_get(s: &Sym2, i: usize, j: usize) -> f64 {
    match (i.min(j), i.max(j)) {
        (0, 0) => s[0],
        (0, 1) => s[1],
        _ => s[2],
    }
}

/// Formal Christoffel symbols built from central differences of `g_ij`.
pub fn fd_christoffel(
    field: &ParamField,
    t: f64,
    p: Point,
    theta: f64,
    h: f64,
) -> [[[f64; 2]; 2]; 2] {
    let g = metric_entries(field, t, p, theta);
    let det = g[0] * g[2] - g[1] * g[1];
    let inv = [g[2] / det, -g[1] / det, g[0] / det];
    let mut dg = [[0.0; 3]; 2];
    for (q, d) in dg.iter_mut().enumerate() {
        let mut plus = p;
        let mut minus = p;
        plus[q] += h;
        minus[q] -= h;
        let gp = metric_entries(field, t, plus, theta);
        let gm = metric_entries(field, t, minus, theta);
        for e in 0..3 {
            d[e] = (gp[e] - gm[e]) / (2.0 * h);
        }
    }
    let dgi = |q: usize, i: usize, j: usize| sym_get(&dg[q], i, j);
    let mut out = [[[0.0; 2]; 2]; 2];
    for (k, ok) in out.iter_mut().enumerate() {
        for (i, oi) in ok.iter_mut().enumerate() {
            for (j, oij) in oi.iter_mut().enumerate() {
                *oij = (0..2)
                    .map(|l| {
                        0.5 * sym_get(&inv, k, l) * (dgi(i, l, j) + dgi(j, l, i) - dgi(l, i, j))
                    })
                    .sum();
            }
        }
    }
    out
}

pub fn max_abs(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Every point of `inner` lies strictly inside the polygon `outer`.
pub fn nested(inner: &[Point], outer: &[Point]) -> bool {
    inner.iter().all(|p| point_in_polygon(*p, outer))
}

/// Largest distance between consecutive points of a closed polyline.
pub fn max_spacing(pts: &[Point]) -> f64 {
    (0..pts.len())
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
            (a[0] - b[0]).hypot(a[1] - b[1])
        })
        .fold(0.0, f64::max)
}

pub fn uniform_angles(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| TAU * k as f64 / n as f64)
}

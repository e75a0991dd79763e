//! CSV tables and SVG plots of a run.
//!
//! All writers are deterministic: identical runs give identical bytes.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use crate::front::Front;
use crate::geometry::Point;
use crate::scenario::{OutputSettings, RunResult};

pub const FRONTS_HEADER: &str = "front_time,ray_index,theta0,x1,x2,alive";
pub const TRAJECTORIES_HEADER: &str = "ray_index,t,x1,x2,theta,v";

/// Longest ray polyline drawn in the SVG; longer rays are subsampled.
const SVG_RAY_POINTS: usize = 400;

/// One row per `(front_time, ray)`. Rays that are dead or truncated at that
/// time are reported at their last known position with `alive = 0`.
pub fn fronts_csv(r: &RunResult) -> String {
    let mut out = String::from(FRONTS_HEADER);
    out.push('\n');
    for front in &r.fronts {
        for (k, tr) in r.fan.trajectories.iter().enumerate() {
            let alive = tr.alive_at(front.time);
            let [x1, x2] = tr.position_at(front.time).unwrap_or_else(|| tr.endpoint());
            writeln!(
                out,
                "{},{},{},{},{},{}",
                front.time,
                k,
                r.fan.theta0(k),
                x1,
                x2,
                u8::from(alive)
            )
            .unwrap();
        }
    }
    out
}

pub fn trajectories_csv(r: &RunResult) -> String {
    let mut out = String::from(TRAJECTORIES_HEADER);
    out.push('\n');
    for (k, tr) in r.fan.trajectories.iter().enumerate() {
        for s in &tr.samples {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                k, s.t, s.state.x1, s.state.x2, s.state.theta, s.v
            )
            .unwrap();
        }
    }
    out
}

fn front_polyline(front: &Front) -> Vec<Point> {
    let mut pts = front.positions();
    if front.closed && pts.len() > 2 {
        pts.push(pts[0]);
    }
    pts
}

fn ray_polylines(r: &RunResult) -> Vec<Vec<Point>> {
    r.fan
        .trajectories
        .iter()
        .map(|tr| {
            let n = tr.samples.len();
            let stride = n.div_ceil(SVG_RAY_POINTS).max(1);
            let mut pts: Vec<Point> = tr
                .samples
                .iter()
                .step_by(stride)
                .map(|s| s.state.position())
                .collect();
            let last = tr.endpoint();
            if pts.last() != Some(&last) {
                pts.push(last);
            }
            pts
        })
        .collect()
}

fn fmt_points(pts: &[Point]) -> String {
    let mut s = String::new();
    for (i, p) in pts.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        // SVG y grows downwards
        write!(s, "{:.6},{:.6}", p[0], -p[1]).unwrap();
    }
    s
}

/// Fronts as polylines over optional ray polylines, with the view box fitted
/// to the drawn data plus a 5% margin.
pub fn svg(r: &RunResult, include_rays: bool) -> String {
    let fronts: Vec<Vec<Point>> = r.fronts.iter().map(front_polyline).collect();
    let rays = if include_rays {
        ray_polylines(r)
    } else {
        Vec::new()
    };

    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in fronts
        .iter()
        .chain(&rays)
        .flatten()
        .chain(std::iter::once(&r.fan.ignition))
    {
        let q = [p[0], -p[1]];
        for i in 0..2 {
            lo[i] = lo[i].min(q[i]);
            hi[i] = hi[i].max(q[i]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    let margin = 0.05 * span;
    let (x, y) = (lo[0] - margin, lo[1] - margin);
    let (w, h) = (hi[0] - lo[0] + 2.0 * margin, hi[1] - lo[1] + 2.0 * margin);
    let stroke = span / 400.0;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x:.6} {y:.6} {w:.6} {h:.6}" width="800" height="{:.0}">"#,
        800.0 * h / w
    )
    .unwrap();
    if !rays.is_empty() {
        writeln!(
            out,
            r##"<g fill="none" stroke="#9a9a9a" stroke-width="{:.6}">"##,
            stroke * 0.5
        )
        .unwrap();
        for (k, pts) in rays.iter().enumerate() {
            writeln!(
                out,
                r#"<polyline data-ray="{k}" points="{}"/>"#,
                fmt_points(pts)
            )
            .unwrap();
        }
        out.push_str("</g>\n");
    }
    writeln!(
        out,
        r##"<g fill="none" stroke="#d62728" stroke-width="{stroke:.6}">"##
    )
    .unwrap();
    for (front, pts) in r.fronts.iter().zip(&fronts) {
        writeln!(
            out,
            r#"<polyline data-time="{}" points="{}"/>"#,
            front.time,
            fmt_points(pts)
        )
        .unwrap();
    }
    out.push_str("</g>\n");
    let [ix, iy] = r.fan.ignition;
    writeln!(
        out,
        r##"<circle cx="{ix:.6}" cy="{:.6}" r="{:.6}" fill="#000"/>"##,
        -iy,
        stroke * 2.0
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}

/// Writes the files selected in `settings` into `settings.dir`.
///
/// `fronts.csv` is skipped when no front times were requested.
pub fn write_outputs(r: &RunResult, settings: &OutputSettings) -> io::Result<Vec<PathBuf>> {
    let dir = &settings.dir;
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> io::Result<()> {
        let p = Path::new(dir).join(name);
        std::fs::write(&p, body)?;
        written.push(p);
        Ok(())
    };
    if settings.csv {
        if !r.fronts.is_empty() {
            put("fronts.csv", fronts_csv(r))?;
        }
        put("trajectories.csv", trajectories_csv(r))?;
    }
    if settings.svg {
        put("simulation.svg", svg(r, settings.svg_rays))?;
    }
    Ok(written)
}

//! Ray fans from a point ignition, crossing pruning and front extraction.

use std::collections::HashMap;
use std::f64::consts::TAU;

use rayon::prelude::*;
use thiserror::Error;

use crate::geodesic::{integrate_ray, GeodesicError, RayState, Trajectory};
use crate::geometry::{segment_intersection, Point};
use crate::profile::ParamField;

pub const MIN_RAYS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrontError {
    #[error("a fan needs at least {MIN_RAYS} rays, got {0}")]
    TooFewRays(usize),
    #[error("front time {t} outside the integration window [{t0}, {t_end}]")]
    OutsideWindow { t: f64, t0: f64, t_end: f64 },
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
}

#[derive(Debug, Clone)]
pub struct Fan {
    /// Ordered by initial angle `2πk/N`.
    pub trajectories: Vec<Trajectory>,
    pub ignition: Point,
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl Fan {
    pub fn theta0(&self, k: usize) -> f64 {
        TAU * k as f64 / self.trajectories.len() as f64
    }

    pub fn dead_rays(&self) -> impl Iterator<Item = usize> + '_ {
        self.trajectories
            .iter()
            .enumerate()
            .filter(|(_, tr)| tr.death_time.is_some())
            .map(|(k, _)| k)
    }

    pub fn failed_rays(&self) -> impl Iterator<Item = usize> + '_ {
        self.trajectories
            .iter()
            .enumerate()
            .filter(|(_, tr)| !tr.is_complete())
            .map(|(k, _)| k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontPoint {
    pub x1: f64,
    pub x2: f64,
    pub ray_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Front {
    pub time: f64,
    pub points: Vec<FrontPoint>,
    /// Every ray of the fan contributed a point.
    pub closed: bool,
}

impl Front {
    pub fn positions(&self) -> Vec<Point> {
        self.points.iter().map(|p| [p.x1, p.x2]).collect()
    }
}

/// Integrates `n_rays` rays from `ignition` with uniformly spaced initial angles.
#[allow(clippy::too_many_arguments)]
pub fn shoot_fan(
    field: &ParamField,
    ignition: Point,
    n_rays: usize,
    t0: f64,
    t_end: f64,
    dt: f64,
    time_dependent: bool,
) -> Result<Fan, FrontError> {
    if n_rays < MIN_RAYS {
        return Err(FrontError::TooFewRays(n_rays));
    }
    let trajectories = (0..n_rays)
        .into_par_iter()
        .map(|k| {
            let theta0 = TAU * k as f64 / n_rays as f64;
            let s0 = RayState::new(ignition[0], ignition[1], theta0);
            integrate_ray(field, s0, t0, t_end, dt, time_dependent)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Fan {
        trajectories,
        ignition,
        t0,
        t_end,
        dt,
    })
}

#[derive(Clone, Copy)]
struct SegRef {
    ray: u32,
    seg: u32,
}

/// Marks every ray that crosses a ray which reached the crossing point
/// earlier. A ray dies at its own arrival time at the earliest such
/// crossing. Arrivals within one time step of each other are a tie and
/// kill neither ray.
pub fn prune_crossings(mut fan: Fan) -> Fan {
    let trs = &fan.trajectories;
    let mut max_len: f64 = 0.0;
    let mut n_segments = 0;
    for tr in trs {
        for w in tr.samples.windows(2) {
            let d = (w[1].state.x1 - w[0].state.x1).hypot(w[1].state.x2 - w[0].state.x2);
            max_len = max_len.max(d);
            n_segments += 1;
        }
    }
    if n_segments == 0 || !(max_len > 0.0) {
        return fan;
    }
    let cell = max_len;
    let key = |x: f64| (x / cell).floor() as i64;

    let mut grid: HashMap<(i64, i64), Vec<SegRef>> = HashMap::with_capacity(n_segments);
    for (r, tr) in trs.iter().enumerate() {
        for (s, w) in tr.samples.windows(2).enumerate() {
            let (a, b) = (w[0].state, w[1].state);
            let (i0, i1) = (key(a.x1.min(b.x1)), key(a.x1.max(b.x1)));
            let (j0, j1) = (key(a.x2.min(b.x2)), key(a.x2.max(b.x2)));
            for i in i0..=i1 {
                for j in j0..=j1 {
                    grid.entry((i, j)).or_default().push(SegRef {
                        ray: r as u32,
                        seg: s as u32,
                    });
                }
            }
        }
    }

    let tie = fan.dt;
    let cells: Vec<&Vec<SegRef>> = grid.values().filter(|c| c.len() > 1).collect();
    let kills: Vec<(usize, f64)> = cells
        .par_iter()
        .flat_map_iter(|entries| {
            let mut out = Vec::new();
            for (n, a) in entries.iter().enumerate() {
                for b in &entries[n + 1..] {
                    if a.ray == b.ray || (a.seg == 0 && b.seg == 0) {
                        continue;
                    }
                    if let Some((ta, tb)) = crossing_times(trs, *a, *b) {
                        if ta > tb + tie {
                            out.push((a.ray as usize, ta));
                        } else if tb > ta + tie {
                            out.push((b.ray as usize, tb));
                        }
                    }
                }
            }
            out
        })
        .collect();

    let mut death: Vec<Option<f64>> = vec![None; trs.len()];
    for (r, t) in kills {
        death[r] = Some(death[r].map_or(t, |d: f64| d.min(t)));
    }
    for (tr, d) in fan.trajectories.iter_mut().zip(death) {
        tr.death_time = d;
    }
    fan
}

fn crossing_times(trs: &[Trajectory], a: SegRef, b: SegRef) -> Option<(f64, f64)> {
    let sa = &trs[a.ray as usize].samples[a.seg as usize..a.seg as usize + 2];
    let sb = &trs[b.ray as usize].samples[b.seg as usize..b.seg as usize + 2];
    let (u, w) = segment_intersection(
        sa[0].state.position(),
        sa[1].state.position(),
        sb[0].state.position(),
        sb[1].state.position(),
    )?;
    let ta = sa[0].t + u * (sa[1].t - sa[0].t);
    let tb = sb[0].t + w * (sb[1].t - sb[0].t);
    Some((ta, tb))
}

/// Positions of all rays alive at `t`, in ray order.
pub fn extract_front(fan: &Fan, t: f64) -> Result<Front, FrontError> {
    let slack = 1e-12 * (1.0 + fan.t_end.abs());
    if !(t >= fan.t0 - slack && t <= fan.t_end + slack) {
        return Err(FrontError::OutsideWindow {
            t,
            t0: fan.t0,
            t_end: fan.t_end,
        });
    }
    let t = t.clamp(fan.t0, fan.t_end);
    let points: Vec<FrontPoint> = fan
        .trajectories
        .iter()
        .enumerate()
        .filter(|(_, tr)| tr.alive_at(t))
        .filter_map(|(k, tr)| {
            tr.position_at(t).map(|[x1, x2]| FrontPoint {
                x1,
                x2,
                ray_index: k,
            })
        })
        .collect();
    let closed = points.len() == fan.trajectories.len();
    Ok(Front {
        time: t,
        points,
        closed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::{RayStatus, Sample};

    fn polyline(points: &[(f64, f64, f64)]) -> Trajectory {
        Trajectory {
            samples: points
                .iter()
                .map(|&(t, x1, x2)| Sample {
                    t,
                    state: RayState::new(x1, x2, 0.0),
                    v: 1.0,
                })
                .collect(),
            death_time: None,
            status: RayStatus::Complete,
            min_margin: 1.0,
        }
    }

    fn synthetic(trajectories: Vec<Trajectory>, dt: f64) -> Fan {
        Fan {
            trajectories,
            ignition: [0.0, 0.0],
            t0: 0.0,
            t_end: 4.0,
            dt,
        }
    }

    #[test]
    fn later_arrival_dies() {
        // ray 0 passes (2, 0) at t = 2; ray 1 reaches it at t = 2.5
        let r0 = polyline(&[
            (0.0, 0.0, 0.0),
            (1.0, 1.0, 0.0),
            (2.0, 2.0, 0.0),
            (3.0, 3.0, 0.0),
            (4.0, 4.0, 0.0),
        ]);
        let r1 = polyline(&[
            (0.0, 2.0, -2.5),
            (1.0, 2.0, -1.5),
            (2.0, 2.0, -0.5),
            (3.0, 2.0, 0.5),
            (4.0, 2.0, 1.5),
        ]);
        let fan = prune_crossings(synthetic(vec![r0, r1], 0.1));
        assert_eq!(fan.trajectories[0].death_time, None);
        assert!((fan.trajectories[1].death_time.unwrap() - 2.5).abs() < 1e-12);
        assert!(!fan.trajectories[1].alive_at(2.6));
        assert!(fan.trajectories[1].alive_at(2.4));
        let f = extract_front(&fan, 3.0).unwrap();
        assert!(!f.closed);
        assert_eq!(f.points.len(), 1);
    }

    #[test]
    fn simultaneous_arrival_is_a_tie() {
        let r0 = polyline(&[(0.0, -1.0, -1.0), (1.0, 0.0, 0.0), (2.0, 1.0, 1.0)]);
        let r1 = polyline(&[(0.0, -1.0, 1.0), (1.0, 0.0, 0.0), (2.0, 1.0, -1.0)]);
        let fan = prune_crossings(synthetic(vec![r0, r1], 0.1));
        assert!(fan.trajectories.iter().all(|t| t.death_time.is_none()));
    }

    #[test]
    fn empty_fan() {
        let fan = prune_crossings(synthetic(vec![], 0.1));
        assert!(fan.trajectories.is_empty());
    }

    #[test]
    fn window_and_ray_count() {
        let field = ParamField::parse("1", "1", "1", "0").unwrap();
        assert_eq!(
            shoot_fan(&field, [0.0, 0.0], 7, 0.0, 1.0, 0.1, false).unwrap_err(),
            FrontError::TooFewRays(7)
        );
        let fan = shoot_fan(&field, [0.0, 0.0], 8, 0.0, 1.0, 0.1, false).unwrap();
        assert!(extract_front(&fan, 1.5).is_err());
        assert!(extract_front(&fan, -0.1).is_err());
        let f = extract_front(&fan, 0.0).unwrap();
        assert!(f.closed);
        assert!(f.points.iter().all(|p| p.x1 == 0.0 && p.x2 == 0.0));
    }
}

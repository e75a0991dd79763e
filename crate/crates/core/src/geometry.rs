//! Small planar helpers shared by front extraction, tests and plotting.

pub type Point = [f64; 2];

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Proper intersection of segments `p0p1` and `q0q1`.
///
/// Returns the parameters `(u, w)` along each segment. Parallel and
/// collinear pairs report no intersection.
pub fn segment_intersection(p0: Point, p1: Point, q0: Point, q1: Point) -> Option<(f64, f64)> {
    let r = sub(p1, p0);
    let s = sub(q1, q0);
    let denom = cross(r, s);
    let scale = (r[0].abs() + r[1].abs()) * (s[0].abs() + s[1].abs());
    if denom.abs() <= 1e-14 * scale || scale == 0.0 {
        return None;
    }
    let qp = sub(q0, p0);
    let u = cross(qp, s) / denom;
    let w = cross(qp, r) / denom;
    if (0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&w) {
        Some((u, w))
    } else {
        None
    }
}

/// Even-odd rule; points on the boundary may go either way.
pub fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    let mut inside = false;
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[Point], b: &[Point]) -> f64 {
    fn directed(a: &[Point], b: &[Point]) -> f64 {
        a.iter()
            .map(|p| {
                b.iter()
                    .map(|q| distance(*p, *q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    directed(a, b).max(directed(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_segments() {
        let (u, w) = segment_intersection([0.0, 0.0], [2.0, 2.0], [0.0, 2.0], [2.0, 0.0]).unwrap();
        assert!((u - 0.5).abs() < 1e-15 && (w - 0.5).abs() < 1e-15);
        assert!(segment_intersection([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]).is_none());
        assert!(segment_intersection([0.0, 0.0], [1.0, 0.0], [2.0, -1.0], [2.0, 1.0]).is_none());
        assert!(segment_intersection([0.0, 0.0], [1.0, 0.0], [0.5, 0.0], [2.0, 0.0]).is_none());
    }

    #[test]
    fn polygon_membership() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!(point_in_polygon([0.5, 0.5], &sq));
        assert!(!point_in_polygon([1.5, 0.5], &sq));
        assert!(!point_in_polygon([0.5, -0.1], &sq));
    }

    #[test]
    fn hausdorff_of_shifted_sets() {
        let a = [[0.0, 0.0], [1.0, 0.0]];
        let b = [[0.0, 0.5], [1.0, 0.0], [3.0, 0.0]];
        assert_eq!(hausdorff(&a, &b), 2.0);
        assert_eq!(hausdorff(&a, &a), 0.0);
    }
}

//! Planar points, segments and polylines.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist_sq(self, other: Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        dx * dx + dy * dy
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point::new(x, y)
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Distance from `p` to the closed segment `a`–`b`.
pub fn point_segment_dist(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len_sq = dx * dx + dy * dy;
    if len_sq == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len_sq).clamp(0.0, 1.0);
    p.dist(a.lerp(b, t))
}

pub fn point_polyline_dist(p: Point, line: &[Point]) -> f64 {
    match line {
        [] => f64::INFINITY,
        [only] => p.dist(*only),
        _ => line
            .windows(2)
            .map(|w| point_segment_dist(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Whether closed segments `a`–`b` and `c`–`d` share a point.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    segment_segment_dist(a, b, c, d) == 0.0
}

/// Minimum distance between closed segments `a`–`b` and `c`–`d`.
pub fn segment_segment_dist(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return 0.0;
    }
    point_segment_dist(a, c, d)
        .min(point_segment_dist(b, c, d))
        .min(point_segment_dist(c, a, b))
        .min(point_segment_dist(d, a, b))
}

pub fn polyline_polyline_dist(p: &[Point], q: &[Point]) -> f64 {
    match (p.len(), q.len()) {
        (0, _) | (_, 0) => f64::INFINITY,
        (1, _) => point_polyline_dist(p[0], q),
        (_, 1) => point_polyline_dist(q[0], p),
        _ => {
            let mut best = f64::INFINITY;
            for s in p.windows(2) {
                for t in q.windows(2) {
                    best = best.min(segment_segment_dist(s[0], s[1], t[0], t[1]));
                }
            }
            best
        }
    }
}

pub fn polyline_length(line: &[Point]) -> f64 {
    line.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// Points along `line` at arc-length steps no larger than `step`, always
/// including every polyline vertex.
pub fn sample_polyline(line: &[Point], step: f64, out: &mut Vec<Point>) {
    debug_assert!(step > 0.0);
    let Some(first) = line.first() else {
        return;
    };
    out.push(*first);
    for w in line.windows(2) {
        let len = w[0].dist(w[1]);
        let n = (len / step).ceil().max(1.0) as usize;
        for k in 1..n {
            out.push(w[0].lerp(w[1], k as f64 / n as f64));
        }
        out.push(w[1]);
    }
}

//! Oriented rectangles and exact convex-polygon overlap.

use serde::{Deserialize, Serialize};

/// A point in image pixel coordinates (x right, y down).
pub type Point = [f64; 2];

/// Wrap an angle into (-pi, pi].
pub fn normalize_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut t = theta.rem_euclid(two_pi); // [0, 2pi)
    if t > std::f64::consts::PI {
        t -= two_pi;
    }
    t
}

/// An oriented rectangle stored as its four corners in counterclockwise
/// order (positive shoelace area with the x-right/y-down axes as given).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedRect {
    pub corners: [Point; 4],
}

impl OrientedRect {
    /// Rectangle centered at `center`, with full side lengths `width` and
    /// `height`, rotated by `theta` radians.
    pub fn new(center: Point, width: f64, height: f64, theta: f64) -> OrientedRect {
        let (sin, cos) = theta.sin_cos();
        let hw = 0.5 * width;
        let hh = 0.5 * height;
        // Local corners in counterclockwise order (positive shoelace area),
        // then rotated and shifted.
        let local = [[-hw, -hh], [hw, -hh], [hw, hh], [-hw, hh]];
        let mut corners = [[0.0; 2]; 4];
        for (out, l) in corners.iter_mut().zip(local.iter()) {
            out[0] = center[0] + l[0] * cos - l[1] * sin;
            out[1] = center[1] + l[0] * sin + l[1] * cos;
        }
        OrientedRect { corners }
    }

    pub fn center(&self) -> Point {
        let mut c = [0.0, 0.0];
        for p in &self.corners {
            c[0] += p[0];
            c[1] += p[1];
        }
        [c[0] / 4.0, c[1] / 4.0]
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.corners)
    }

    /// Axis-aligned bounding box as (min_x, min_y, max_x, max_y).
    pub fn aabb(&self) -> Aabb {
        let mut bb = Aabb::empty();
        for p in &self.corners {
            bb.include(*p);
        }
        bb
    }

    /// True when the point lies inside or on the boundary.
    pub fn contains(&self, p: Point) -> bool {
        // Counterclockwise corners: inside means never strictly right of an edge.
        for i in 0..4 {
            let a = self.corners[i];
            let b = self.corners[(i + 1) % 4];
            if cross(a, b, p) < 0.0 {
                return false;
            }
        }
        true
    }
}

/// Axis-aligned box. Degenerate (empty) until a point is included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point,
    pub max: Point,
}

impl Aabb {
    pub fn empty() -> Aabb {
        Aabb {
            min: [f64::INFINITY, f64::INFINITY],
            max: [f64::NEG_INFINITY, f64::NEG_INFINITY],
        }
    }

    pub fn from_corners(min: Point, max: Point) -> Aabb {
        Aabb { min, max }
    }

    pub fn is_empty(&self) -> bool {
        self.min[0] > self.max[0] || self.min[1] > self.max[1]
    }

    pub fn include(&mut self, p: Point) {
        self.min[0] = self.min[0].min(p[0]);
        self.min[1] = self.min[1].min(p[1]);
        self.max[0] = self.max[0].max(p[0]);
        self.max[1] = self.max[1].max(p[1]);
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        let mut out = *self;
        if !other.is_empty() {
            out.include(other.min);
            out.include(other.max);
        }
        out
    }

    pub fn width(&self) -> f64 {
        (self.max[0] - self.min[0]).max(0.0)
    }

    pub fn height(&self) -> f64 {
        (self.max[1] - self.min[1]).max(0.0)
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Axis-aligned intersection-over-union.
    pub fn iou(&self, other: &Aabb) -> f64 {
        let ix = (self.max[0].min(other.max[0]) - self.min[0].max(other.min[0])).max(0.0);
        let iy = (self.max[1].min(other.max[1]) - self.min[1].max(other.min[1])).max(0.0);
        let inter = ix * iy;
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Shoelace area of a polygon given in counterclockwise order.
fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * acc
}

/// Sutherland-Hodgman clipping of a convex `subject` polygon against a
/// convex `clip` polygon; both counterclockwise.
fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut output: Vec<Point> = subject.to_vec();
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        let input = std::mem::take(&mut output);
        for j in 0..input.len() {
            let cur = input[j];
            let next = input[(j + 1) % input.len()];
            let cur_in = cross(a, b, cur) >= 0.0;
            let next_in = cross(a, b, next) >= 0.0;
            match (cur_in, next_in) {
                (true, true) => output.push(next),
                (true, false) => output.push(segment_intersection(cur, next, a, b)),
                (false, true) => {
                    output.push(segment_intersection(cur, next, a, b));
                    output.push(next);
                }
                (false, false) => {}
            }
        }
    }
    output
}

fn segment_intersection(p1: Point, p2: Point, a: Point, b: Point) -> Point {
    let d1 = cross(a, b, p1);
    let d2 = cross(a, b, p2);
    let t = if (d1 - d2).abs() < f64::EPSILON {
        0.5
    } else {
        d1 / (d1 - d2)
    };
    [p1[0] + t * (p2[0] - p1[0]), p1[1] + t * (p2[1] - p1[1])]
}

/// Exact intersection area of two oriented rectangles.
pub fn intersection_area(a: &OrientedRect, b: &OrientedRect) -> f64 {
    if !a.aabb().overlaps(&b.aabb()) {
        return 0.0;
    }
    let poly = clip_convex(&a.corners, &b.corners);
    polygon_area(&poly).max(0.0)
}

impl Aabb {
    fn overlaps(&self, other: &Aabb) -> bool {
        self.min[0] <= other.max[0]
            && other.min[0] <= self.max[0]
            && self.min[1] <= other.max[1]
            && other.min[1] <= self.max[1]
    }
}

/// Exact intersection-over-union of two oriented rectangles, in [0, 1].
/// Degenerate zero-area rectangles yield 0.
pub fn iou(a: &OrientedRect, b: &OrientedRect) -> f64 {
    let inter = intersection_area(a, b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

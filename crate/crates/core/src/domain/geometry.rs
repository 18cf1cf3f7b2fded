use serde::{Deserialize, Serialize};

use crate::curve::{s_prime, ArcOnCurve, Point};
use crate::numerics::gauss_legendre;
use crate::{Error, Result};

use std::f64::consts::PI;

/// Arc of the circle of given center and radius between two polar angles,
/// traversed counterclockwise from `angle_lo` to `angle_hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleArc {
    pub center: Point,
    pub radius: f64,
    pub angle_lo: f64,
    pub angle_hi: f64,
}

impl CircleArc {
    pub fn new(center: Point, radius: f64, angle_lo: f64, angle_hi: f64) -> Result<Self> {
        if !(radius > 0.0) || !(angle_lo < angle_hi) || angle_hi - angle_lo > 2.0 * PI + 1e-12 {
            return Err(Error::Geometry(format!(
                "invalid circle arc (r={radius}, [{angle_lo}, {angle_hi}])"
            )));
        }
        let c = Self { center, radius, angle_lo, angle_hi };
        if c.min_y() <= 0.0 {
            return Err(Error::Geometry("circle arc leaves the upper half-plane".into()));
        }
        Ok(c)
    }

    pub fn point(&self, angle: f64) -> Point {
        Point::new(self.center.x + self.radius * angle.cos(), self.center.y + self.radius * angle.sin())
    }

    fn min_y(&self) -> f64 {
        let mut lo = self.point(self.angle_lo).y.min(self.point(self.angle_hi).y);
        // sin attains -1 at 3pi/2 + 2 pi m
        let m = ((self.angle_lo - 1.5 * PI) / (2.0 * PI)).ceil();
        if 1.5 * PI + 2.0 * PI * m <= self.angle_hi {
            lo = self.center.y - self.radius;
        }
        lo
    }
}

/// Straight segment from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    Curve(ArcOnCurve),
    Circle(CircleArc),
    Segment(Segment),
}

fn panels(span: f64, per: f64) -> usize {
    ((span.abs() / per).ceil() as usize).max(1)
}

impl Geometry {
    /// Point at `u` in `[0, 1]` along the natural direction.
    pub fn point(&self, u: f64) -> Point {
        match self {
            Geometry::Curve(a) => a.point(a.t_lo + (a.t_hi - a.t_lo) * u),
            Geometry::Circle(c) => c.point(c.angle_lo + (c.angle_hi - c.angle_lo) * u),
            Geometry::Segment(s) => s.a.lerp(&s.b, u),
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            Geometry::Curve(a) => a.length(),
            Geometry::Circle(c) => c.radius * (c.angle_hi - c.angle_lo),
            Geometry::Segment(s) => s.a.dist(&s.b),
        }
    }

    /// Signed curvature relative to the left normal of the natural direction,
    /// at `u` in `[0, 1]`.
    pub fn curvature(&self, u: f64) -> f64 {
        match self {
            Geometry::Curve(a) => -2.0 * a.curve.h / self.point(u).y,
            Geometry::Circle(c) => 1.0 / c.radius,
            Geometry::Segment(_) => 0.0,
        }
    }

    /// `int ln(y / yref) dx` along the natural direction.
    pub fn log_y_dx(&self, yref: f64) -> f64 {
        match self {
            Geometry::Curve(a) => {
                let c = a.curve;
                let (k, l0, inv) = (c.k(), (c.z / yref).ln(), 0.5 / c.h);
                k * gauss_legendre(
                    |t: f64| (l0 + (1.0 - t.cos()) * inv) * s_prime(c.h, t),
                    a.t_lo,
                    a.t_hi,
                    panels(a.t_hi - a.t_lo, PI / 8.0),
                )
            }
            Geometry::Circle(c) => {
                let r = c.radius;
                gauss_legendre(
                    |t: f64| -r * t.sin() * ((c.center.y + r * t.sin()) / yref).ln(),
                    c.angle_lo,
                    c.angle_hi,
                    panels(c.angle_hi - c.angle_lo, PI / 16.0),
                )
            }
            Geometry::Segment(s) => {
                let dx = s.b.x - s.a.x;
                // ln of a linear function: exact antiderivative
                let (ya, yb) = (s.a.y, s.b.y);
                let f = |y: f64| y * (y / yref).ln() - y;
                if (yb - ya).abs() <= 1e-14 * ya.max(yb) {
                    dx * (0.5 * (ya + yb) / yref).ln()
                } else {
                    dx * (f(yb) - f(ya)) / (yb - ya)
                }
            }
        }
    }
}

/// Kind of a boundary arc: `A` (curvature `2H/y` towards the interior),
/// `B` (`-2H/y`), or `C` (at least `2H/y`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArcKind {
    A,
    B,
    C,
}

/// A piece of a closed boundary. `orientation` is `+1` when the boundary
/// runs along the natural direction of the geometry and `-1` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryArc {
    pub kind: ArcKind,
    pub geometry: Geometry,
    pub orientation: i8,
}

impl BoundaryArc {
    pub fn new(kind: ArcKind, geometry: Geometry, orientation: i8) -> Result<Self> {
        if orientation != 1 && orientation != -1 {
            return Err(Error::Argument(format!("orientation must be +-1, got {orientation}")));
        }
        Ok(Self { kind, geometry, orientation })
    }

    fn natural(&self, u: f64) -> f64 {
        if self.orientation > 0 {
            u
        } else {
            1.0 - u
        }
    }

    /// Point at `u` in `[0, 1]` along the traversal.
    pub fn point(&self, u: f64) -> Point {
        self.geometry.point(self.natural(u))
    }

    pub fn start(&self) -> Point {
        self.point(0.0)
    }

    pub fn end(&self) -> Point {
        self.point(1.0)
    }

    pub fn length(&self) -> f64 {
        self.geometry.length()
    }

    /// Curvature relative to the left normal of the traversal; for a
    /// counterclockwise boundary this is relative to the interior.
    pub fn curvature(&self, u: f64) -> f64 {
        f64::from(self.orientation) * self.geometry.curvature(self.natural(u))
    }

    /// `n + 1` points along the traversal.
    pub fn sample(&self, n: usize) -> Vec<Point> {
        let n = n.max(1);
        (0..=n).map(|i| self.point(i as f64 / n as f64)).collect()
    }

    pub fn log_y_dx(&self, yref: f64) -> f64 {
        f64::from(self.orientation) * self.geometry.log_y_dx(yref)
    }

    pub fn reversed(&self) -> Self {
        Self { orientation: -self.orientation, ..*self }
    }
}

/// Closed polygon through the boundary, `per_arc` points per arc, with the
/// last point of each arc omitted.
pub fn polygonize(arcs: &[BoundaryArc], per_arc: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(arcs.len() * per_arc);
    for a in arcs {
        let s = a.sample(per_arc);
        out.extend_from_slice(&s[..s.len() - 1]);
    }
    out
}

/// Shoelace area of a closed polygon (positive when counterclockwise).
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        s += (p.x - poly[0].x) * (q.y - poly[0].y) - (q.x - poly[0].x) * (p.y - poly[0].y);
    }
    0.5 * s
}

fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn segments_cross(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let (d1, d2) = (orient(a, b, c), orient(a, b, d));
    let (d3, d4) = (orient(c, d, a), orient(c, d, b));
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Whether two non-adjacent edges of the closed polygon cross.
pub fn polygon_self_intersects(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 4 {
        return false;
    }
    let bbox = |i: usize| {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        (p.x.min(q.x), p.x.max(q.x), p.y.min(q.y), p.y.max(q.y))
    };
    let boxes: Vec<_> = (0..n).map(bbox).collect();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = (boxes[i], boxes[j]);
            if a.1 < b.0 || b.1 < a.0 || a.3 < b.2 || b.3 < a.2 {
                continue;
            }
            if segments_cross(&poly[i], &poly[(i + 1) % n], &poly[j], &poly[(j + 1) % n]) {
                return true;
            }
        }
    }
    false
}

/// Even-odd point-in-polygon test.
pub fn point_in_polygon(p: &Point, poly: &[Point]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn point_segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let l2 = dx * dx + dy * dy;
    let s = if l2 > 0.0 { (((p.x - a.x) * dx + (p.y - a.y) * dy) / l2).clamp(0.0, 1.0) } else { 0.0 };
    p.dist(&a.lerp(b, s))
}

/// Distance from `p` to the closed polygon's edges.
pub fn distance_to_polygon(p: &Point, poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| point_segment_distance(p, &poly[i], &poly[(i + 1) % n])).fold(f64::INFINITY, f64::min)
}

/// Largest distance between any two polygon points (bounding box diagonal).
pub fn diameter(poly: &[Point]) -> f64 {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in poly {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    (x1 - x0).hypot(y1 - y0)
}

/// Checks that consecutive arcs share endpoints within `1e-8 max(1, diam)`.
pub fn check_closed(arcs: &[BoundaryArc]) -> Result<()> {
    if arcs.is_empty() {
        return Err(Error::Geometry("empty boundary".into()));
    }
    let pts: Vec<Point> = arcs.iter().flat_map(|a| [a.start(), a.end()]).collect();
    let tol = 1e-8 * diameter(&pts).max(1.0);
    for i in 0..arcs.len() {
        let (e, s) = (arcs[i].end(), arcs[(i + 1) % arcs.len()].start());
        if e.dist(&s) > tol {
            return Err(Error::Geometry(format!(
                "boundary is open between arcs {i} and {}: gap {:e}",
                (i + 1) % arcs.len(),
                e.dist(&s)
            )));
        }
    }
    Ok(())
}

/// `-sum int ln(y) dx` over the arcs, without any validity checks. For a
/// closed counterclockwise simple boundary this is `int (1/y) da`.
pub fn boundary_form_integral(arcs: &[BoundaryArc]) -> f64 {
    let yref = arcs.first().map(|a| a.start().y).unwrap_or(1.0);
    -arcs.iter().map(|a| a.log_y_dx(yref)).sum::<f64>()
}

/// `I = int (1/y) da` over the region enclosed by a closed, simple,
/// counterclockwise boundary.
pub fn region_integral(arcs: &[BoundaryArc]) -> Result<f64> {
    check_closed(arcs)?;
    let poly = polygonize(arcs, 256);
    if polygon_self_intersects(&poly) {
        return Err(Error::Geometry("boundary intersects itself".into()));
    }
    let v = boundary_form_integral(arcs);
    if !(v > 0.0) {
        return Err(Error::Geometry("boundary is not positively oriented".into()));
    }
    Ok(v)
}

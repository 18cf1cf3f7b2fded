//! Curves of Euclidean curvature `2H/y` in the upper half-plane.
//!
//! A curve is identified by its base point `P1 = (w, z)` (lowest point of a
//! loop) and parametrized by
//!
//! ```text
//! x(t) = w + k S_H(t),   y(t) = z exp(sin^2(t/2) / H),   k = z e^{1/2H} / 2H,
//! S_H(t) = int_0^t (-cos s) e^{-cos(s)/2H} ds.
//! ```
//!
//! Increasing `t` traverses the curve with signed curvature `-2H/y`.

mod connectors;
mod constants;

use serde::{Deserialize, Serialize};

use crate::numerics::{gauss_legendre, integrate_g, QuadratureSpec};
use crate::{Error, Result};

pub(crate) use connectors::{above_arc, below_arcs};
pub use connectors::{classify_vertical, connectors, horizontal_connectors, vertical_connectors, VerticalType};
pub use constants::{constants, dbar, f_of_t, k_of_h, lbar, lbar_max, CurveConstants, KResult};

use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, o: &Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }

    pub fn lerp(&self, o: &Point, s: f64) -> Point {
        Point::new(self.x + s * (o.x - self.x), self.y + s * (o.y - self.y))
    }
}

/// A `2H/y`-curve through its base point `(w, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveParams {
    pub w: f64,
    pub z: f64,
    pub h: f64,
}

impl CurveParams {
    pub fn new(w: f64, z: f64, h: f64) -> Result<Self> {
        if !(z > 0.0) || !(h > 0.0) || !w.is_finite() || !z.is_finite() || !h.is_finite() {
            return Err(Error::Domain(format!("invalid curve (w={w}, z={z}, H={h})")));
        }
        Ok(Self { w, z, h })
    }

    /// Scale factor `z e^{1/2H} / 2H` in front of `S_H`.
    pub fn k(&self) -> f64 {
        self.z * (0.5 / self.h).exp() / (2.0 * self.h)
    }

    pub fn base(&self) -> Point {
        Point::new(self.w, self.z)
    }
}

/// A parameter interval on a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcOnCurve {
    pub curve: CurveParams,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl ArcOnCurve {
    pub fn new(curve: CurveParams, t_lo: f64, t_hi: f64) -> Result<Self> {
        if !(t_lo < t_hi) || t_hi - t_lo > TAU + 1e-12 {
            return Err(Error::Domain(format!("invalid parameter interval [{t_lo}, {t_hi}]")));
        }
        Ok(Self { curve, t_lo, t_hi })
    }

    pub fn point(&self, t: f64) -> Point {
        gamma(&self.curve, t)
    }

    pub fn start(&self) -> Point {
        self.point(self.t_lo)
    }

    pub fn end(&self) -> Point {
        self.point(self.t_hi)
    }

    pub fn length(&self) -> f64 {
        arc_length(self)
    }

    /// `n + 1` points at equal parameter steps from `t_lo` to `t_hi`.
    pub fn sample(&self, n: usize) -> Vec<Point> {
        let n = n.max(1);
        (0..=n)
            .map(|i| self.point(self.t_lo + (self.t_hi - self.t_lo) * i as f64 / n as f64))
            .collect()
    }

    /// Lowest and highest `y` along the arc.
    pub fn y_range(&self) -> (f64, f64) {
        let a = self.start().y;
        let b = self.end().y;
        let (mut lo, mut hi) = (a.min(b), a.max(b));
        let c = &self.curve;
        // y is minimal at even multiples of pi and maximal at odd ones.
        let first = (self.t_lo / PI).ceil() as i64;
        let last = (self.t_hi / PI).floor() as i64;
        for m in first..=last {
            if m.rem_euclid(2) == 0 {
                lo = lo.min(c.z);
            } else {
                hi = hi.max(c.z * (1.0 / c.h).exp());
            }
        }
        (lo, hi)
    }

    /// The same point set with the parameter shifted into `t_lo` in `[-pi, pi)`.
    pub fn normalized(&self) -> ArcOnCurve {
        let m = ((self.t_lo + PI) / TAU).floor();
        if m == 0.0 {
            return *self;
        }
        let c = self.curve;
        let shift = 2.0 * m * c.k() * s_pi(c.h);
        ArcOnCurve {
            curve: CurveParams { w: c.w + shift, ..c },
            t_lo: self.t_lo - TAU * m,
            t_hi: self.t_hi - TAU * m,
        }
    }
}

const PANEL: f64 = PI / 8.0;

fn panels_for(len: f64) -> usize {
    ((len.abs() / PANEL).ceil() as usize).max(1)
}

/// Derivative of `S_H`.
pub fn s_prime(h: f64, t: f64) -> f64 {
    let c = t.cos();
    -c * (-c * 0.5 / h).exp()
}

/// `int_a^b S_H'(t) dt` by a fixed Gauss-Legendre rule.
pub fn s_increment(h: f64, a: f64, b: f64) -> f64 {
    gauss_legendre(|t| s_prime(h, t), a, b, panels_for(b - a))
}

pub(crate) fn s_pi(h: f64) -> f64 {
    s_increment(h, 0.0, PI)
}

/// `S_H(t)`, reduced to `[-pi, pi]` through `S(2n pi + t0) = 2n S(pi) + S(t0)`.
pub fn s_function(h: f64, t: f64) -> f64 {
    let n = (t / TAU).round();
    let t0 = t - TAU * n;
    let local = s_increment(h, 0.0, t0);
    if n == 0.0 {
        local
    } else {
        2.0 * n * s_pi(h) + local
    }
}

/// `G_H(u) = int_{-1}^u g_H`, evaluated smoothly through `-S_H(acos(-u))`.
pub(crate) fn g_cumulative(h: f64, u: f64) -> f64 {
    -s_increment(h, 0.0, (-u.clamp(-1.0, 1.0)).acos())
}

/// `g_H(u) = -u e^{u/2H} / sqrt(1-u^2)`.
pub fn g_h(h: f64, u: f64) -> f64 {
    -u * (u * 0.5 / h).exp() / (1.0 - u * u).sqrt()
}

pub fn gamma(c: &CurveParams, t: f64) -> Point {
    let s = (0.5 * t).sin();
    Point::new(c.w + c.k() * s_function(c.h, t), c.z * (s * s / c.h).exp())
}

/// Which side of the loop `x_of_y` reads off. `Plus` is the half containing
/// `P2+`, i.e. parameters in `[-pi, 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn of_parameter(t: f64) -> Branch {
        let t0 = t - TAU * (t / TAU).round();
        if t0 <= 0.0 {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }
}

/// The curve as a graph over `y`: `x = w +- k int_{-1}^{2H ln(y/z) - 1} g_H`.
pub fn x_of_y(c: &CurveParams, y: f64, branch: Branch) -> Result<f64> {
    let top = c.z * (1.0 / c.h).exp();
    if !(y > c.z && y < top) {
        return Err(Error::Domain(format!("y = {y} outside ({}, {top})", c.z)));
    }
    let u = (2.0 * c.h * (y / c.z).ln() - 1.0).clamp(-1.0, 1.0);
    let g = integrate_g(c.h, -1.0, u, &QuadratureSpec { abs_tol: 1e-14, rel_tol: 1e-13, ..Default::default() })?;
    Ok(match branch {
        Branch::Plus => c.w + c.k() * g,
        Branch::Minus => c.w - c.k() * g,
    })
}

/// `|x'y'' - x''y' + (2H/y)(x'^2 + y'^2)^{3/2}|` by central differences with
/// step `1e-5 max(1, |t|)`. Increments are integrated directly so the
/// differences do not cancel.
pub fn curvature_residual(c: &CurveParams, t: f64) -> f64 {
    let hd = 1e-5 * t.abs().max(1.0);
    let k = c.k();
    let dxp = k * s_increment(c.h, t, t + hd);
    let dxm = k * s_increment(c.h, t, t - hd);
    let y = gamma(c, t).y;
    // y(t+d)/y(t) = exp((cos t - cos(t+d)) / 2H), cos a - cos b = -2 sin((a+b)/2) sin((a-b)/2)
    let dy = |d: f64| {
        let e = (t + 0.5 * d).sin() * (0.5 * d).sin() / c.h;
        y * e.exp_m1()
    };
    let (dyp, dym) = (dy(hd), dy(-hd));
    let x1 = (dxp - dxm) / (2.0 * hd);
    let x2 = (dxp + dxm) / (hd * hd);
    let y1 = (dyp - dym) / (2.0 * hd);
    let y2 = (dyp + dym) / (hd * hd);
    let lhs = x1 * y2 - x2 * y1;
    let rhs = -2.0 * c.h / y * (x1 * x1 + y1 * y1).powf(1.5);
    (lhs - rhs).abs()
}

/// Euclidean length `k int e^{-cos(t)/2H} dt`; this is the height-variable
/// integral `int e^{u/2H}/sqrt(1-u^2) du` after `u = -cos t`.
pub fn arc_length(arc: &ArcOnCurve) -> f64 {
    let c = &arc.curve;
    let inv = 0.5 / c.h;
    c.k() * gauss_legendre(|t: f64| (-t.cos() * inv).exp(), arc.t_lo, arc.t_hi, panels_for(arc.t_hi - arc.t_lo))
}

/// Parameter of the self-intersection `P3` on `[0, pi]`.
pub fn p3_parameter(t_h: f64) -> f64 {
    (-t_h).acos()
}

/// Embeddedness of an arc of parameter length at most `2 pi`.
///
/// Two parameters give the same point iff they are mirror images about some
/// `m pi` and `S(m pi + s) = S(m pi - s)`. For odd `m` this has no solution
/// with `0 < s <= pi`; for even `m` the only one is `s = acos(-T_H)`. An arc
/// whose endpoints coincide counts as not embedded.
pub fn is_embedded_with(arc: &ArcOnCurve, t_h: f64) -> bool {
    if arc.t_hi - arc.t_lo > TAU + 1e-12 {
        return false;
    }
    let t3 = p3_parameter(t_h);
    let first = (arc.t_lo / TAU).ceil() as i64;
    let last = (arc.t_hi / TAU).floor() as i64;
    for m in first..=last {
        let c = TAU * m as f64;
        let r = (c - arc.t_lo).min(arc.t_hi - c);
        if r >= t3 - 1e-12 {
            return false;
        }
    }
    true
}

pub fn is_embedded(arc: &ArcOnCurve) -> Result<bool> {
    let k = constants(arc.curve.h)?;
    Ok(is_embedded_with(arc, k.t))
}

/// Tabulated points of the loop through `(w, z)`.
#[derive(Debug, Clone, Copy)]
pub struct LoopPoints {
    pub p1: Point,
    pub p2_plus: Point,
    pub p2_minus: Point,
    pub p3: Point,
    pub p4_plus: Point,
    pub p4_minus: Point,
}

pub fn loop_points(c: &CurveParams, k: &CurveConstants) -> LoopPoints {
    let t3 = p3_parameter(k.t);
    LoopPoints {
        p1: gamma(c, 0.0),
        p2_plus: gamma(c, -PI / 2.0),
        p2_minus: gamma(c, PI / 2.0),
        p3: gamma(c, t3),
        p4_plus: gamma(c, PI),
        p4_minus: gamma(c, -PI),
    }
}

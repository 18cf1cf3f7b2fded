//! Small domains made from a rectangle whose corners are joined by two
//! `2H/y`-arcs and two half circles.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::curve::{
    above_arc, below_arcs, constants, g_cumulative, gamma, vertical_connectors, ArcOnCurve, CurveParams, Point,
};
use crate::numerics::{find_root, RootSpec};
use crate::{Error, Result};

use super::admissible::{domain_feasible, AdmissibleDomain};
use super::geometry::{
    distance_to_polygon, point_in_polygon, ArcKind, BoundaryArc, CircleArc, Geometry,
};

fn construction(inequality: &str, detail: String) -> Error {
    Error::construction(inequality, detail)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Argument(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn require_subsolution(dom: &AdmissibleDomain) -> Result<()> {
    if !domain_feasible(dom) {
        return Err(construction(
            "H <= sqrt(2) or the small-disk bound",
            "no bounded subsolution certified for the enclosing disk".into(),
        ));
    }
    Ok(())
}

fn circle(center: Point, radius: f64, lo: f64) -> Result<BoundaryArc> {
    BoundaryArc::new(ArcKind::C, Geometry::Circle(CircleArc::new(center, radius, lo, lo + PI)?), 1)
}

/// Domain with two A arcs and two half circles around the center `p`.
///
/// The square of diagonal `d` centered at `p` has its diagonal corners `q1`
/// (lower left) and `q2` (upper right). The vertical segments of length
/// `eps` centered at `q1`, `q2` are replaced by the arcs inside their slabs
/// that bend towards `p`, and the lower (upper) endpoints are joined by a
/// half circle of diameter `d` below (above) the diagonal. Arcs are
/// `[A1, C1, A2, C2]`.
pub fn build_b_empty(p: Point, d: f64, eps: f64, h: f64) -> Result<AdmissibleDomain> {
    check_positive("H", h)?;
    check_positive("d", d)?;
    check_positive("eps", eps)?;
    check_positive("y(p)", p.y)?;
    let c = constants(h)?;
    let bound = 2.0 * p.y / (3.0 + 2.0 * h);
    if !(d < bound) {
        return Err(construction("d < 2 y(p) / (3 + 2H)", format!("d = {d}, bound = {bound}")));
    }
    let off = d / (2.0 * SQRT_2);
    let q1 = Point::new(p.x - off, p.y - off);
    let q2 = Point::new(p.x + off, p.y + off);
    let eps_bound = q1.y * ((c.t * 0.5 / h).exp() - 1.0);
    let eps_name = "eps < y(q1) (e^{T_H/2H} - 1)";
    if !(eps < eps_bound) {
        return Err(construction(eps_name, format!("eps = {eps}, bound = {eps_bound}")));
    }
    let up = Point::new(0.0, 0.5 * eps);
    let (q1l, q1u) = (Point::new(q1.x, q1.y - up.y), Point::new(q1.x, q1.y + up.y));
    let (q2l, q2u) = (Point::new(q2.x, q2.y - up.y), Point::new(q2.x, q2.y + up.y));
    let slab = |lo: &Point, hi: &Point, i: usize| -> Result<ArcOnCurve> {
        vertical_connectors(lo, hi, h)
            .map(|v| v[i])
            .map_err(|e| construction(eps_name, e.to_string()))
    };
    // left-bulging at q1, right-bulging at q2: both bend towards p
    let a1 = slab(&q1l, &q1u, 1)?;
    let a2 = slab(&q2l, &q2u, 0)?;
    for (name, a) in [("A1", &a1), ("A2", &a2)] {
        if !(a.length() < 0.5 * d) {
            return Err(construction(
                "length(A_i) < d/2",
                format!("{name} has length {} >= {}", a.length(), 0.5 * d),
            ));
        }
    }
    let r = 0.5 * d;
    let arcs = vec![
        BoundaryArc::new(ArcKind::A, Geometry::Curve(a1), -1)?,
        circle(Point::new(p.x, p.y - up.y), r, 1.25 * PI)?,
        BoundaryArc::new(ArcKind::A, Geometry::Curve(a2), -1)?,
        circle(Point::new(p.x, p.y + up.y), r, 0.25 * PI)?,
    ];
    let dom = AdmissibleDomain { h, arcs, b_star: vec![] };
    dom.validate()?;
    require_subsolution(&dom)?;
    Ok(dom)
}

/// Where the tangent of the curve at the chosen point lies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TangencyCase {
    /// Neither horizontal nor vertical: a rectangle of diagonal `d` with two
    /// opposite corners on the curve, horizontal gaps of length `eps`.
    Generic { d: f64, eps: f64 },
    /// Vertical tangent: a thin rectangle of height `d` centered at the point,
    /// horizontal gaps of length `eps`.
    VerticalTangent { d: f64, eps: f64 },
    /// Horizontal tangent: a rectangle of vertical sides `height` and base
    /// `base` centered at the point.
    HorizontalTangent { height: f64, base: f64 },
}

/// Domain with two B arcs and two half circles around the point of `curve`
/// at parameter `p_param`. Arcs are `[B, C, B, C]` with companions stored.
pub fn build_a_empty(curve: CurveParams, p_param: f64, case: TangencyCase) -> Result<AdmissibleDomain> {
    let h = curve.h;
    let p = gamma(&curve, p_param);
    let (sn, cs) = p_param.sin_cos();
    let tol = 1e-9;
    match case {
        TangencyCase::Generic { d, eps } => {
            if sn.abs() <= tol || cs.abs() <= tol {
                return Err(Error::Argument("the tangent at the point is horizontal or vertical".into()));
            }
            check_positive("d", d)?;
            check_positive("eps", eps)?;
            let b1 = 2.0 * p.y / 3.0 * (1.0 - (-0.5 / h).exp());
            let b2 = 2.0 * p.y / (8.0 * h + 3.0);
            if !(d < b1.min(b2)) {
                return Err(construction(
                    "d < min{(2y(p)/3)(1 - e^{-1/2H}), 2y(p)/(8H+3)}",
                    format!("d = {d}, bound = {}", b1.min(b2)),
                ));
            }
            check_eps(p.y, eps, h)?;
            // corners at parameters p_param -+ delta with |q2 - q1| = d
            let chord = |dl: f64| gamma(&curve, p_param + dl).dist(&gamma(&curve, p_param - dl)) - d;
            let to_tangency = dist_to_multiple(p_param, FRAC_PI_2);
            if !(chord(to_tangency) > 0.0) {
                return Err(construction(
                    "the curve inside R is a graph in both directions",
                    format!("a chord of length {d} around the point passes a tangency point"),
                ));
            }
            let dl = find_root(chord, &RootSpec::new(0.0, to_tangency))?;
            let (qa, qb) = (gamma(&curve, p_param - dl), gamma(&curve, p_param + dl));
            let (lo, hi) = if qa.y < qb.y { (qa, qb) } else { (qb, qa) };
            let dom = horizontal_gap_domain(lo, hi, eps, h, d)?;
            check_curve_meets_b_only(&dom, &curve, p_param, 2.0 * dl)?;
            check_contains(&dom, &p)?;
            require_subsolution(&dom)?;
            Ok(dom)
        }
        TangencyCase::VerticalTangent { d, eps } => {
            if cs.abs() > tol {
                return Err(Error::Argument("the tangent at the point is not vertical".into()));
            }
            check_positive("d", d)?;
            check_positive("eps", eps)?;
            let b1 = p.y * (1.0 - (-0.5 / h).exp());
            let b2 = 2.0 * p.y / (8.0 * h + 1.0);
            if !(d < b1.min(b2)) {
                return Err(construction(
                    "d < min{y(p)(1 - e^{-1/2H}), 2y(p)/(8H+1)}",
                    format!("d = {d}, bound = {}", b1.min(b2)),
                ));
            }
            check_eps(p.y, eps, h)?;
            let lo = Point::new(p.x, p.y - 0.5 * d);
            let hi = Point::new(p.x, p.y + 0.5 * d);
            let dom = horizontal_gap_domain(lo, hi, eps, h, d)?;
            // dy/dt = y/2H at a vertical tangent: twice the half height
            let span = 2.0 * h * d / p.y;
            check_curve_meets_b_only(&dom, &curve, p_param, span)?;
            check_contains(&dom, &p)?;
            require_subsolution(&dom)?;
            Ok(dom)
        }
        TangencyCase::HorizontalTangent { height, base } => {
            if sn.abs() > tol {
                return Err(Error::Argument("the tangent at the point is not horizontal".into()));
            }
            check_positive("height", height)?;
            check_positive("base", base)?;
            let c = constants(h)?;
            let hb = 2.0 * p.y * (c.t / (4.0 * h)).tanh();
            if !(height < hb) {
                return Err(construction(
                    "h < 2 y(p) tanh(T_H/4H)",
                    format!("h = {height}, bound = {hb}"),
                ));
            }
            let bb = p.y / (4.0 * h + 1.0);
            if !(base <= bb) {
                return Err(construction("b <= y(p)/(4H+1)", format!("b = {base}, bound = {bb}")));
            }
            let (xl, xr) = (p.x - 0.5 * base, p.x + 0.5 * base);
            let (yl, yu) = (p.y - 0.5 * height, p.y + 0.5 * height);
            let side = |x: f64| -> Result<Vec<ArcOnCurve>> {
                vertical_connectors(&Point::new(x, yl), &Point::new(x, yu), h)
                    .map_err(|e| construction("h < 2 y(p) tanh(T_H/4H)", e.to_string()))
            };
            let (right, left) = (side(xr)?, side(xl)?);
            // bulging inwards: left-bulging on the right side and vice versa
            let (b_right, star_right) = (right[1], right[0]);
            let (b_left, star_left) = (left[0], left[1]);
            for (name, a) in [("B1", &b_right), ("B2", &b_left)] {
                if !(a.length() < 0.5 * base) {
                    return Err(construction(
                        "length(B_i) < b/2",
                        format!("{name} has length {} >= {}", a.length(), 0.5 * base),
                    ));
                }
            }
            let r = 0.5 * base;
            let arcs = vec![
                BoundaryArc::new(ArcKind::B, Geometry::Curve(b_right), 1)?,
                circle(Point::new(p.x, yu), r, 0.0)?,
                BoundaryArc::new(ArcKind::B, Geometry::Curve(b_left), 1)?,
                circle(Point::new(p.x, yl), r, PI)?,
            ];
            let dom = AdmissibleDomain { h, arcs, b_star: vec![(0, star_right), (2, star_left)] };
            dom.validate()?;
            // |dx/dt| = y/2H at a horizontal tangent: twice the half base
            let span = 2.0 * h * base / p.y;
            check_curve_meets_b_only(&dom, &curve, p_param, span)?;
            check_contains(&dom, &p)?;
            require_subsolution(&dom)?;
            Ok(dom)
        }
    }
}

fn check_eps(y: f64, eps: f64, h: f64) -> Result<()> {
    let l = (0.5 / h).exp() / (2.0 * h) * g_cumulative(h, 0.0);
    let bound = 2.0 * y * (-1.0 / h).exp() * l;
    if !(eps < bound) {
        return Err(construction("eps < 2 y(p) e^{-1/H} L_H", format!("eps = {eps}, bound = {bound}")));
    }
    Ok(())
}

/// Distance from `t` to the nearest multiple of `step`, measured forwards
/// and backwards, whichever is smaller.
fn dist_to_multiple(t: f64, step: f64) -> f64 {
    let r = t.rem_euclid(step);
    r.min(step - r)
}

/// Rectangle with lower corner `lo` and upper corner `hi` on a diagonal;
/// horizontal segments of length `eps` at both corners are replaced by arcs
/// bending into the domain, and the left (right) endpoints are joined by
/// half circles of diameter `d` on the left (right).
fn horizontal_gap_domain(lo: Point, hi: Point, eps: f64, h: f64, d: f64) -> Result<AdmissibleDomain> {
    let c = constants(h)?;
    let half = 0.5 * eps;
    let b_lo = above_arc(lo.x, lo.y, half, h)?;
    let below = below_arcs(hi.x, hi.y, half, h, &c)?;
    let b_hi = *below
        .first()
        .ok_or_else(|| construction("eps < 2 y(p) e^{-1/H} L_H", "no arc below the upper gap".into()))?;
    for (name, a) in [("B1", &b_lo), ("B2", &b_hi)] {
        if !(a.length() < 0.5 * d) {
            return Err(construction(
                "length(B_i) < d/2",
                format!("{name} has length {} >= {}", a.length(), 0.5 * d),
            ));
        }
    }
    let star_lo = *below_arcs(lo.x, lo.y, half, h, &c)?
        .first()
        .ok_or_else(|| construction("eps < 2 y(p) e^{-1/H} L_H", "no arc below the lower gap".into()))?;
    let star_hi = above_arc(hi.x, hi.y, half, h)?;
    let r = 0.5 * lo.dist(&hi);
    let m_right = Point::new(0.5 * (lo.x + hi.x) + half, 0.5 * (lo.y + hi.y));
    let m_left = Point::new(m_right.x - eps, m_right.y);
    let a_lo = (lo.y - m_right.y).atan2(lo.x + half - m_right.x);
    let arcs = vec![
        BoundaryArc::new(ArcKind::B, Geometry::Curve(b_lo), 1)?,
        circle(m_right, r, a_lo)?,
        BoundaryArc::new(ArcKind::B, Geometry::Curve(b_hi), 1)?,
        circle(m_left, r, a_lo + PI)?,
    ];
    let dom = AdmissibleDomain { h, arcs, b_star: vec![(0, star_lo), (2, star_hi)] };
    dom.validate()?;
    Ok(dom)
}

fn check_contains(dom: &AdmissibleDomain, p: &Point) -> Result<()> {
    let poly = dom.polygon(512);
    if point_in_polygon(p, &poly) || distance_to_polygon(p, &poly) <= 1e-9 * dom.diameter() {
        Ok(())
    } else {
        Err(Error::Geometry("the chosen point is not in the closure of the domain".into()))
    }
}

/// Crossings of the curve (parameters `p_param -+ span`) with the boundary
/// must all lie on B arcs.
fn check_curve_meets_b_only(dom: &AdmissibleDomain, curve: &CurveParams, p_param: f64, span: f64) -> Result<()> {
    let per = 512;
    let n = dom.arcs.len();
    let bpts: Vec<(usize, Point)> = (0..n)
        .flat_map(|i| {
            let s = dom.arcs[i].sample(per);
            s[..per].iter().map(move |p| (i, *p)).collect::<Vec<_>>()
        })
        .collect();
    let m = 4096;
    let cpts: Vec<Point> =
        (0..=m).map(|j| gamma(curve, p_param - span + 2.0 * span * j as f64 / m as f64)).collect();
    let diam = dom.diameter();
    let end_tol = 1e-9 * diam;
    let nb = bpts.len();
    for j in 0..m {
        let (a, b) = (cpts[j], cpts[j + 1]);
        for k in 0..nb {
            let (arc, c) = bpts[k];
            let d = bpts[(k + 1) % nb].1;
            if let Some(x) = seg_intersection(&a, &b, &c, &d) {
                if dom.arcs[arc].kind == ArcKind::B {
                    continue;
                }
                // touching a B arc endpoint counts as B
                let near_b = dom
                    .arcs
                    .iter()
                    .filter(|a| a.kind == ArcKind::B)
                    .any(|a| a.start().dist(&x) <= end_tol || a.end().dist(&x) <= end_tol);
                if !near_b {
                    return Err(construction(
                        "the curve meets the boundary only on the B arcs",
                        format!("crossing at ({}, {}) on a C arc", x.x, x.y),
                    ));
                }
            }
        }
    }
    Ok(())
}

fn seg_intersection(a: &Point, b: &Point, c: &Point, d: &Point) -> Option<Point> {
    let r = (b.x - a.x, b.y - a.y);
    let s = (d.x - c.x, d.y - c.y);
    let den = r.0 * s.1 - r.1 * s.0;
    if den == 0.0 {
        return None;
    }
    let t = ((c.x - a.x) * s.1 - (c.y - a.y) * s.0) / den;
    let u = ((c.x - a.x) * r.1 - (c.y - a.y) * r.0) / den;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some(a.lerp(b, t))
    } else {
        None
    }
}

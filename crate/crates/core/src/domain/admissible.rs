use crate::curve::{connectors, ArcOnCurve, CurveParams, Point};
use crate::{Error, Result};

use super::geometry::{
    check_closed, diameter, distance_to_polygon, point_in_polygon, polygon_self_intersects, polygonize,
    region_integral, signed_area, ArcKind, BoundaryArc, Geometry,
};

/// Samples per lens in the convexity check.
const LENS_SAMPLES: usize = 200;

/// A bounded domain whose boundary is a counterclockwise cycle of A, B and C
/// arcs, with a companion arc for every B arc.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleDomain {
    pub h: f64,
    pub arcs: Vec<BoundaryArc>,
    /// `(index of a B arc, its companion)`.
    pub b_star: Vec<(usize, ArcOnCurve)>,
}

impl AdmissibleDomain {
    /// Start point of each arc.
    pub fn vertices(&self) -> Vec<Point> {
        self.arcs.iter().map(|a| a.start()).collect()
    }

    pub fn kinds(&self) -> Vec<ArcKind> {
        self.arcs.iter().map(|a| a.kind).collect()
    }

    /// Endpoints of A and B arcs, without repetition, in boundary order.
    pub fn polygon_vertices(&self) -> Vec<Point> {
        let n = self.arcs.len();
        let mut out: Vec<Point> = Vec::new();
        for i in 0..n {
            let prev = &self.arcs[(i + n - 1) % n];
            let cur = &self.arcs[i];
            if prev.kind != ArcKind::C || cur.kind != ArcKind::C {
                out.push(cur.start());
            }
        }
        out
    }

    pub fn polygon(&self, per_arc: usize) -> Vec<Point> {
        polygonize(&self.arcs, per_arc)
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.polygon(64))
    }

    /// `int (1/y) da` over the domain.
    pub fn integral(&self) -> Result<f64> {
        region_integral(&self.arcs)
    }

    /// Total length of the arcs of one kind.
    pub fn length_of(&self, kind: ArcKind) -> f64 {
        self.arcs.iter().filter(|a| a.kind == kind).map(|a| a.length()).sum()
    }

    pub fn companion(&self, index: usize) -> Option<&ArcOnCurve> {
        self.b_star.iter().find(|(i, _)| *i == index).map(|(_, a)| a)
    }

    /// The boundary with every B arc replaced by its companion.
    pub fn star_arcs(&self) -> Result<Vec<BoundaryArc>> {
        let mut out = self.arcs.clone();
        for (i, a) in self.arcs.iter().enumerate() {
            if a.kind != ArcKind::B {
                continue;
            }
            let star = self
                .companion(i)
                .ok_or_else(|| Error::Geometry(format!("B arc {i} has no companion")))?;
            let orientation = if star.start().dist(&a.start()) <= star.end().dist(&a.start()) { 1 } else { -1 };
            out[i] = BoundaryArc::new(ArcKind::B, Geometry::Curve(*star), orientation)?;
        }
        Ok(out)
    }

    /// Dilation about the origin by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let sc = |a: &ArcOnCurve| -> Result<ArcOnCurve> {
            let c = CurveParams::new(a.curve.w * lambda, a.curve.z * lambda, a.curve.h)?;
            ArcOnCurve::new(c, a.t_lo, a.t_hi)
        };
        let mut arcs = Vec::with_capacity(self.arcs.len());
        for a in &self.arcs {
            let g = match a.geometry {
                Geometry::Curve(c) => Geometry::Curve(sc(&c)?),
                Geometry::Circle(mut c) => {
                    c.center = Point::new(c.center.x * lambda, c.center.y * lambda);
                    c.radius *= lambda;
                    Geometry::Circle(c)
                }
                Geometry::Segment(mut s) => {
                    s.a = Point::new(s.a.x * lambda, s.a.y * lambda);
                    s.b = Point::new(s.b.x * lambda, s.b.y * lambda);
                    Geometry::Segment(s)
                }
            };
            arcs.push(BoundaryArc { geometry: g, ..*a });
        }
        let b_star = self.b_star.iter().map(|(i, a)| Ok((*i, sc(a)?))).collect::<Result<_>>()?;
        Ok(Self { h: self.h, arcs, b_star })
    }

    /// Checks every structural requirement: closed, simple, counterclockwise,
    /// curvature of each kind, no two A (or B) arcs adjacent, companions.
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) {
            return Err(Error::Domain(format!("H must be positive, got {}", self.h)));
        }
        check_closed(&self.arcs)?;
        let poly = self.polygon(256);
        if polygon_self_intersects(&poly) {
            return Err(Error::Geometry("boundary intersects itself".into()));
        }
        if !(signed_area(&poly) > 0.0) {
            return Err(Error::Geometry("boundary is not counterclockwise".into()));
        }
        let n = self.arcs.len();
        for (i, a) in self.arcs.iter().enumerate() {
            check_kind(i, a, self.h)?;
            let next = &self.arcs[(i + 1) % n];
            if n > 1 && a.kind != ArcKind::C && a.kind == next.kind {
                return Err(Error::Geometry(format!("arcs {i} and {} are both {:?}", (i + 1) % n, a.kind)));
            }
        }
        for (i, a) in self.arcs.iter().enumerate() {
            if a.kind == ArcKind::B {
                let star = self
                    .companion(i)
                    .ok_or_else(|| Error::Geometry(format!("B arc {i} has no companion")))?;
                check_companion(self, i, star)?;
            }
        }
        for (i, _) in &self.b_star {
            if self.arcs.get(*i).map(|a| a.kind) != Some(ArcKind::B) {
                return Err(Error::Geometry(format!("companion stored for non-B arc {i}")));
            }
        }
        Ok(())
    }
}

fn check_kind(i: usize, a: &BoundaryArc, h: f64) -> Result<()> {
    let bad = |what: &str| Err(Error::Geometry(format!("arc {i} ({:?}): {what}", a.kind)));
    match a.kind {
        ArcKind::A | ArcKind::B => {
            let Geometry::Curve(c) = a.geometry else {
                return bad("must lie on a 2H/y-curve");
            };
            if (c.curve.h - h).abs() > 1e-12 * h {
                return bad("curve has a different H");
            }
            let want = if a.kind == ArcKind::A { -1 } else { 1 };
            if a.orientation != want {
                return bad("curvature has the wrong sign relative to the interior");
            }
        }
        ArcKind::C => {
            for j in 0..=32 {
                let u = j as f64 / 32.0;
                let need = 2.0 * h / a.point(u).y;
                if a.curvature(u) < need * (1.0 - 1e-12) {
                    return bad("curvature below 2H/y");
                }
            }
        }
    }
    Ok(())
}

/// Sign of the turning at every interior sample of a closed polygon:
/// `Some(+1)` / `Some(-1)` when all turns agree, `None` otherwise.
fn turning_sign(poly: &[Point]) -> Option<i8> {
    let n = poly.len();
    let (mut pos, mut neg) = (false, false);
    for i in 0..n {
        let (a, b, c) = (poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]);
        let cr = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
        let scale = a.dist(&b) * b.dist(&c);
        if cr > 1e-12 * scale {
            pos = true;
        } else if cr < -1e-12 * scale {
            neg = true;
        }
    }
    match (pos, neg) {
        (true, false) => Some(1),
        (false, true) => Some(-1),
        _ => None,
    }
}

/// Lens `B` followed by `B*` reversed, as a closed polygon.
fn lens_polygon(b: &BoundaryArc, star: &ArcOnCurve) -> Vec<Point> {
    let half = LENS_SAMPLES / 2;
    let mut poly = b.sample(half);
    poly.pop();
    let mut s = star.sample(half);
    if s[0].dist(&b.end()) > s[half].dist(&b.end()) {
        s.reverse();
    }
    s.pop();
    poly.extend(s);
    poly
}

/// Companion requirements: same endpoints, the lens lies outside the domain
/// and is convex.
fn check_companion(d: &AdmissibleDomain, i: usize, star: &ArcOnCurve) -> Result<()> {
    let b = &d.arcs[i];
    let poly = d.polygon(1024);
    let diam = diameter(&poly);
    lens_ok(b, star, &poly, diam).map(|_| ()).map_err(|m| Error::Geometry(format!("companion of arc {i}: {m}")))
}

fn lens_ok(b: &BoundaryArc, star: &ArcOnCurve, domain_poly: &[Point], diam: f64) -> std::result::Result<f64, String> {
    let tol = 1e-7 * diam.max(1e-300);
    let (p, q) = (b.start(), b.end());
    let (s, e) = (star.start(), star.end());
    let same = (s.dist(&p) < tol && e.dist(&q) < tol) || (s.dist(&q) < tol && e.dist(&p) < tol);
    if !same {
        return Err("endpoints differ".into());
    }
    let lens = lens_polygon(b, star);
    // The domain is to the left of B, so the lens must be to its right.
    let area = signed_area(&lens);
    if !(area < 0.0) {
        return Err("lens is on the domain side".into());
    }
    if turning_sign(&lens) != Some(-1) {
        return Err("lens is not convex".into());
    }
    let inner = 1e-6 * diam;
    for pt in star.sample(64).iter().skip(1).take(63) {
        if point_in_polygon(pt, domain_poly) && distance_to_polygon(pt, domain_poly) > inner {
            return Err("companion enters the domain".into());
        }
    }
    Ok(-area)
}

/// Companion of the B arc at `index`: among the `2H/y`-arcs joining its
/// endpoints, the one closing the smallest convex lens outside the domain.
pub fn b_star(domain: &AdmissibleDomain, index: usize) -> Result<ArcOnCurve> {
    let b = domain
        .arcs
        .get(index)
        .ok_or_else(|| Error::Argument(format!("no arc {index}")))?;
    if b.kind != ArcKind::B {
        return Err(Error::Argument(format!("arc {index} is not a B arc")));
    }
    let poly = domain.polygon(1024);
    let diam = diameter(&poly);
    let mut best: Option<(f64, ArcOnCurve)> = None;
    for c in connectors(&b.start(), &b.end(), domain.h)? {
        if let Ok(area) = lens_ok(b, &c, &poly, diam) {
            if best.as_ref().is_none_or(|(a, _)| area < *a) {
                best = Some((area, c));
            }
        }
    }
    best.map(|(_, c)| c)
        .ok_or_else(|| Error::Geometry(format!("no convex companion found for arc {index}")))
}

/// Whether the existence theorem for small domains applies to a domain
/// inside the disk of radius `r` centered at `(x0, y0 + r)`.
pub fn small_domain_feasible(h: f64, r: f64, y0: f64) -> bool {
    let s2 = std::f64::consts::SQRT_2;
    if h <= s2 {
        return true;
    }
    let q = (1.0 + 2.0 * r / y0).powf(s2);
    if q == 1.0 {
        return true;
    }
    h <= s2 * (q + 1.0) / (q - 1.0)
}

/// Disk data `(R, y0)` for [`small_domain_feasible`]: the disk circumscribing
/// the bounding box of the boundary, with `y0` its lowest height.
pub fn enclosing_disk(domain: &AdmissibleDomain) -> (f64, f64) {
    let poly = domain.polygon(256);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in &poly {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let r = 0.5 * (x1 - x0).hypot(y1 - y0);
    (r, 0.5 * (y0 + y1) - r)
}

/// [`small_domain_feasible`] for the disk of [`enclosing_disk`].
pub fn domain_feasible(domain: &AdmissibleDomain) -> bool {
    let (r, y0) = enclosing_disk(domain);
    if y0 > 0.0 {
        small_domain_feasible(domain.h, r, y0)
    } else {
        domain.h <= std::f64::consts::SQRT_2
    }
}

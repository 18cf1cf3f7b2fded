use serde::Serialize;

use crate::curve::{connectors, ArcOnCurve, Point};
use crate::{Error, Result};

use super::admissible::AdmissibleDomain;
use super::geometry::{
    boundary_form_integral, diameter, distance_to_polygon, point_in_polygon, polygon_self_intersects,
    polygonize, ArcKind, BoundaryArc, Geometry,
};

/// Most polygon vertices handled by [`enumerate_polygons`].
pub const MAX_VERTICES: usize = 12;
/// Samples per candidate side in the containment test.
const SIDE_SAMPLES: usize = 256;
/// Boundary segments in the containment test.
const BOUNDARY_SEGMENTS: usize = 4096;

/// A side of a polygon: a `2H/y`-arc traversed with `orientation`, either
/// a boundary arc of the domain (`boundary` is its index) or an interior one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolygonSide {
    pub arc: ArcOnCurve,
    pub orientation: i8,
    pub boundary: Option<usize>,
    pub kind: Option<ArcKind>,
}

impl PolygonSide {
    fn as_boundary_arc(&self) -> BoundaryArc {
        BoundaryArc {
            kind: self.kind.unwrap_or(ArcKind::C),
            geometry: Geometry::Curve(self.arc),
            orientation: self.orientation,
        }
    }

    fn reversed(&self) -> Self {
        Self { orientation: -self.orientation, ..*self }
    }
}

/// Closed curvilinear polygon with vertices among the A/B endpoints,
/// oriented counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissiblePolygon {
    pub sides: Vec<PolygonSide>,
    pub vertices: Vec<Point>,
    /// Total length of sides that are A arcs of the domain.
    pub alpha: f64,
    /// Total length of sides that are B arcs of the domain.
    pub beta: f64,
    pub perimeter: f64,
    /// `int (1/y) da` over the polygon.
    pub area_weight: f64,
    /// Whether the polygon is the whole domain.
    pub whole: bool,
}

impl AdmissiblePolygon {
    pub fn boundary(&self) -> Vec<BoundaryArc> {
        self.sides.iter().map(|s| s.as_boundary_arc()).collect()
    }
}

struct Containment {
    poly: Vec<Point>,
    tol: f64,
}

impl Containment {
    fn new(d: &AdmissibleDomain) -> Self {
        let per = BOUNDARY_SEGMENTS / d.arcs.len().max(1);
        let poly = polygonize(&d.arcs, per.max(1));
        let tol = 1e-6 * diameter(&poly);
        Self { poly, tol }
    }

    fn contains(&self, p: &Point) -> bool {
        point_in_polygon(p, &self.poly) || distance_to_polygon(p, &self.poly) <= self.tol
    }

    fn contains_arc(&self, a: &ArcOnCurve) -> bool {
        // a cheap early exit on a few points before the full sampling
        let coarse = a.sample(8);
        if !coarse.iter().all(|p| self.contains(p)) {
            return false;
        }
        a.sample(SIDE_SAMPLES).iter().all(|p| self.contains(p))
    }
}

fn same_point_set(a: &ArcOnCurve, b: &ArcOnCurve, tol: f64) -> bool {
    let pa = a.sample(16);
    let mut pb = b.sample(16);
    let fwd = pa.iter().zip(&pb).all(|(x, y)| x.dist(y) <= tol);
    pb.reverse();
    fwd || pa.iter().zip(&pb).all(|(x, y)| x.dist(y) <= tol)
}

/// Every admissible polygon of the domain: vertices among the endpoints of
/// the A and B arcs, sides that are boundary A/B arcs or `2H/y`-connectors
/// contained in the closed domain, simple and enclosing positive area.
pub fn enumerate_polygons(domain: &AdmissibleDomain) -> Result<Vec<AdmissiblePolygon>> {
    let verts = domain.polygon_vertices();
    let nv = verts.len();
    if nv > MAX_VERTICES {
        return Err(Error::Unsupported(format!("{nv} polygon vertices exceed the cap of {MAX_VERTICES}")));
    }
    if nv < 2 {
        return Ok(vec![]);
    }
    let cont = Containment::new(domain);
    let diam = diameter(&cont.poly);
    let vtol = 1e-7 * diam;
    let index_of = |p: &Point| verts.iter().position(|v| v.dist(p) <= vtol);

    // candidate sides per unordered pair, oriented from the lower index
    let mut cand: Vec<Vec<Vec<PolygonSide>>> = vec![vec![vec![]; nv]; nv];
    for (bi, b) in domain.arcs.iter().enumerate() {
        if b.kind == ArcKind::C {
            continue;
        }
        let Geometry::Curve(arc) = b.geometry else { continue };
        let (Some(i), Some(j)) = (index_of(&b.start()), index_of(&b.end())) else { continue };
        let side = PolygonSide { arc, orientation: b.orientation, boundary: Some(bi), kind: Some(b.kind) };
        let (lo, hi, side) = if i < j { (i, j, side) } else { (j, i, side.reversed()) };
        cand[lo][hi].push(side);
    }
    for i in 0..nv {
        for j in i + 1..nv {
            for arc in connectors(&verts[i], &verts[j], domain.h)? {
                if cand[i][j].iter().any(|s| same_point_set(&s.arc, &arc, 1e-7 * diam)) {
                    continue;
                }
                if !cont.contains_arc(&arc) {
                    continue;
                }
                let orientation = if arc.start().dist(&verts[i]) <= arc.end().dist(&verts[i]) { 1 } else { -1 };
                cand[i][j].push(PolygonSide { arc, orientation, boundary: None, kind: None });
            }
        }
    }
    let oriented = |a: usize, b: usize, k: usize| -> PolygonSide {
        if a < b {
            cand[a][b][k]
        } else {
            cand[b][a][k].reversed()
        }
    };
    let count = |a: usize, b: usize| if a < b { cand[a][b].len() } else { cand[b][a].len() };

    let n_boundary = domain.arcs.len();
    let has_c = domain.arcs.iter().any(|a| a.kind == ArcKind::C);
    let mut out = Vec::new();
    let mut consider = |sides: Vec<PolygonSide>, vs: &[usize]| {
        if let Some(p) = finish_polygon(sides, vs, &verts, domain.h, n_boundary, has_c) {
            out.push(p);
        }
    };

    // two vertices: two distinct sides between them
    for i in 0..nv {
        for j in i + 1..nv {
            let c = &cand[i][j];
            for a in 0..c.len() {
                for b in a + 1..c.len() {
                    consider(vec![c[a], c[b].reversed()], &[i, j]);
                }
            }
        }
    }
    // k >= 3: cycles starting at their smallest vertex, with one of the two
    // directions fixed by comparing the second and last vertices
    for k in 3..=nv {
        let mut cycle = Vec::with_capacity(k);
        for first in 0..nv {
            cycle.clear();
            cycle.push(first);
            cycles(first, k, nv, &mut cycle, &mut |cyc| {
                if cyc[1] > cyc[k - 1] {
                    return;
                }
                let counts: Vec<usize> = (0..k).map(|m| count(cyc[m], cyc[(m + 1) % k])).collect();
                if counts.contains(&0) {
                    return;
                }
                let mut choice = vec![0usize; k];
                loop {
                    let sides = (0..k).map(|m| oriented(cyc[m], cyc[(m + 1) % k], choice[m])).collect();
                    consider(sides, cyc);
                    let mut m = 0;
                    while m < k {
                        choice[m] += 1;
                        if choice[m] < counts[m] {
                            break;
                        }
                        choice[m] = 0;
                        m += 1;
                    }
                    if m == k {
                        break;
                    }
                }
            });
        }
    }
    Ok(out)
}

fn cycles(first: usize, k: usize, nv: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for v in first + 1..nv {
        if cur.contains(&v) {
            continue;
        }
        cur.push(v);
        cycles(first, k, nv, cur, f);
        cur.pop();
    }
}

fn finish_polygon(
    mut sides: Vec<PolygonSide>,
    vs: &[usize],
    verts: &[Point],
    h: f64,
    n_boundary: usize,
    has_c: bool,
) -> Option<AdmissiblePolygon> {
    let arcs: Vec<BoundaryArc> = sides.iter().map(|s| s.as_boundary_arc()).collect();
    let poly = polygonize(&arcs, 128);
    if polygon_self_intersects(&poly) {
        return None;
    }
    let mut integral = boundary_form_integral(&arcs);
    let mut vertices: Vec<Point> = vs.iter().map(|&i| verts[i]).collect();
    if integral < 0.0 {
        sides.reverse();
        for s in sides.iter_mut() {
            *s = s.reversed();
        }
        vertices.reverse();
        integral = -integral;
    }
    let perimeter: f64 = sides.iter().map(|s| s.arc.length()).sum();
    // degenerate: no enclosed area at the scale of the perimeter
    let ymax = poly.iter().map(|p| p.y).fold(0.0, f64::max);
    if !(integral * ymax > 1e-12 * perimeter * perimeter) {
        return None;
    }
    let len_of = |k: ArcKind| {
        sides
            .iter()
            .filter(|s| s.boundary.is_some() && s.kind == Some(k))
            .fold(0.0, |acc, s| acc + s.arc.length())
    };
    let whole = !has_c && sides.len() == n_boundary && sides.iter().all(|s| s.boundary.is_some());
    let _ = h;
    Some(AdmissiblePolygon {
        alpha: len_of(ArcKind::A),
        beta: len_of(ArcKind::B),
        perimeter,
        area_weight: integral,
        vertices,
        sides,
        whole,
    })
}

/// Which of the three existence theorems the conditions come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    /// No B arcs: `2 alpha < l + 2H I` for every polygon.
    BEmpty,
    /// No A arcs: `2 beta < l - 2H I` for every polygon.
    AEmpty,
    /// No C arcs: `alpha = beta + 2H I` on the domain and both strict
    /// inequalities on every other polygon.
    CEmpty,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::BEmpty => "b-empty",
            Mode::AEmpty => "a-empty",
            Mode::CEmpty => "c-empty",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b-empty" => Ok(Mode::BEmpty),
            "a-empty" => Ok(Mode::AEmpty),
            "c-empty" => Ok(Mode::CEmpty),
            _ => Err(Error::Argument(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolygonRow {
    pub vertices: usize,
    pub alpha: f64,
    pub beta: f64,
    pub perimeter: f64,
    pub area_weight: f64,
    /// `l + 2H I - 2 alpha`, when the inequality applies.
    pub slack_alpha: Option<f64>,
    /// `l - 2H I - 2 beta`, when the inequality applies.
    pub slack_beta: Option<f64>,
    pub whole: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub mode: Mode,
    pub rows: Vec<PolygonRow>,
    /// `alpha - beta - 2H I` of the whole domain (C-empty mode).
    pub balance: Option<f64>,
    pub balance_tol: Option<f64>,
    pub pass: bool,
    /// First failing row, if any.
    pub violating: Option<usize>,
}

/// Relative slack tolerance: an inequality holds when its slack exceeds
/// `TOL_SLACK * l`.
pub const TOL_SLACK: f64 = 1e-8;
/// Relative tolerance of the balance equality, against `alpha`.
pub const TOL_EQ: f64 = 1e-6;

/// Evaluates the inequalities of the selected theorem on every polygon.
pub fn check_conditions(domain: &AdmissibleDomain, mode: Mode) -> Result<ConditionReport> {
    let has = |k: ArcKind| domain.arcs.iter().any(|a| a.kind == k);
    let excluded = match mode {
        Mode::BEmpty => ArcKind::B,
        Mode::AEmpty => ArcKind::A,
        Mode::CEmpty => ArcKind::C,
    };
    if has(excluded) {
        return Err(Error::Argument(format!("{} mode needs a domain without {excluded:?} arcs", mode.name())));
    }
    let polys = enumerate_polygons(domain)?;
    let h = domain.h;
    let mut rows = Vec::with_capacity(polys.len());
    for p in &polys {
        let tol = TOL_SLACK * p.perimeter;
        let two_hi = 2.0 * h * p.area_weight;
        let sa = p.perimeter + two_hi - 2.0 * p.alpha;
        let sb = p.perimeter - two_hi - 2.0 * p.beta;
        let (slack_alpha, slack_beta) = match mode {
            Mode::BEmpty => (Some(sa), None),
            Mode::AEmpty => (None, Some(sb)),
            Mode::CEmpty if p.whole => (None, None),
            Mode::CEmpty => (Some(sa), Some(sb)),
        };
        let pass = slack_alpha.is_none_or(|s| s > tol) && slack_beta.is_none_or(|s| s > tol);
        rows.push(PolygonRow {
            vertices: p.vertices.len(),
            alpha: p.alpha,
            beta: p.beta,
            perimeter: p.perimeter,
            area_weight: p.area_weight,
            slack_alpha,
            slack_beta,
            whole: p.whole,
            pass,
        });
    }
    let (balance, balance_tol) = if mode == Mode::CEmpty {
        let alpha = domain.length_of(ArcKind::A);
        let beta = domain.length_of(ArcKind::B);
        let b = alpha - beta - 2.0 * h * domain.integral()?;
        (Some(b), Some(TOL_EQ * alpha))
    } else {
        (None, None)
    };
    let balance_ok = match (balance, balance_tol) {
        (Some(b), Some(t)) => b.abs() <= t,
        _ => true,
    };
    let violating = rows.iter().position(|r| !r.pass);
    Ok(ConditionReport { mode, rows, balance, balance_tol, pass: balance_ok && violating.is_none(), violating })
}

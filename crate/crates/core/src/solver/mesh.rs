use std::collections::{HashMap, HashSet};

use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use crate::curve::Point;
use crate::domain::{diameter, polygonize, AdmissibleDomain, BoundaryArc};
use crate::{Error, Result};

/// Triangulation of a domain with boundary edges tagged by source arc.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Point>,
    /// Counterclockwise node triples.
    pub triangles: Vec<[usize; 3]>,
    /// `(a, b, arc)`: boundary edge from `a` to `b` (counterclockwise
    /// along the boundary) on arc `arc`.
    pub boundary_edges: Vec<(usize, usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshQuality {
    pub min_angle_deg: f64,
    pub max_edge: f64,
    pub min_area: f64,
}

/// Minimum angle requested from the refinement.
pub const MIN_ANGLE_DEG: f64 = 25.0;

fn tri_area(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}

/// Points along an arc spaced evenly in arc length, with chords at most `h`.
/// The end point is omitted.
fn arc_points(a: &BoundaryArc, h: f64) -> Vec<Point> {
    let m = 2048;
    let pts = a.sample(m);
    let mut cum = vec![0.0; m + 1];
    for i in 1..=m {
        cum[i] = cum[i - 1] + pts[i].dist(&pts[i - 1]);
    }
    let total = cum[m];
    let n = ((total / h).ceil() as usize).max(1);
    let mut out = Vec::with_capacity(n);
    let mut j = 0;
    for k in 0..n {
        let s = total * k as f64 / n as f64;
        while j + 1 < m && cum[j + 1] < s {
            j += 1;
        }
        let seg = cum[j + 1] - cum[j];
        let f = if seg > 0.0 { (s - cum[j]) / seg } else { 0.0 };
        out.push(a.point((j as f64 + f) / m as f64));
    }
    out
}

impl Mesh {
    /// Constrained Delaunay mesh of the region bounded by a closed
    /// counterclockwise list of arcs. Boundary chords are at most `h` and
    /// interior triangles have area at most that of an equilateral triangle
    /// of side `h`; boundary edges are not split.
    pub fn from_boundary(arcs: &[BoundaryArc], h: f64) -> Result<Self> {
        if !(h > 0.0) || arcs.is_empty() {
            return Err(Error::Argument("mesh size must be positive and the boundary nonempty".into()));
        }
        let coarse = polygonize(arcs, 64);
        let diam = diameter(&coarse);
        if !(h < 0.25 * diam) {
            return Err(Error::Argument(format!("mesh size {h} is not below diam/4 = {}", 0.25 * diam)));
        }
        let mut pts: Vec<Point> = Vec::new();
        let mut arc_of_edge = Vec::new();
        for (i, a) in arcs.iter().enumerate() {
            let p = arc_points(a, h);
            arc_of_edge.extend(std::iter::repeat_n(i, p.len()));
            pts.extend(p);
        }
        let nb = pts.len();
        let edges: Vec<[usize; 2]> = (0..nb).map(|i| [i, (i + 1) % nb]).collect();
        let verts: Vec<Point2<f64>> = pts.iter().map(|p| Point2::new(p.x, p.y)).collect();
        let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::bulk_load_cdt(verts, edges)
            .map_err(|e| Error::Mesh(format!("triangulation failed: {e:?}")))?;
        if cdt.num_vertices() != nb {
            return Err(Error::Mesh("boundary points coincide".into()));
        }
        let max_area = 3f64.sqrt() / 4.0 * h * h;
        let res = cdt.refine(
            RefinementParameters::<f64>::new()
                .exclude_outer_faces(true)
                .keep_constraint_edges()
                .with_angle_limit(AngleLimit::from_deg(MIN_ANGLE_DEG))
                .with_max_allowed_area(max_area)
                .with_max_additional_vertices(400 * nb + (40.0 * diam * diam / (h * h)) as usize),
        );
        if !res.refinement_complete {
            return Err(Error::Mesh("refinement ran out of vertices".into()));
        }
        let outer: HashSet<_> = res.excluded_faces.iter().copied().collect();
        let mut index = HashMap::new();
        let mut nodes = Vec::new();
        // boundary points keep their indices
        for v in cdt.vertices().take(nb) {
            index.insert(v.fix(), nodes.len());
            nodes.push(pts[nodes.len()]);
        }
        let mut triangles = Vec::new();
        for f in cdt.inner_faces() {
            if outer.contains(&f.fix()) {
                continue;
            }
            let mut tri = [0usize; 3];
            for (k, v) in f.vertices().iter().enumerate() {
                let id = *index.entry(v.fix()).or_insert_with(|| {
                    let p = v.position();
                    nodes.push(Point::new(p.x, p.y));
                    nodes.len() - 1
                });
                tri[k] = id;
            }
            triangles.push(tri);
        }
        let boundary_edges = (0..nb).map(|i| (i, (i + 1) % nb, arc_of_edge[i])).collect();
        let mesh = Mesh { nodes, triangles, boundary_edges };
        mesh.check()?;
        Ok(mesh)
    }

    /// Structural checks: positive triangles, boundary edges on exactly one
    /// triangle, nodes in the upper half-plane.
    pub fn check(&self) -> Result<()> {
        for (k, t) in self.triangles.iter().enumerate() {
            let [a, b, c] = t.map(|i| self.nodes[i]);
            if !(tri_area(&a, &b, &c) > 0.0) {
                return Err(Error::Mesh(format!("triangle {k} is not positively oriented")));
            }
        }
        if let Some(p) = self.nodes.iter().find(|p| !(p.y > 0.0)) {
            return Err(Error::Mesh(format!("node at y = {} is not above the axis", p.y)));
        }
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *count.entry((t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        for &(a, b, _) in &self.boundary_edges {
            // the interior lies to the left of a -> b, so the triangle has a -> b
            if count.get(&(a, b)) != Some(&1) || count.contains_key(&(b, a)) {
                return Err(Error::Mesh(format!("edge ({a}, {b}) is not a boundary edge of the mesh")));
            }
        }
        let nb = self.boundary_edges.len();
        for (k, &(_, b, _)) in self.boundary_edges.iter().enumerate() {
            if self.boundary_edges[(k + 1) % nb].0 != b {
                return Err(Error::Mesh("boundary edges do not form a closed loop".into()));
            }
        }
        let mut unmatched = 0;
        for (&(a, b), _) in count.iter() {
            if !count.contains_key(&(b, a)) {
                unmatched += 1;
            }
        }
        if unmatched != nb {
            return Err(Error::Mesh(format!("{unmatched} mesh boundary edges but {nb} tagged edges")));
        }
        Ok(())
    }

    pub fn quality(&self) -> MeshQuality {
        let mut q = MeshQuality { min_angle_deg: 180.0, max_edge: 0.0, min_area: f64::INFINITY };
        for t in &self.triangles {
            let p = t.map(|i| self.nodes[i]);
            q.min_area = q.min_area.min(tri_area(&p[0], &p[1], &p[2]));
            for k in 0..3 {
                let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
                q.max_edge = q.max_edge.max(a.dist(&b));
                let (u, v) = ((b.x - a.x, b.y - a.y), (c.x - a.x, c.y - a.y));
                let ang = (u.0 * v.1 - u.1 * v.0).atan2(u.0 * v.0 + u.1 * v.1).abs();
                q.min_angle_deg = q.min_angle_deg.min(ang.to_degrees());
            }
        }
        q
    }

    /// Arc identifiers of the edges at each boundary node; empty for
    /// interior nodes.
    pub fn node_arcs(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for &(a, b, arc) in &self.boundary_edges {
            for n in [a, b] {
                if !out[n].contains(&arc) {
                    out[n].push(arc);
                }
            }
        }
        out
    }

    pub fn is_boundary(&self) -> Vec<bool> {
        let mut out = vec![false; self.nodes.len()];
        for &(a, b, _) in &self.boundary_edges {
            out[a] = true;
            out[b] = true;
        }
        out
    }

    pub fn arc_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.boundary_edges.iter().map(|e| e.2).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Weighted area `sum over triangles of area / y(centroid)`.
    pub fn integral(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let p = t.map(|i| self.nodes[i]);
                tri_area(&p[0], &p[1], &p[2]) * 3.0 / (p[0].y + p[1].y + p[2].y)
            })
            .sum()
    }

    /// Euclidean length of the polygonal boundary on an arc.
    pub fn arc_length(&self, arc: usize) -> f64 {
        self.boundary_edges
            .iter()
            .filter(|e| e.2 == arc)
            .map(|&(a, b, _)| self.nodes[a].dist(&self.nodes[b]))
            .sum()
    }

    /// Linear interpolation of a nodal field at `p`, or `None` outside.
    pub fn locate(&self, p: &Point) -> Option<(usize, [f64; 3])> {
        let tol = -1e-12;
        for (k, t) in self.triangles.iter().enumerate() {
            let [a, b, c] = t.map(|i| self.nodes[i]);
            let area = tri_area(&a, &b, &c);
            let l0 = tri_area(p, &b, &c) / area;
            let l1 = tri_area(&a, p, &c) / area;
            let l2 = 1.0 - l0 - l1;
            if l0 >= tol && l1 >= tol && l2 >= tol {
                return Some((k, [l0, l1, l2]));
            }
        }
        None
    }

    pub fn interpolate(&self, values: &[f64], p: &Point) -> Option<f64> {
        let (k, l) = self.locate(p)?;
        let t = self.triangles[k];
        Some(l[0] * values[t[0]] + l[1] * values[t[1]] + l[2] * values[t[2]])
    }
}

/// [`Mesh::from_boundary`] on the boundary of an admissible domain.
pub fn make_mesh(domain: &AdmissibleDomain, h: f64) -> Result<Mesh> {
    Mesh::from_boundary(&domain.arcs, h)
}

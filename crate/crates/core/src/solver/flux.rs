//! Flux of a discrete solution across boundary arcs and interior paths.
//!
//! The flux density across a curve with unit normal `nu` is
//! `y^2 (grad u . nu) / W`, which never exceeds 1 in absolute value.

use crate::curve::Point;
use crate::domain::{region_integral, ArcKind, BoundaryArc, Geometry, Segment};
use crate::{Error, Result};

use super::fem::{w_of, Elements};
use super::mesh::Mesh;

const GAUSS2: [(f64, f64); 2] = [(0.211_324_865_405_187_1, 0.5), (0.788_675_134_594_812_9, 0.5)];

#[derive(Debug, Clone, PartialEq)]
pub struct FluxReport {
    /// Arc identifiers in increasing order.
    pub arcs: Vec<usize>,
    pub flux: Vec<f64>,
    /// Euclidean length of the meshed arc.
    pub length: Vec<f64>,
    /// Largest edgewise density magnitude on each arc.
    pub max_density: Vec<f64>,
    /// `2H I(Omega)` on the mesh.
    pub area_term: f64,
    /// `sum(flux) - 2H I(Omega)`.
    pub balance: f64,
}

impl FluxReport {
    pub fn flux_of(&self, arc: usize) -> Option<f64> {
        self.arcs.iter().position(|&a| a == arc).map(|k| self.flux[k])
    }

    pub fn length_of(&self, arc: usize) -> Option<f64> {
        self.arcs.iter().position(|&a| a == arc).map(|k| self.length[k])
    }
}

/// Adjacent triangle of each directed boundary edge.
fn edge_triangles(mesh: &Mesh) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    for (k, t) in mesh.triangles.iter().enumerate() {
        for i in 0..3 {
            map.insert((t[i], t[(i + 1) % 3]), k);
        }
    }
    mesh.boundary_edges.iter().map(|&(a, b, _)| map[&(a, b)]).collect()
}

/// Flux and peak density across the directed segment `a -> b` with the
/// constant gradient `g`; the normal points to the right of the direction.
fn segment_flux(a: &Point, b: &Point, g: [f64; 2]) -> (f64, f64) {
    let len = a.dist(b);
    if len == 0.0 {
        return (0.0, 0.0);
    }
    let nu = [(b.y - a.y) / len, -(b.x - a.x) / len];
    let gn = g[0] * nu[0] + g[1] * nu[1];
    let mut total = 0.0;
    let mut peak = 0.0f64;
    for (s, wt) in GAUSS2 {
        let y = a.y + s * (b.y - a.y);
        let dens = y * y * gn / w_of(y, g);
        peak = peak.max(dens.abs());
        total += wt * len * dens;
    }
    (total, peak)
}

/// Outward flux across every boundary arc, using the gradient of the
/// triangle adjacent to each boundary edge.
pub fn flux_report(mesh: &Mesh, u: &[f64], h: f64) -> Result<FluxReport> {
    if u.len() != mesh.nodes.len() {
        return Err(Error::Argument("field must have one value per node".into()));
    }
    let el = Elements::new(mesh);
    let tri = edge_triangles(mesh);
    let arcs = mesh.arc_ids();
    let mut flux = vec![0.0; arcs.len()];
    let mut max_density = vec![0.0f64; arcs.len()];
    for (e, &(a, b, arc)) in mesh.boundary_edges.iter().enumerate() {
        let k = arcs.binary_search(&arc).unwrap();
        let g = el.gradient(mesh, tri[e], u);
        let (f, peak) = segment_flux(&mesh.nodes[a], &mesh.nodes[b], g);
        flux[k] += f;
        max_density[k] = max_density[k].max(peak);
    }
    let length = arcs.iter().map(|&a| mesh.arc_length(a)).collect();
    let area_term = 2.0 * h * mesh.integral();
    let balance = flux.iter().sum::<f64>() - area_term;
    Ok(FluxReport { arcs, flux, length, max_density, area_term, balance })
}

/// Outward flux across one boundary arc.
pub fn flux(mesh: &Mesh, u: &[f64], arc: usize) -> Result<f64> {
    if !mesh.boundary_edges.iter().any(|e| e.2 == arc) {
        return Err(Error::Argument(format!("arc {arc} is not on the mesh boundary")));
    }
    let r = flux_report(mesh, u, 0.0)?;
    Ok(r.flux_of(arc).unwrap())
}

/// The boundary polyline of an arc, in boundary order.
fn arc_polyline(mesh: &Mesh, arc: usize) -> Result<Vec<Point>> {
    let edges: Vec<_> = mesh.boundary_edges.iter().filter(|e| e.2 == arc).collect();
    if edges.is_empty() {
        return Err(Error::Argument(format!("arc {arc} is not on the mesh boundary")));
    }
    // the edges of one arc are consecutive up to a cyclic shift
    let nb = mesh.boundary_edges.len();
    let first = (0..nb)
        .find(|&i| mesh.boundary_edges[i].2 == arc && mesh.boundary_edges[(i + nb - 1) % nb].2 != arc)
        .unwrap_or(0);
    let mut pts = vec![mesh.nodes[mesh.boundary_edges[first].0]];
    for k in 0..edges.len() {
        let e = mesh.boundary_edges[(first + k) % nb];
        if e.2 != arc {
            return Err(Error::Argument(format!("arc {arc} is not contiguous on the boundary")));
        }
        pts.push(mesh.nodes[e.1]);
    }
    Ok(pts)
}

/// Parameter interval of the part of `a -> b` inside the triangle `tri`
/// (counterclockwise), if it has positive length.
fn clip_segment(a: &Point, b: &Point, tri: [Point; 3]) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for k in 0..3 {
        let (p, q) = (tri[k], tri[(k + 1) % 3]);
        // inside: cross(q - p, x - p) >= 0
        let side = |x: &Point| (q.x - p.x) * (x.y - p.y) - (q.y - p.y) * (x.x - p.x);
        let (fa, fb) = (side(a), side(b));
        if fa < 0.0 && fb < 0.0 {
            return None;
        }
        if fa < 0.0 {
            lo = lo.max(fa / (fa - fb));
        } else if fb < 0.0 {
            hi = hi.min(fa / (fa - fb));
        }
    }
    (hi > lo).then_some((lo, hi))
}

/// `2H I(Delta) - (flux across eta)`, where `eta` is a polyline inside the
/// mesh from the end of `arc` back to its start and `Delta` is the region
/// bounded by the arc and `eta`.
pub fn flux_via_path(mesh: &Mesh, u: &[f64], h: f64, arc: usize, eta: &[Point]) -> Result<f64> {
    let poly = arc_polyline(mesh, arc)?;
    let (start, end) = (poly[0], poly[poly.len() - 1]);
    let scale = poly.iter().map(|p| p.dist(&start)).fold(0.0, f64::max).max(1e-300);
    if eta.len() < 2 || eta[0].dist(&end) > 1e-9 * scale || eta[eta.len() - 1].dist(&start) > 1e-9 * scale {
        return Err(Error::Argument("eta must run from the end of the arc to its start".into()));
    }
    let el = Elements::new(mesh);
    let mut total = 0.0;
    let mut covered = 0.0;
    let mut length = 0.0;
    for w in eta.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = a.dist(&b);
        if len == 0.0 {
            continue;
        }
        length += len;
        let nu = [(b.y - a.y) / len, -(b.x - a.x) / len];
        // the gradient is constant on each triangle: clip the segment
        for (k, t) in mesh.triangles.iter().enumerate() {
            let Some((t0, t1)) = clip_segment(&a, &b, t.map(|i| mesh.nodes[i])) else { continue };
            let g = el.gradient(mesh, k, u);
            covered += (t1 - t0) * len;
            for (s, wt) in GAUSS2 {
                let p = a.lerp(&b, t0 + s * (t1 - t0));
                total += wt * (t1 - t0) * len * p.y * p.y * (g[0] * nu[0] + g[1] * nu[1]) / w_of(p.y, g);
            }
        }
    }
    if (covered - length).abs() > 1e-9 * length {
        return Err(Error::Argument("eta leaves the mesh".into()));
    }
    // region Delta: the arc polyline followed by eta
    let mut ring: Vec<Point> = poly.clone();
    ring.extend_from_slice(&eta[1..eta.len() - 1]);
    let mut segs = Vec::with_capacity(ring.len());
    for i in 0..ring.len() {
        let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
        if a.dist(&b) > 0.0 {
            segs.push(BoundaryArc::new(ArcKind::C, Geometry::Segment(Segment { a, b }), 1)?);
        }
    }
    let area = region_integral(&segs)?;
    if !(area > 0.0) {
        return Err(Error::Argument("arc and eta do not bound a counterclockwise region".into()));
    }
    Ok(2.0 * h * area - total)
}

/// Largest pairwise difference between the path-based fluxes of `arc` over
/// the variants in `etas`.
pub fn flux_eta_independence(mesh: &Mesh, u: &[f64], h: f64, arc: usize, etas: &[Vec<Point>]) -> Result<f64> {
    let vals = etas.iter().map(|e| flux_via_path(mesh, u, h, arc, e)).collect::<Result<Vec<_>>>()?;
    let mut diff = 0.0f64;
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            diff = diff.max((vals[i] - vals[j]).abs());
        }
    }
    Ok(diff)
}

//! Text formats for meshes and nodal fields.

use std::fmt::Write as _;

use crate::curve::Point;
use crate::domain::{format_real, parse_real};
use crate::{Error, Result};

use super::mesh::Mesh;

/// Node count, `x y` lines, triangle count, index triples, boundary edge
/// count, `i j arc` lines.
pub fn mesh_to_text(mesh: &Mesh) -> String {
    let mut s = String::new();
    writeln!(s, "{}", mesh.nodes.len()).unwrap();
    for p in &mesh.nodes {
        writeln!(s, "{} {}", format_real(p.x), format_real(p.y)).unwrap();
    }
    writeln!(s, "{}", mesh.triangles.len()).unwrap();
    for t in &mesh.triangles {
        writeln!(s, "{} {} {}", t[0], t[1], t[2]).unwrap();
    }
    writeln!(s, "{}", mesh.boundary_edges.len()).unwrap();
    for (a, b, arc) in &mesh.boundary_edges {
        writeln!(s, "{a} {b} {arc}").unwrap();
    }
    s
}

pub fn mesh_from_text(text: &str) -> Result<Mesh> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let mut next = |what: &str| lines.next().ok_or_else(|| Error::Parse(format!("unexpected end of mesh file in {what}")));
    let count = |l: &str| l.parse::<usize>().map_err(|e| Error::Parse(format!("bad count {l:?}: {e}")));
    let ints = |l: &str, k: usize| -> Result<Vec<usize>> {
        let v = l.split_whitespace().map(|t| t.parse::<usize>()).collect::<std::result::Result<Vec<_>, _>>();
        match v {
            Ok(v) if v.len() == k => Ok(v),
            _ => Err(Error::Parse(format!("expected {k} indices in {l:?}"))),
        }
    };
    let n = count(next("node count")?)?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let l = next("nodes")?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 2 {
            return Err(Error::Parse(format!("expected two coordinates in {l:?}")));
        }
        nodes.push(Point::new(parse_real(f[0])?, parse_real(f[1])?));
    }
    let nt = count(next("triangle count")?)?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let v = ints(next("triangles")?, 3)?;
        triangles.push([v[0], v[1], v[2]]);
    }
    let ne = count(next("boundary edge count")?)?;
    let mut boundary_edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        let v = ints(next("boundary edges")?, 3)?;
        boundary_edges.push((v[0], v[1], v[2]));
    }
    if triangles.iter().flatten().chain(boundary_edges.iter().flat_map(|e| [&e.0, &e.1])).any(|&i| i >= n) {
        return Err(Error::Parse("node index out of range".into()));
    }
    let mesh = Mesh { nodes, triangles, boundary_edges };
    mesh.check()?;
    Ok(mesh)
}

/// CSV with header `node_index,x,y,u`.
pub fn field_to_csv(mesh: &Mesh, u: &[f64]) -> String {
    let mut s = String::from("node_index,x,y,u\n");
    for (i, (p, v)) in mesh.nodes.iter().zip(u).enumerate() {
        writeln!(s, "{i},{},{},{}", format_real(p.x), format_real(p.y), format_real(*v)).unwrap();
    }
    s
}

/// Values of a field CSV, in node order.
pub fn field_from_csv(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("node_index,x,y,u") {
        return Err(Error::Parse("missing field header".into()));
    }
    let mut out = Vec::new();
    for (k, l) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != 4 || f[0].trim().parse::<usize>().ok() != Some(k) {
            return Err(Error::Parse(format!("bad field row {l:?}")));
        }
        out.push(parse_real(f[3])?);
    }
    Ok(out)
}

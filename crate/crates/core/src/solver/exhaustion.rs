//! Sequences of Dirichlet solutions with boundary data `+-n` on the A and B
//! arcs, and the level shift used when there are no C arcs.

use crate::curve::Point;
use crate::domain::{AdmissibleDomain, ArcKind, Mode};
use crate::{Error, Result};

use super::fem::{boundary_from_arcs, DirichletProblem, SolverOptions};
use super::flux::{flux_report, FluxReport};
use super::mesh::Mesh;

/// Tolerance for the nodewise monotonicity check.
pub const MONOTONE_TOL: f64 = 1e-8;

/// One member of the sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustionStep {
    pub n: f64,
    /// Nodal values; in C-empty mode already shifted by `mu`.
    pub values: Vec<f64>,
    pub probe_values: Vec<f64>,
    pub probe_min: f64,
    pub probe_max: f64,
    pub flux: FluxReport,
    /// Level shift, C-empty mode only.
    pub mu: Option<f64>,
    pub newton_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustionReport {
    pub mode: Mode,
    pub steps: Vec<ExhaustionStep>,
    /// `monotone[k]`: step `k + 1` lies above (A-empty: below) step `k` at
    /// every node, before any level shift.
    pub monotone: Vec<bool>,
    /// Number of nodes violating the ordering, per consecutive pair.
    pub monotone_violations: Vec<usize>,
    /// Set when a solve failed; the steps before it are kept.
    pub failure: Option<String>,
}

/// Mesh on which the sequence is solved: the domain itself in B-empty mode,
/// the domain with B arcs replaced by their companions otherwise.
pub fn exhaustion_mesh(domain: &AdmissibleDomain, mode: Mode, h: f64) -> Result<Mesh> {
    match mode {
        Mode::BEmpty => Mesh::from_boundary(&domain.arcs, h),
        Mode::AEmpty | Mode::CEmpty => Mesh::from_boundary(&domain.star_arcs()?, h),
    }
}

/// Boundary data for a given `n`; `c_data` is used on C arcs. Nodes where
/// two arcs meet get the mean of the two values.
fn boundary_data(mesh: &Mesh, kinds: &[ArcKind], mode: Mode, n: f64, c_data: &dyn Fn(&Point) -> f64) -> Vec<f64> {
    let v = |arc: usize, p: &Point| match (mode, kinds[arc]) {
        (Mode::BEmpty, ArcKind::A) => n,
        (Mode::BEmpty, _) => c_data(p).min(n),
        (Mode::AEmpty, ArcKind::B) => -n,
        (Mode::AEmpty, _) => c_data(p).max(-n),
        (Mode::CEmpty, ArcKind::A) => n,
        (Mode::CEmpty, _) => 0.0,
    };
    boundary_from_arcs(mesh, &v)
}

/// Smallest level `c` at which the components of `{w > c}` that contain
/// distinct A arcs are still disjoint: nodes enter in decreasing order of
/// `w` and `mu` is the value at which two A groups first connect.
pub fn level_shift(mesh: &Mesh, w: &[f64], kinds: &[ArcKind]) -> Option<f64> {
    let n = mesh.nodes.len();
    let node_arcs = mesh.node_arcs();
    let mut parent: Vec<usize> = (0..n).collect();
    // A arc owning each component root, or None
    let mut label: Vec<Option<usize>> = vec![None; n];
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut adj = vec![Vec::new(); n];
    for t in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
    let mut added = vec![false; n];
    for &i in &order {
        added[i] = true;
        let own: Vec<usize> = node_arcs[i].iter().copied().filter(|&a| kinds[a] == ArcKind::A).collect();
        if own.len() > 1 {
            return Some(w[i]);
        }
        label[i] = own.first().copied();
        for &j in &adj[i] {
            if !added[j] {
                continue;
            }
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri == rj {
                continue;
            }
            match (label[ri], label[rj]) {
                (Some(a), Some(b)) if a != b => return Some(w[i]),
                (li, lj) => {
                    parent[rj] = ri;
                    label[ri] = li.or(lj);
                }
            }
        }
    }
    None
}

/// Solves the sequence for increasing `n_values`, each solve starting from
/// the previous solution. `probes` are points at which values are recorded.
pub fn solve_exhaustion(
    domain: &AdmissibleDomain,
    mesh: &Mesh,
    n_values: &[f64],
    mode: Mode,
    c_data: &dyn Fn(&Point) -> f64,
    probes: &[Point],
    opts: &SolverOptions,
) -> Result<ExhaustionReport> {
    if n_values.is_empty() || n_values.windows(2).any(|w| !(w[1] > w[0])) || !(n_values[0] >= 0.0) {
        return Err(Error::Argument("n values must be nonnegative and strictly increasing".into()));
    }
    let cap = 1e6 * domain.diameter().max(1.0);
    if n_values.iter().any(|&n| n > cap) {
        return Err(Error::Argument(format!("n values are capped at {cap}")));
    }
    let kinds = domain.kinds();
    if mesh.arc_ids().iter().any(|&a| a >= kinds.len()) {
        return Err(Error::Argument("mesh arc tags do not match the domain".into()));
    }
    let present = |k: ArcKind| kinds.contains(&k);
    let excluded = match mode {
        Mode::BEmpty => ArcKind::B,
        Mode::AEmpty => ArcKind::A,
        Mode::CEmpty => ArcKind::C,
    };
    if present(excluded) {
        return Err(Error::Argument(format!("{} mode on a domain with {excluded:?} arcs", mode.name())));
    }
    let locs = probes
        .iter()
        .map(|p| mesh.locate(p).ok_or_else(|| Error::Argument(format!("probe ({}, {}) is outside the mesh", p.x, p.y))))
        .collect::<Result<Vec<_>>>()?;
    let problem = DirichletProblem::new(mesh, domain.h)?;
    let base = if mode == Mode::CEmpty {
        let bd = boundary_data(mesh, &kinds, mode, 0.0, c_data);
        Some(problem.solve(&bd, opts)?.values)
    } else {
        None
    };
    let mut report = ExhaustionReport { mode, steps: Vec::new(), monotone: Vec::new(), monotone_violations: Vec::new(), failure: None };
    let mut prev: Option<Vec<f64>> = None;
    for &n in n_values {
        let bd = boundary_data(mesh, &kinds, mode, n, c_data);
        let sol = match &prev {
            Some(p) => problem.solve_from(p.clone(), &bd, opts),
            None => problem.solve(&bd, opts),
        };
        let sol = match sol {
            Ok(s) => s,
            Err(e) => {
                report.failure = Some(format!("n = {n}: {e}"));
                break;
            }
        };
        let v = sol.values;
        if let Some(p) = &prev {
            let bad = v
                .iter()
                .zip(p)
                .filter(|(a, b)| match mode {
                    Mode::AEmpty => **a > **b + MONOTONE_TOL,
                    _ => **a < **b - MONOTONE_TOL,
                })
                .count();
            report.monotone.push(bad == 0);
            report.monotone_violations.push(bad);
        }
        let mu = base.as_ref().map(|v0| {
            let w: Vec<f64> = v.iter().zip(v0).map(|(a, b)| a - b).collect();
            level_shift(mesh, &w, &kinds).unwrap_or(0.0)
        });
        let values: Vec<f64> = match mu {
            Some(m) => v.iter().map(|x| x - m).collect(),
            None => v.clone(),
        };
        let probe_values: Vec<f64> = locs
            .iter()
            .map(|(k, l)| {
                let t = mesh.triangles[*k];
                l[0] * values[t[0]] + l[1] * values[t[1]] + l[2] * values[t[2]]
            })
            .collect();
        let probe_min = probe_values.iter().copied().fold(f64::INFINITY, f64::min);
        let probe_max = probe_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let flux = flux_report(mesh, &values, domain.h)?;
        report.steps.push(ExhaustionStep {
            n,
            values,
            probe_values,
            probe_min,
            probe_max,
            flux,
            mu,
            newton_steps: sol.report.newton_steps,
        });
        prev = Some(v);
    }
    Ok(report)
}

/// Interior nodes whose value in the last step exceeds `cutoff` in absolute
/// value.
pub fn divergence_mask(report: &ExhaustionReport, mesh: &Mesh, cutoff: f64) -> Result<Vec<bool>> {
    let last = report.steps.last().ok_or_else(|| Error::Argument("empty exhaustion report".into()))?;
    let bnd = mesh.is_boundary();
    Ok(last.values.iter().zip(bnd).map(|(v, b)| !b && v.abs() > cutoff).collect())
}

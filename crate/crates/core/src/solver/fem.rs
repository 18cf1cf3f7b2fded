//! Piecewise-linear Galerkin discretization of
//! `div(y^2 grad u / W) = 2H/y`, `W = sqrt(1 + y^4 |grad u|^2)`,
//! in Euclidean coordinates, with one-point quadrature at centroids.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{Mat, Par, Side};

use crate::curve::Point;
use crate::{Error, Result};

use super::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Bound on the max-norm of the residual at free nodes.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Smallest step fraction tried by the backtracking line search.
    pub damping_min: f64,
    /// Take a frozen-coefficient step when the line search fails.
    pub picard_fallback: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { newton_tol: 1e-10, max_newton: 200, damping_min: 1.0 / 1024.0, picard_fallback: true }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.newton_tol > 0.0) || !(self.damping_min > 0.0 && self.damping_min <= 1.0) || self.max_newton == 0 {
            return Err(Error::Argument(format!("invalid solver options {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub newton_steps: usize,
    pub picard_steps: usize,
    /// Max-norm of the free-node residual before each step and at the end.
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Nodal values.
    pub values: Vec<f64>,
    pub report: SolveReport,
}

/// Per-triangle data: area, basis gradients and centroid height.
#[derive(Debug, Clone)]
pub(crate) struct Elements {
    pub area: Vec<f64>,
    pub grad: Vec<[[f64; 2]; 3]>,
    pub yc: Vec<f64>,
}

impl Elements {
    pub fn new(mesh: &Mesh) -> Self {
        let n = mesh.triangles.len();
        let mut e = Elements { area: Vec::with_capacity(n), grad: Vec::with_capacity(n), yc: Vec::with_capacity(n) };
        for t in &mesh.triangles {
            let [a, b, c] = t.map(|i| mesh.nodes[i]);
            let det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
            let g = [
                [(b.y - c.y) / det, (c.x - b.x) / det],
                [(c.y - a.y) / det, (a.x - c.x) / det],
                [(a.y - b.y) / det, (b.x - a.x) / det],
            ];
            e.area.push(0.5 * det);
            e.grad.push(g);
            e.yc.push((a.y + b.y + c.y) / 3.0);
        }
        e
    }

    pub fn gradient(&self, mesh: &Mesh, k: usize, u: &[f64]) -> [f64; 2] {
        let t = mesh.triangles[k];
        let g = &self.grad[k];
        let mut out = [0.0; 2];
        for i in 0..3 {
            out[0] += u[t[i]] * g[i][0];
            out[1] += u[t[i]] * g[i][1];
        }
        out
    }
}

/// `W = sqrt(1 + y^4 |G|^2)`.
#[inline]
pub fn w_of(y: f64, g: [f64; 2]) -> f64 {
    let y2 = y * y;
    (1.0 + y2 * y2 * (g[0] * g[0] + g[1] * g[1])).sqrt()
}

/// Weak-form residual at every node (boundary rows included):
/// `sum_T area (y^2 G . grad phi_i / W + (2H/y)/3) + load_i`.
pub(crate) fn nodal_residual(mesh: &Mesh, el: &Elements, u: &[f64], h: f64, load: Option<&[f64]>) -> Vec<f64> {
    let mut r = match load {
        Some(l) => l.to_vec(),
        None => vec![0.0; mesh.nodes.len()],
    };
    for (k, t) in mesh.triangles.iter().enumerate() {
        let g = el.gradient(mesh, k, u);
        let y = el.yc[k];
        let s = y * y / w_of(y, g);
        let q = [s * g[0], s * g[1]];
        let src = 2.0 * h / y / 3.0;
        for i in 0..3 {
            let gi = el.grad[k][i];
            r[t[i]] += el.area[k] * (q[0] * gi[0] + q[1] * gi[1] + src);
        }
    }
    r
}

/// Residual of the discrete equation at the interior nodes, in node order.
pub fn residual(mesh: &Mesh, u: &[f64], h: f64) -> Vec<f64> {
    let el = Elements::new(mesh);
    let r = nodal_residual(mesh, &el, u, h, None);
    let bnd = mesh.is_boundary();
    r.into_iter().zip(bnd).filter(|(_, b)| !b).map(|(v, _)| v).collect()
}

/// `int F phi_i` with the edge-midpoint rule on each triangle.
pub fn assemble_load(mesh: &Mesh, f: &dyn Fn(&Point) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; mesh.nodes.len()];
    for t in &mesh.triangles {
        let p = t.map(|i| mesh.nodes[i]);
        let area = 0.5 * ((p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y));
        for k in 0..3 {
            let (a, b) = (k, (k + 1) % 3);
            let m = p[a].lerp(&p[b], 0.5);
            let v = f(&m) * area / 3.0 * 0.5;
            out[t[a]] += v;
            out[t[b]] += v;
        }
    }
    out
}

/// Sparse symmetric system on the free nodes with a fixed pattern.
struct System {
    n: usize,
    symbolic: SymbolicSparseColMat<usize>,
    llt_symbolic: SymbolicLlt<usize>,
    /// Value slot of each local pair `(i, j)` of each triangle, or `usize::MAX`.
    slots: Vec<[usize; 9]>,
}

impl System {
    fn new(mesh: &Mesh, free_index: &[usize]) -> Result<Self> {
        let n = free_index.iter().filter(|&&i| i != usize::MAX).count();
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
        for t in &mesh.triangles {
            for &a in t {
                for &b in t {
                    let (i, j) = (free_index[a], free_index[b]);
                    if i != usize::MAX && j != usize::MAX {
                        cols[j].push(i);
                    }
                }
            }
        }
        let mut col_ptr = vec![0usize; n + 1];
        let mut row_idx = Vec::new();
        for (j, c) in cols.iter_mut().enumerate() {
            c.sort_unstable();
            c.dedup();
            row_idx.extend_from_slice(c);
            col_ptr[j + 1] = row_idx.len();
        }
        let slots = mesh
            .triangles
            .iter()
            .map(|t| {
                let mut s = [usize::MAX; 9];
                for a in 0..3 {
                    for b in 0..3 {
                        let (i, j) = (free_index[t[a]], free_index[t[b]]);
                        if i != usize::MAX && j != usize::MAX {
                            let rows = &row_idx[col_ptr[j]..col_ptr[j + 1]];
                            s[3 * a + b] = col_ptr[j] + rows.binary_search(&i).unwrap();
                        }
                    }
                }
                s
            })
            .collect();
        let symbolic = SymbolicSparseColMat::new_checked(n, n, col_ptr, None, row_idx);
        let llt_symbolic = SymbolicLlt::try_new(symbolic.as_ref(), Side::Lower)
            .map_err(|e| Error::Solver { message: format!("symbolic factorization: {e:?}"), residual_history: vec![] })?;
        Ok(Self { n, symbolic, llt_symbolic, slots })
    }

    fn solve(&self, values: Vec<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
        let mat = SparseColMat::new(self.symbolic.clone(), values);
        let llt = Llt::try_new_with_symbolic(self.llt_symbolic.clone(), mat.as_ref(), Side::Lower)
            .map_err(|e| Error::Solver { message: format!("factorization: {e:?}"), residual_history: vec![] })?;
        let mut b = Mat::<f64>::from_fn(self.n, 1, |i, _| rhs[i]);
        llt.solve_in_place(b.as_mut());
        Ok((0..self.n).map(|i| b[(i, 0)]).collect())
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Linearization {
    Newton,
    Frozen,
}

/// Nonlinear Dirichlet solver on a fixed mesh.
pub struct DirichletProblem<'a> {
    mesh: &'a Mesh,
    el: Elements,
    h: f64,
    load: Option<Vec<f64>>,
    free: Vec<usize>,
    free_index: Vec<usize>,
    system: System,
}

impl<'a> DirichletProblem<'a> {
    pub fn new(mesh: &'a Mesh, h: f64) -> Result<Self> {
        if !(h >= 0.0) || !h.is_finite() {
            return Err(Error::Argument(format!("H must be nonnegative, got {h}")));
        }
        faer::set_global_parallelism(Par::Seq);
        let bnd = mesh.is_boundary();
        let free: Vec<usize> = (0..mesh.nodes.len()).filter(|&i| !bnd[i]).collect();
        let mut free_index = vec![usize::MAX; mesh.nodes.len()];
        for (k, &i) in free.iter().enumerate() {
            free_index[i] = k;
        }
        let system = System::new(mesh, &free_index)?;
        Ok(Self { mesh, el: Elements::new(mesh), h, load: None, free, free_index, system })
    }

    /// Adds `int F phi` to the residual, i.e. solves `div(y^2 grad u / W) = 2H/y + F`.
    pub fn with_forcing(mut self, f: &dyn Fn(&Point) -> f64) -> Self {
        self.load = Some(assemble_load(self.mesh, f));
        self
    }

    pub fn free_nodes(&self) -> &[usize] {
        &self.free
    }

    fn residual_free(&self, u: &[f64]) -> (Vec<f64>, f64) {
        let r = nodal_residual(self.mesh, &self.el, u, self.h, self.load.as_deref());
        let rf: Vec<f64> = self.free.iter().map(|&i| r[i]).collect();
        let norm = rf.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (rf, norm)
    }

    /// Matrix values on the free nodes and the coupling `K_fb u_b` for the
    /// frozen-coefficient operator (when `kind` is `Frozen`), or the
    /// Jacobian (when `Newton`).
    fn matrix(&self, u: &[f64], kind: Linearization, coeff_one: bool) -> (Vec<f64>, Vec<f64>) {
        let mut vals = vec![0.0; self.system.symbolic.row_idx().len()];
        let mut coupling = vec![0.0; self.system.n];
        for (k, t) in self.mesh.triangles.iter().enumerate() {
            let y = self.el.yc[k];
            let g = self.el.gradient(self.mesh, k, u);
            let w = if coeff_one { 1.0 } else { w_of(y, g) };
            let a = y * y / w;
            // A = a (I - b G G^T / W^2) for Newton, a I when frozen
            let mut m = [[a, 0.0], [0.0, a]];
            if kind == Linearization::Newton && !coeff_one {
                let c = a * y.powi(4) / (w * w);
                m[0][0] -= c * g[0] * g[0];
                m[0][1] -= c * g[0] * g[1];
                m[1][0] -= c * g[1] * g[0];
                m[1][1] -= c * g[1] * g[1];
            }
            let gr = &self.el.grad[k];
            let area = self.el.area[k];
            for i in 0..3 {
                for j in 0..3 {
                    let gi = gr[i];
                    let gj = gr[j];
                    let v = area
                        * (gi[0] * (m[0][0] * gj[0] + m[0][1] * gj[1]) + gi[1] * (m[1][0] * gj[0] + m[1][1] * gj[1]));
                    let slot = self.system.slots[k][3 * i + j];
                    if slot != usize::MAX {
                        vals[slot] += v;
                    } else {
                        let (fi, fj) = (self.free_index[t[i]], self.free_index[t[j]]);
                        if fi != usize::MAX && fj == usize::MAX {
                            coupling[fi] += v * u[t[j]];
                        }
                    }
                }
            }
        }
        (vals, coupling)
    }

    /// Frozen-coefficient update: `K(w) u_new = -(source + load)` with the
    /// boundary values of `u`. With `coeff_one` the coefficient is `y^2`.
    fn frozen_step(&self, u: &[f64], coeff_one: bool) -> Result<Vec<f64>> {
        let (vals, coupling) = self.matrix(u, Linearization::Frozen, coeff_one);
        // residual of the operator part is K u; the rest is source + load
        let mut zero_free = u.to_vec();
        for &i in &self.free {
            zero_free[i] = 0.0;
        }
        let mut rest = vec![0.0; self.mesh.nodes.len()];
        if let Some(l) = &self.load {
            rest.copy_from_slice(l);
        }
        for (k, t) in self.mesh.triangles.iter().enumerate() {
            let src = 2.0 * self.h / self.el.yc[k] / 3.0 * self.el.area[k];
            for &i in t {
                rest[i] += src;
            }
        }
        let rhs: Vec<f64> = self.free.iter().enumerate().map(|(k, &i)| -rest[i] - coupling[k]).collect();
        let sol = self.system.solve(vals, &rhs)?;
        let mut out = u.to_vec();
        for (k, &i) in self.free.iter().enumerate() {
            out[i] = sol[k];
        }
        Ok(out)
    }

    /// Initial guess: the linear problem with `W = 1`.
    pub fn initial_guess(&self, boundary: &[f64]) -> Result<Vec<f64>> {
        if boundary.len() != self.mesh.nodes.len() || boundary.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("boundary data must be finite with one value per node".into()));
        }
        self.frozen_step(boundary, true)
    }

    /// Solves with the boundary values of `boundary` (interior entries are
    /// ignored) starting from the `W = 1` solution.
    pub fn solve(&self, boundary: &[f64], opts: &SolverOptions) -> Result<Solution> {
        opts.validate()?;
        let u0 = self.initial_guess(boundary)?;
        self.solve_from(u0, boundary, opts)
    }

    /// Solves starting from `guess`, whose boundary values are replaced by
    /// those of `boundary`.
    pub fn solve_from(&self, guess: Vec<f64>, boundary: &[f64], opts: &SolverOptions) -> Result<Solution> {
        opts.validate()?;
        if boundary.len() != self.mesh.nodes.len() || guess.len() != self.mesh.nodes.len() {
            return Err(Error::Argument("boundary data must have one value per node".into()));
        }
        if boundary.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("boundary data must be finite".into()));
        }
        let mut u = boundary.to_vec();
        for &i in &self.free {
            u[i] = guess[i];
        }
        let mut report = SolveReport { newton_steps: 0, picard_steps: 0, residual_history: Vec::new() };
        let (mut rf, mut norm) = self.residual_free(&u);
        report.residual_history.push(norm);
        if self.free.is_empty() {
            return Ok(Solution { values: u, report });
        }
        for _ in 0..opts.max_newton {
            if norm <= opts.newton_tol {
                return Ok(Solution { values: u, report });
            }
            let (vals, _) = self.matrix(&u, Linearization::Newton, false);
            let rhs: Vec<f64> = rf.iter().map(|v| -v).collect();
            let delta = self.system.solve(vals, &rhs)?;
            let mut lambda = 1.0;
            let mut accepted = false;
            while lambda >= opts.damping_min {
                let mut trial = u.clone();
                for (k, &i) in self.free.iter().enumerate() {
                    trial[i] += lambda * delta[k];
                }
                let (r2, n2) = self.residual_free(&trial);
                if n2 < norm {
                    u = trial;
                    rf = r2;
                    norm = n2;
                    accepted = true;
                    report.newton_steps += 1;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted {
                if !opts.picard_fallback {
                    break;
                }
                let next = self.frozen_step(&u, false)?;
                let (r2, n2) = self.residual_free(&next);
                if !(n2.is_finite()) {
                    break;
                }
                u = next;
                rf = r2;
                norm = n2;
                report.picard_steps += 1;
            }
            report.residual_history.push(norm);
        }
        if norm <= opts.newton_tol {
            return Ok(Solution { values: u, report });
        }
        Err(Error::Solver {
            message: format!("no convergence: residual {norm:.3e} after {} iterations", report.residual_history.len() - 1),
            residual_history: report.residual_history,
        })
    }
}

/// Boundary values from a function of position; interior entries are zero.
pub fn boundary_from_fn(mesh: &Mesh, f: &dyn Fn(&Point) -> f64) -> Vec<f64> {
    let bnd = mesh.is_boundary();
    mesh.nodes.iter().zip(bnd).map(|(p, b)| if b { f(p) } else { 0.0 }).collect()
}

/// Boundary values given per arc as a function of position. A node shared
/// by two arcs gets the mean of their values.
pub fn boundary_from_arcs(mesh: &Mesh, per_arc: &dyn Fn(usize, &Point) -> f64) -> Vec<f64> {
    mesh.node_arcs()
        .iter()
        .zip(&mesh.nodes)
        .map(|(arcs, p)| {
            if arcs.is_empty() {
                0.0
            } else {
                arcs.iter().map(|&a| per_arc(a, p)).sum::<f64>() / arcs.len() as f64
            }
        })
        .collect()
}

/// One-shot Dirichlet solve.
pub fn solve_dirichlet(mesh: &Mesh, boundary: &[f64], h: f64, opts: &SolverOptions) -> Result<Solution> {
    DirichletProblem::new(mesh, h)?.solve(boundary, opts)
}

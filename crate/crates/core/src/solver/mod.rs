//! Finite-element solver for the constant mean curvature graph equation,
//! fluxes and exhaustion sequences.

mod barrier;
mod exhaustion;
mod fem;
mod flux;
mod io;
mod mesh;

pub use barrier::{barrier_profile, barrier_ratio, supersolution_lhs, supersolution_lhs_laplacian};
pub use exhaustion::{
    divergence_mask, exhaustion_mesh, level_shift, solve_exhaustion, ExhaustionReport, ExhaustionStep, MONOTONE_TOL,
};
pub use fem::{
    assemble_load, boundary_from_arcs, boundary_from_fn, residual, solve_dirichlet, w_of, DirichletProblem, Solution,
    SolveReport, SolverOptions,
};
pub use flux::{flux, flux_eta_independence, flux_report, flux_via_path, FluxReport};
pub use io::{field_from_csv, field_to_csv, mesh_from_text, mesh_to_text};
pub use mesh::{make_mesh, Mesh, MeshQuality, MIN_ANGLE_DEG};

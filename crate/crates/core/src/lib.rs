//! Constant mean curvature graphs over the warped half-plane model of Sol3.
//!
//! The crate is layered bottom-up:
//!
//! - [`numerics`]: quadrature with the `u = -cos(theta)` substitution, bracketed roots.
//! - [`curve`]: the curves of Euclidean curvature `2H/y`, their constants and connectors.
//! - [`domain`]: admissible domains, polygons and the length/area conditions.
//! - [`solver`]: P1 finite elements for `div(y^2 grad u / W) = 2H/y`, fluxes and exhaustion.

pub mod curve;
pub mod domain;
pub mod error;
pub mod numerics;
pub mod solver;

pub use error::{Error, Result};

//! Quadrature, root finding and small numeric helpers.

mod identity;
mod quad;
mod roots;

pub use identity::{vector_identity_residual, IdentityResidual};
pub use quad::{gauss_kronrod, gauss_legendre, integrate_g, integrate_speed, QuadResult, QuadratureSpec};
pub use roots::{find_root, scan_and_refine, RootSpec};

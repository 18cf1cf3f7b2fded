//! Admissible domains: boundary arcs of kinds A, B, C, the weighted area
//! `I = int (1/y) da`, the three constructions, admissible polygons and the
//! length/area conditions of the existence theorems.

mod admissible;
mod build;
mod geometry;
mod io;
mod omega;
mod polygons;

pub use admissible::{b_star, domain_feasible, enclosing_disk, small_domain_feasible, AdmissibleDomain};
pub use build::{build_a_empty, build_b_empty, TangencyCase};
pub use geometry::{
    boundary_form_integral, check_closed, diameter, point_in_polygon, polygon_self_intersects, polygonize,
    region_integral, signed_area, ArcKind, BoundaryArc, CircleArc, Geometry, Segment,
};
pub use io::{domain_from_json, domain_to_json, format_real, parse_real};
pub use omega::{
    build_omega_s, d_of_s, d_residual, e_of_s, e_residual, omega_data, phi_of_s, phi_residual, s_star, s_zero,
    OmegaData, SStar,
};
pub use polygons::{
    check_conditions, enumerate_polygons, AdmissiblePolygon, ConditionReport, Mode, PolygonRow, PolygonSide,
    MAX_VERTICES, TOL_EQ, TOL_SLACK,
};

//! The profile `w(r) = -r^a` of the local barriers along boundary arcs.

use crate::{Error, Result};

/// `(w, w', w'')` for `w(r) = -r^a`.
pub fn barrier_profile(a: f64, r: f64) -> Result<(f64, f64, f64)> {
    if !(a > 0.0 && a < 0.5) {
        return Err(Error::Argument(format!("exponent must lie in (0, 1/2), got {a}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Argument(format!("distance must be positive, got {r}")));
    }
    Ok((-r.powf(a), -a * r.powf(a - 1.0), -a * (a - 1.0) * r.powf(a - 2.0)))
}

/// `|w'' / w'^3|` on each grid point.
pub fn barrier_ratio(a: f64, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter()
        .map(|&r| barrier_profile(a, r).map(|(_, d1, d2)| (d2 / (d1 * d1 * d1)).abs()))
        .collect()
}

/// Left side of the supersolution inequality for a function of the
/// hyperbolic distance `r` to a boundary arc, in the form using the
/// Euclidean curvature `kappa_euc` of the parallel curve through the point.
/// `grad_y_r` is the hyperbolic inner product of the gradients of `y` and `r`.
/// The function is a supersolution where this is at most `2 y H`.
pub fn supersolution_lhs(d1: f64, d2: f64, y: f64, kappa_euc: f64, grad_y_r: f64) -> f64 {
    let yw2 = y * y * d1 * d1;
    let wt = (1.0 + 1.0 / yw2).sqrt();
    let wt3 = wt * wt * wt;
    -d2 / (y * d1 * d1 * d1) / wt3 + y * y * kappa_euc / wt - grad_y_r / (yw2 * wt3)
}

/// The same quantity written with the hyperbolic Laplacian of `r`,
/// `lap_r = -(y kappa_euc + grad_y_r / y)`.
pub fn supersolution_lhs_laplacian(d1: f64, d2: f64, y: f64, lap_r: f64, grad_y_r: f64) -> f64 {
    let w = (1.0 + y * y * d1 * d1).sqrt();
    ((2.0 * y * d1 + y.powi(3) * d1.powi(3)) * grad_y_r + y * y * d2) / w.powi(3) + y * y * d1 * lap_r / w
}

use crate::numerics::{find_root, integrate_g, QuadratureSpec, RootSpec};
use crate::{Error, Result};

use super::{g_cumulative, g_h};

/// `L_H`, `M_H`, `T_H` of the loop with base point `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveConstants {
    /// Horizontal distance from `P1` to `P2+`.
    pub l: f64,
    /// Horizontal distance from `P1` to `P4+`.
    pub m: f64,
    /// Zero of `c -> int_{-1}^c g_H` in `(0, 1)`.
    pub t: f64,
}

impl CurveConstants {
    /// Residual `int_{-1}^{T} g_H` of the defining equation of `T`.
    pub fn t_residual(&self, h: f64) -> Result<f64> {
        integrate_g(h, -1.0, self.t, &tight())
    }
}

fn tight() -> QuadratureSpec {
    QuadratureSpec { abs_tol: 1e-14, rel_tol: 1e-14, ..Default::default() }
}

pub fn constants(h: f64) -> Result<CurveConstants> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!("H must be positive, got {h}")));
    }
    let spec = tight();
    let k1 = (0.5 / h).exp() / (2.0 * h);
    let l = k1 * integrate_g(h, -1.0, 0.0, &spec)?;
    let m = -k1 * integrate_g(h, -1.0, 1.0, &spec)?;
    let mut err = None;
    let t = find_root(
        |c| match integrate_g(h, -1.0, c, &spec) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        &RootSpec::new(0.0, 1.0).with_tol(1e-15),
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(CurveConstants { l, m, t: t? })
}

fn check_t(h: f64, t: f64) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("H must be positive, got {h}")));
    }
    // The proof extends both functions to [0, 2]; we accept that range.
    if !(0.0..=2.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, 2]")));
    }
    Ok(())
}

/// Normalized distance between the two intersections of the line `y = z`
/// with the curve whose base point is `(0, z e^{-t/2H})`, one on each side
/// of the base point.
pub fn lbar(h: f64, t: f64) -> Result<f64> {
    check_t(h, t)?;
    Ok(((1.0 - t) * 0.5 / h).exp() / h * g_cumulative(h, t - 1.0))
}

/// Normalized distance from the first intersection right of the base point
/// to the next intersection on the following loop.
pub fn dbar(h: f64, t: f64) -> Result<f64> {
    check_t(h, t)?;
    let m = -((0.5 / h).exp() / (2.0 * h)) * g_cumulative(h, 1.0);
    Ok(2.0 * m * (-t * 0.5 / h).exp() - lbar(h, t)?)
}

/// The function whose zero minimizes `dbar`; same sign as `dbar'`.
pub fn f_of_t(h: f64, m: f64, t: f64) -> f64 {
    let e = (0.5 / h).exp();
    let u = t - 1.0;
    -m / (2.0 * h) + e / (4.0 * h * h) * g_cumulative(h, u) - e / (2.0 * h) * g_h(h, u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KResult {
    /// `K(H) = dbar(t0)`.
    pub k: f64,
    /// Zero of `f` in `(0, 2)`.
    pub t0: f64,
}

/// `K(H)`: the minimum of `dbar`, attained at the zero `t0` of `f`.
///
/// `t0` is only guaranteed to lie in `(0, 2)`; for small `H` it exceeds
/// `1 + T_H`, and for large `H` the value `K(H)` is negative.
pub fn k_of_h(h: f64) -> Result<KResult> {
    let c = constants(h)?;
    let eps = 1e-12;
    let t0 = find_root(|t| f_of_t(h, c.m, t), &RootSpec::new(eps, 2.0 - eps).with_tol(1e-14))?;
    Ok(KResult { k: dbar(h, t0)?, t0 })
}

/// Location and value of the maximum of `lbar` on `(0, 1)`.
pub fn lbar_max(h: f64) -> Result<(f64, f64)> {
    // lbar' has the sign of g(t-1) - G(t-1)/2H, which is +inf at 0 and
    // -G(0)/2H < 0 at t = 1.
    let eps = 1e-13;
    let t = find_root(
        |t| g_h(h, t - 1.0) - g_cumulative(h, t - 1.0) * 0.5 / h,
        &RootSpec::new(eps, 1.0).with_tol(1e-15),
    )?;
    Ok((t, lbar(h, t)?))
}

//! The one-parameter family of domains inside one loop of a `2H/y`-curve,
//! bounded by two arcs of the loop (type A) and two connectors (type B).
//!
//! The loop has base point `(0, y0)`; heights are written `y0 e^{t/2H}` with
//! `t` in `[0, 1 + T_H]`. For `s` in `(0, 1)` the vertices are `D+-` at
//! height parameter `s` and `E+-` at `phi(s)`, the second crossing of the
//! vertical line through `D+`. `B_D` is the arc above `D-D+` centered at its
//! top point (height parameter `d(s)`), `B_E` the arc below `E-E+` centered
//! at its lowest point (height parameter `e(s)`).

use std::f64::consts::PI;

use crate::curve::{above_arc, below_arcs, constants, g_cumulative, lbar_max, s_function, ArcOnCurve, CurveParams};
use crate::numerics::{find_root, RootSpec};
use crate::{Error, Result};

use super::admissible::AdmissibleDomain;
use super::geometry::{boundary_form_integral, ArcKind, BoundaryArc, Geometry};

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!("H must be positive, got {h}")));
    }
    Ok(())
}

fn check_open(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("s = {s} outside (0, 1)")));
    }
    Ok(())
}

/// `phi(s)`: the zero of `int_{s-1}^{phi-1} g_H` in `[1, 1 + T_H]`.
pub fn phi_of_s(h: f64, s: f64) -> Result<f64> {
    check_h(h)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("s = {s} outside [0, 1]")));
    }
    let c = constants(h)?;
    if s == 0.0 {
        return Ok(1.0 + c.t);
    }
    if s == 1.0 {
        return Ok(1.0);
    }
    let target = g_cumulative(h, s - 1.0);
    find_root(|p| g_cumulative(h, p - 1.0) - target, &RootSpec::new(1.0, 1.0 + c.t).with_tol(1e-15))
}

/// Residual `int_{s-1}^{phi-1} g_H` of a candidate `phi`.
pub fn phi_residual(h: f64, s: f64, phi: f64) -> f64 {
    g_cumulative(h, phi - 1.0) - g_cumulative(h, s - 1.0)
}

/// `e(s)`: height parameter of the lowest point of `B_E`, the nontrivial
/// solution of `e^{e/2H} int_{-1}^{phi-e-1} g_H = int_{-1}^{s-1} g_H`.
///
/// `e = 0` always solves the equation (that arc is the loop itself); the
/// arc wanted is the shallow one, with `phi - e` below the maximizer of
/// `t -> e^{-t/2H} int_{-1}^{t-1} g_H`. As `s -> 0`, `e(s) -> 1 + T_H`.
pub fn e_of_s(h: f64, s: f64) -> Result<f64> {
    check_h(h)?;
    check_open(s)?;
    let phi = phi_of_s(h, s)?;
    let inv = 0.5 / h;
    let target = (-phi * inv).exp() * g_cumulative(h, s - 1.0);
    let (tm, _) = lbar_max(h)?;
    let tau = find_root(
        |t| (-t * inv).exp() * g_cumulative(h, t - 1.0) - target,
        &RootSpec::new(0.0, tm).with_tol(1e-15),
    )?;
    Ok(phi - tau)
}

/// Residual of the defining equation of `e`, relative to its right side.
pub fn e_residual(h: f64, s: f64, e: f64) -> Result<f64> {
    let phi = phi_of_s(h, s)?;
    let rhs = g_cumulative(h, s - 1.0);
    Ok(((e * 0.5 / h).exp() * g_cumulative(h, phi - e - 1.0) - rhs) / rhs)
}

/// `d(s)`: height parameter of the top point of `B_D`, the solution in
/// `(s, 2s)` of `e^{(d-2)/2H} int_{1-(d-s)}^{1} -g_H = int_{-1}^{s-1} g_H`.
pub fn d_of_s(h: f64, s: f64) -> Result<f64> {
    check_h(h)?;
    check_open(s)?;
    let x = g_cumulative(h, s - 1.0);
    let g1 = g_cumulative(h, 1.0);
    find_root(
        |t| ((t - 2.0) * 0.5 / h).exp() * (g_cumulative(h, 1.0 - (t - s)) - g1) - x,
        &RootSpec::new(s, 2.0 * s).with_tol(1e-15),
    )
}

/// Residual of the defining equation of `d`, relative to its right side.
pub fn d_residual(h: f64, s: f64, d: f64) -> f64 {
    let x = g_cumulative(h, s - 1.0);
    (((d - 2.0) * 0.5 / h).exp() * (g_cumulative(h, 1.0 - (d - s)) - g_cumulative(h, 1.0)) - x) / x
}

/// Boundary pieces of the domain for parameter `s`, counterclockwise
/// `[A+, B_E, A-, B_D]` (only `[A+, A-]` at `s = 0`), with companions for
/// the B arcs. No validity checks.
fn omega_arcs(y0: f64, h: f64, s: f64) -> Result<(Vec<BoundaryArc>, Vec<(usize, ArcOnCurve)>)> {
    let c = constants(h)?;
    let loop_curve = CurveParams::new(0.0, y0, h)?;
    let inv = 0.5 / h;
    if s == 0.0 {
        let t3 = (-c.t).acos();
        let ap = BoundaryArc::new(ArcKind::A, Geometry::Curve(ArcOnCurve::new(loop_curve, -t3, 0.0)?), -1)?;
        let am = BoundaryArc::new(ArcKind::A, Geometry::Curve(ArcOnCurve::new(loop_curve, 0.0, t3)?), -1)?;
        return Ok((vec![ap, am], vec![]));
    }
    let phi = phi_of_s(h, s)?;
    let e = e_of_s(h, s)?;
    let d = d_of_s(h, s)?;
    let t_d = (1.0 - s).acos();
    let t_e = (1.0 - phi).clamp(-1.0, 1.0).acos();
    let a_plus = ArcOnCurve::new(loop_curve, -t_e, -t_d)?;
    let a_minus = ArcOnCurve::new(loop_curve, t_d, t_e)?;

    let tau_e = phi - e;
    let b = (1.0 - tau_e).clamp(-1.0, 1.0).acos();
    let b_e = ArcOnCurve::new(CurveParams::new(0.0, y0 * (e * inv).exp(), h)?, -b, b)?;

    let tau_d = 2.0 - (d - s);
    let a = (tau_d - 1.0).clamp(-1.0, 1.0).acos();
    let mut cd = CurveParams::new(0.0, y0 * ((d - 2.0) * inv).exp(), h)?;
    cd.w = -cd.k() * s_function(h, PI);
    let b_d = ArcOnCurve::new(cd, PI - a, PI + a)?;

    // Companions: the loop bottom below D-D+ (or the shallower arc below, if
    // that is the loop's deep one) and the arc above E-E+.
    let half_d = a_plus.end().x;
    let z_d = y0 * (s * inv).exp();
    let below = below_arcs(0.0, z_d, half_d, h, &c)?;
    let star_d = *below
        .first()
        .ok_or_else(|| Error::Geometry("no arc below D-D+".into()))?;
    let z_e = y0 * (phi * inv).exp();
    let star_e = above_arc(0.0, z_e, half_d, h)?;

    let arcs = vec![
        BoundaryArc::new(ArcKind::A, Geometry::Curve(a_plus), -1)?,
        BoundaryArc::new(ArcKind::B, Geometry::Curve(b_e), 1)?,
        BoundaryArc::new(ArcKind::A, Geometry::Curve(a_minus), -1)?,
        BoundaryArc::new(ArcKind::B, Geometry::Curve(b_d), 1)?,
    ];
    Ok((arcs, vec![(1, star_e), (3, star_d)]))
}

/// The domain for parameter `s`, arcs `[A+, B_E, A-, B_D]`.
pub fn build_omega_s(y0: f64, h: f64, s: f64) -> Result<AdmissibleDomain> {
    check_h(h)?;
    if !(y0 > 0.0) {
        return Err(Error::Domain(format!("y0 must be positive, got {y0}")));
    }
    check_open(s)?;
    let d = d_of_s(h, s)?;
    let e = e_of_s(h, s)?;
    if d >= e {
        return Err(Error::Geometry(format!(
            "B arcs meet: top of B_D (d = {d}) is not below the bottom of B_E (e = {e}); s is not below s0"
        )));
    }
    let (arcs, b_star) = omega_arcs(y0, h, s)?;
    let dom = AdmissibleDomain { h, arcs, b_star };
    dom.validate()?;
    Ok(dom)
}

/// Lengths, weighted area and balance of the domain for parameter `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaData {
    pub s: f64,
    pub phi: f64,
    pub e: f64,
    pub d: f64,
    pub alpha: f64,
    pub beta: f64,
    pub integral: f64,
    /// `alpha - beta - 2H I`.
    pub f: f64,
}

/// Evaluates the family at `s` in `[0, 1)`. Valid as a domain only below
/// `s0`; the quantities are continuous up to and including `s0`.
pub fn omega_data(y0: f64, h: f64, s: f64) -> Result<OmegaData> {
    check_h(h)?;
    if !(y0 > 0.0) {
        return Err(Error::Domain(format!("y0 must be positive, got {y0}")));
    }
    if !(0.0..1.0).contains(&s) {
        return Err(Error::Domain(format!("s = {s} outside [0, 1)")));
    }
    let (arcs, _) = omega_arcs(y0, h, s)?;
    let (phi, e, d) = if s == 0.0 {
        (phi_of_s(h, 0.0)?, phi_of_s(h, 0.0)?, 0.0)
    } else {
        (phi_of_s(h, s)?, e_of_s(h, s)?, d_of_s(h, s)?)
    };
    let len = |k: ArcKind| arcs.iter().filter(|a| a.kind == k).map(|a| a.length()).sum::<f64>();
    let alpha = len(ArcKind::A);
    let beta = len(ArcKind::B);
    let integral = boundary_form_integral(&arcs);
    Ok(OmegaData { s, phi, e, d, alpha, beta, integral, f: alpha - beta - 2.0 * h * integral })
}

/// `s0`: the zero of `d(s) - e(s)` in `(0, 1)`, where `B_D` first touches `B_E`.
pub fn s_zero(y0: f64, h: f64) -> Result<f64> {
    check_h(h)?;
    if !(y0 > 0.0) {
        return Err(Error::Domain(format!("y0 must be positive, got {y0}")));
    }
    let mut err = None;
    let mut f = |s: f64| match (d_of_s(h, s), e_of_s(h, s)) {
        (Ok(d), Ok(e)) => d - e,
        (Err(x), _) | (_, Err(x)) => {
            err.get_or_insert(x);
            f64::NAN
        }
    };
    let n = 64;
    let grid: Vec<f64> = (1..n).map(|i| i as f64 / n as f64).collect();
    let mut prev = (grid[0], f(grid[0]));
    for &s in &grid[1..] {
        let v = f(s);
        if prev.1 < 0.0 && v >= 0.0 {
            let r = find_root(&mut f, &RootSpec::new(prev.0, s).with_tol(1e-14));
            return match err {
                Some(e) => Err(e),
                None => r,
            };
        }
        prev = (s, v);
    }
    Err(err.unwrap_or(Error::Bracketing { lo: grid[0], hi: prev.0, flo: f64::NAN, fhi: prev.1 }))
}

/// Root of the balance function on `[0, s0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SStar {
    pub s_star: f64,
    pub s0: f64,
    pub f0: f64,
    pub f_s0: f64,
    pub at_root: OmegaData,
}

/// `s*`: the zero of `F(s) = alpha - beta - 2H I` on `(0, s0)`, after
/// checking `F(0) > 0 > F(s0)`.
pub fn s_star(y0: f64, h: f64) -> Result<SStar> {
    let s0 = s_zero(y0, h)?;
    let f0 = omega_data(y0, h, 0.0)?.f;
    let f_s0 = omega_data(y0, h, s0)?.f;
    if !(f0 > 0.0 && f_s0 < 0.0) {
        return Err(Error::Bracketing { lo: 0.0, hi: s0, flo: f0, fhi: f_s0 });
    }
    let mut err = None;
    let r = find_root(
        |s| match omega_data(y0, h, s) {
            Ok(o) => o.f,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        &RootSpec::new(0.0, s0).with_tol(1e-14),
    );
    if let Some(e) = err {
        return Err(e);
    }
    let s = r?;
    Ok(SStar { s_star: s, s0, f0, f_s0, at_root: omega_data(y0, h, s)? })
}

use std::f64::consts::{PI, TAU};

use crate::numerics::{find_root, RootSpec};
use crate::{Error, Result};

use super::{
    constants, g_cumulative, is_embedded_with, k_of_h, lbar, lbar_max, s_increment, s_pi, ArcOnCurve,
    CurveConstants, CurveParams, Point,
};

fn scale_of(p: &Point, q: &Point) -> f64 {
    p.y.max(q.y).max(p.x.abs()).max(q.x.abs()).max(1e-300)
}

fn check_distinct(p: &Point, q: &Point) -> Result<()> {
    if !(p.y > 0.0 && q.y > 0.0) {
        return Err(Error::Argument("points must lie in the upper half-plane".into()));
    }
    if p.dist(q) <= 1e-14 * scale_of(p, q) {
        return Err(Error::Argument("coincident endpoints".into()));
    }
    Ok(())
}

/// The arc above the line `y = z` joining `(mid - half, z)` and `(mid + half, z)`:
/// a piece of a curve centered at its `P4` point.
pub(crate) fn above_arc(mid: f64, z: f64, half: f64, h: f64) -> Result<ArcOnCurve> {
    let sp = s_pi(h);
    let wfun = |tau: f64| {
        let a = (tau - 1.0).clamp(-1.0, 1.0).acos();
        let k = z * ((1.0 - tau) * 0.5 / h).exp() / (2.0 * h);
        k * (sp - s_increment(h, 0.0, PI - a)) - half
    };
    // wfun(2) = -half; wfun(0) = z M_H - half.
    if !(wfun(0.0) > 0.0) {
        return Err(Error::Unsupported(format!(
            "no arc above: half-distance {half} exceeds z M_H"
        )));
    }
    let tau = find_root(wfun, &RootSpec::new(0.0, 2.0).with_tol(1e-15))?;
    let zb = z * (-tau * 0.5 / h).exp();
    let a = (tau - 1.0).clamp(-1.0, 1.0).acos();
    let mut c = CurveParams::new(0.0, zb, h)?;
    c.w = mid - c.k() * sp;
    ArcOnCurve::new(c, PI - a, PI + a)
}

/// Arc of a curve with base point `(mid, z e^{-tau/2H})`, between its two
/// intersections with `y = z`. Embedded for `tau < 1 + T_H`.
pub(crate) fn below_arc_at(mid: f64, z: f64, tau: f64, h: f64) -> Result<ArcOnCurve> {
    let zb = z * (-tau * 0.5 / h).exp();
    let a = (1.0 - tau).clamp(-1.0, 1.0).acos();
    ArcOnCurve::new(CurveParams::new(mid, zb, h)?, -a, a)
}

/// Arcs below `y = z` joining `(mid - half, z)` and `(mid + half, z)`,
/// shorter one first.
pub(crate) fn below_arcs(mid: f64, z: f64, half: f64, h: f64, c: &CurveConstants) -> Result<Vec<ArcOnCurve>> {
    let target = 2.0 * half / z;
    let (tm, lm) = lbar_max(h)?;
    if target > lm * (1.0 + 1e-12) {
        return Ok(vec![]);
    }
    if (target - lm).abs() <= 1e-12 * lm {
        return Ok(vec![below_arc_at(mid, z, tm, h)?]);
    }
    let f = |t: f64| lbar(h, t).unwrap_or(f64::NAN) - target;
    let t1 = find_root(f, &RootSpec::new(0.0, tm).with_tol(1e-15))?;
    let t2 = find_root(f, &RootSpec::new(tm, 1.0 + c.t).with_tol(1e-15))?;
    Ok(vec![below_arc_at(mid, z, t1, h)?, below_arc_at(mid, z, t2, h)?])
}

/// All embedded `2H/y`-arcs joining horizontally aligned points whose
/// separation is below `z K(H)`: one above the line, then up to two below
/// (shorter first).
pub fn horizontal_connectors(p: &Point, q: &Point, h: f64) -> Result<Vec<ArcOnCurve>> {
    check_distinct(p, q)?;
    if (p.y - q.y).abs() > 1e-12 * p.y.max(1.0) {
        return Err(Error::Argument(format!("points not horizontally aligned ({} vs {})", p.y, q.y)));
    }
    let z = 0.5 * (p.y + q.y);
    let sep = (q.x - p.x).abs();
    let kh = k_of_h(h)?;
    if !(sep < z * kh.k) {
        return Err(Error::Unsupported(format!(
            "separation {sep} is not below z K(H) = {}",
            z * kh.k
        )));
    }
    let c = constants(h)?;
    let mid = 0.5 * (p.x + q.x);
    let mut out = vec![above_arc(mid, z, 0.5 * sep, h)?];
    out.extend(below_arcs(mid, z, 0.5 * sep, h, &c)?);
    Ok(out)
}

/// The pair of arcs inside the slab `p.y <= y <= q.y` joining vertically
/// aligned points: the one bulging to the right first, then its mirror image.
pub fn vertical_connectors(p: &Point, q: &Point, h: f64) -> Result<Vec<ArcOnCurve>> {
    check_distinct(p, q)?;
    if (p.x - q.x).abs() > 1e-12 * scale_of(p, q) {
        return Err(Error::Argument(format!("points not vertically aligned ({} vs {})", p.x, q.x)));
    }
    let (lo, hi) = if p.y < q.y { (p, q) } else { (q, p) };
    let c = constants(h)?;
    let bound = lo.y * ((c.t * 0.5 / h).exp() - 1.0);
    if !(hi.y - lo.y < bound) {
        return Err(Error::Unsupported(format!(
            "height gap {} not below {bound}",
            hi.y - lo.y
        )));
    }
    let x0 = lo.x;
    let delta = 2.0 * h * (hi.y / lo.y).ln();
    let f = |a: f64| g_cumulative(h, a - 1.0) - g_cumulative(h, a + delta - 1.0);
    let a = find_root(f, &RootSpec::new((1.0 - delta).max(0.0), 1.0).with_tol(1e-15))?;
    let b = a + delta;
    let y1 = lo.y * (-a * 0.5 / h).exp();
    let base = CurveParams::new(0.0, y1, h)?;
    let dx = base.k() * g_cumulative(h, a - 1.0);
    let ta = (1.0 - a).clamp(-1.0, 1.0).acos();
    let tb = (1.0 - b).clamp(-1.0, 1.0).acos();
    let right = ArcOnCurve::new(CurveParams { w: x0 - dx, ..base }, -tb, -ta)?;
    let left = ArcOnCurve::new(CurveParams { w: x0 + dx, ..base }, ta, tb)?;
    Ok(vec![right, left])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerticalType {
    /// Contained in the slab between the endpoints ("letter D" shape).
    TypeI,
    /// Dips below the lower endpoint but not below `p.y e^{-1/2H}`.
    TypeII,
    /// Crosses the line `y = p.y e^{-1/2H}`.
    TypeIII,
}

pub fn classify_vertical(arc: &ArcOnCurve, p: &Point, q: &Point) -> Result<VerticalType> {
    let (lo, hi) = if p.y < q.y { (p, q) } else { (q, p) };
    let tol = 1e-7 * scale_of(p, q);
    let (s, e) = (arc.start(), arc.end());
    let matches = (s.dist(lo) < tol && e.dist(hi) < tol) || (s.dist(hi) < tol && e.dist(lo) < tol);
    if !matches {
        return Err(Error::Argument("arc endpoints do not match the given points".into()));
    }
    let (ymin, ymax) = arc.y_range();
    let slack = 1e-9 * hi.y;
    if ymin >= lo.y - slack && ymax <= hi.y + slack {
        return Ok(VerticalType::TypeI);
    }
    if ymin < lo.y * (-0.5 / arc.curve.h).exp() {
        Ok(VerticalType::TypeIII)
    } else {
        Ok(VerticalType::TypeII)
    }
}

/// Samples per decade of base height in the connector scan.
pub const SCAN_PER_DECADE: f64 = 2000.0;

/// Every embedded arc of curvature `+-2H/y` joining `p` and `q`.
///
/// A curve through both points with base height `zb` passes through `p` at
/// parameter `+-acos(1 - 2H ln(p.y/zb))`; fixing that choice eliminates `w`,
/// leaving a scalar residual in `zb` for each branch choice at `q`. Base
/// heights are scanned geometrically over `[max(y) e^{-1/H}, min(y)]` and
/// sign changes are refined by bracketed root finding. Tangential (double)
/// roots between samples can be missed.
pub fn connectors(p: &Point, q: &Point, h: f64) -> Result<Vec<ArcOnCurve>> {
    check_distinct(p, q)?;
    let c = constants(h)?;
    Ok(connectors_with(p, q, h, &c))
}

const BRANCHES: usize = 12;

fn branch_of(i: usize) -> (f64, f64, f64) {
    let sp = if i & 1 == 0 { 1.0 } else { -1.0 };
    let sq = if i & 2 == 0 { 1.0 } else { -1.0 };
    let n = (i / 4) as f64 - 1.0;
    (sp, sq, n)
}

struct ScanEval {
    tp: [f64; BRANCHES],
    tq: [f64; BRANCHES],
    r: [f64; BRANCHES],
}

fn scan_eval(p: &Point, q: &Point, h: f64, spi: f64, zb: f64) -> ScanEval {
    let ap = (1.0 - 2.0 * h * (p.y / zb).ln()).clamp(-1.0, 1.0).acos();
    let aq = (1.0 - 2.0 * h * (q.y / zb).ln()).clamp(-1.0, 1.0).acos();
    let s_ap = s_increment(h, 0.0, ap);
    let s_aq = s_increment(h, 0.0, aq);
    let k = zb * (0.5 / h).exp() / (2.0 * h);
    let mut out = ScanEval { tp: [0.0; BRANCHES], tq: [0.0; BRANCHES], r: [f64::NAN; BRANCHES] };
    for i in 0..BRANCHES {
        let (sp, sq, n) = branch_of(i);
        let tp = sp * ap;
        let tq = sq * aq + TAU * n;
        out.tp[i] = tp;
        out.tq[i] = tq;
        // Zero span is kept: it is the continuous limit at the top of the scan.
        if (tq - tp).abs() <= TAU {
            let d = (sq * s_aq + 2.0 * n * spi) - sp * s_ap;
            out.r[i] = (q.x - p.x) - k * d;
        }
    }
    out
}

pub(crate) fn connectors_with(p: &Point, q: &Point, h: f64, c: &CurveConstants) -> Vec<ArcOnCurve> {
    let z_hi = p.y.min(q.y);
    let z_lo = p.y.max(q.y) * (-1.0 / h).exp();
    if !(z_lo < z_hi) {
        return vec![];
    }
    let ratio = z_hi / z_lo;
    let n = ((SCAN_PER_DECADE * ratio.log10()).ceil() as usize).max(200);
    let spi = s_pi(h);
    let zs: Vec<f64> = (0..=n).map(|i| z_lo * ratio.powf(i as f64 / n as f64)).collect();
    // Pin the last sample exactly to the top of the range.
    let evals: Vec<ScanEval> = zs
        .iter()
        .enumerate()
        .map(|(i, &z)| scan_eval(p, q, h, spi, if i == n { z_hi } else { z }))
        .collect();

    let scale = scale_of(p, q);
    let mut found: Vec<ArcOnCurve> = Vec::new();
    let mut push = |zb: f64, tp: f64, tq: f64| {
        let Ok(mut curve) = CurveParams::new(0.0, zb, h) else { return };
        curve.w = p.x - curve.k() * super::s_function(h, tp);
        let (t_lo, t_hi) = if tp < tq { (tp, tq) } else { (tq, tp) };
        let Ok(arc) = ArcOnCurve::new(curve, t_lo, t_hi) else { return };
        let (pp, qq) = if tp < tq { (arc.start(), arc.end()) } else { (arc.end(), arc.start()) };
        if pp.dist(p) > 1e-8 * scale || qq.dist(q) > 1e-8 * scale {
            return;
        }
        if !is_embedded_with(&arc, c.t) {
            return;
        }
        let arc = arc.normalized();
        let dup = found.iter().any(|o| {
            (o.curve.w - arc.curve.w).abs() < 1e-7 * scale
                && (o.curve.z - arc.curve.z).abs() < 1e-7 * scale
                && (o.t_lo - arc.t_lo).abs() < 1e-7
                && (o.t_hi - arc.t_hi).abs() < 1e-7
        });
        if !dup {
            found.push(arc);
        }
    };

    for i in 0..BRANCHES {
        for j in 0..n {
            let (ra, rb) = (evals[j].r[i], evals[j + 1].r[i]);
            if ra.is_nan() || rb.is_nan() {
                continue;
            }
            if ra == 0.0 {
                push(zs[j], evals[j].tp[i], evals[j].tq[i]);
                continue;
            }
            if j + 1 == n && rb == 0.0 {
                push(z_hi, evals[j + 1].tp[i], evals[j + 1].tq[i]);
                continue;
            }
            if ra.signum() == rb.signum() {
                continue;
            }
            let f = |zb: f64| scan_eval(p, q, h, spi, zb).r[i];
            let spec = RootSpec::new(zs[j], if j + 1 == n { z_hi } else { zs[j + 1] }).with_tol(1e-15 * z_hi);
            if let Ok(zb) = find_root(f, &spec) {
                let e = scan_eval(p, q, h, spi, zb);
                push(zb, e.tp[i], e.tq[i]);
            }
        }
    }
    found.sort_by(|a, b| a.curve.z.total_cmp(&b.curve.z).then(a.t_lo.total_cmp(&b.t_lo)));
    found
}

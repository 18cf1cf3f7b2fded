use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::{Error, Result};

/// Tolerances for the adaptive Gauss-Kronrod integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 1 << 16,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_subdivisions == 0 {
            return Err(Error::Argument(format!("invalid quadrature spec {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

// 7-point Gauss / 15-point Kronrod.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        res_k += WGK[j] * s;
        if j % 2 == 1 {
            res_g += WG[j / 2] * s;
        }
    }
    (res_k * h, ((res_k - res_g) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of a smooth integrand.
///
/// The panel with the largest error estimate is bisected until the total
/// estimate drops below `max(abs_tol, rel_tol * |I|)`.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    spec.validate()?;
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, subdivisions: 0 });
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut subdivisions = 1;
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Convergence {
                what: "adaptive quadrature".into(),
                estimate: total_err,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Panel cannot be split further at double precision.
            return Err(Error::Convergence {
                what: "adaptive quadrature (panel underflow)".into(),
                estimate: total_err,
            });
        }
        let (v1, e1) = gk15(&f, worst.a, m);
        let (v2, e2) = gk15(&f, m, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: worst.b, value: v2, error: e2 });
        subdivisions += 1;
    }
    // Re-sum to shed the drift of the running totals.
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    Ok(QuadResult { value, error, subdivisions })
}

const GL_ORDER: usize = 20;

fn gauss_legendre_rule() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static RULE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut x = [0.0; GL_ORDER];
        let mut w = [0.0; GL_ORDER];
        for i in 0..n {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-17 {
                    break;
                }
            }
            x[i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        (x, w)
    })
}

/// Fixed composite Gauss-Legendre rule: `panels` equal panels of order 20.
///
/// For entire integrands on short panels this is accurate to rounding and,
/// unlike adaptive rules, depends smoothly on the endpoints.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre_rule();
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let c = lo + 0.5 * width;
        let h = 0.5 * width;
        let mut s = 0.0;
        for i in 0..GL_ORDER {
            s += w[i] * f(c + h * x[i]);
        }
        total += s * h;
    }
    total
}

fn check_unit_interval(h: f64, a: f64, b: f64) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("H must be positive, got {h}")));
    }
    if !(-1.0..=1.0).contains(&a) || !(-1.0..=1.0).contains(&b) || a > b {
        return Err(Error::Domain(format!("need -1 <= a <= b <= 1, got a={a}, b={b}")));
    }
    Ok(())
}

/// Integral of `g_H(u) = -u e^{u/2H} / sqrt(1-u^2)` over `[a, b]`.
///
/// Computed as `int cos(th) e^{-cos(th)/2H} dth` after `u = -cos(th)`,
/// so the integrand is bounded and analytic.
pub fn integrate_g(h: f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_unit_interval(h, a, b)?;
    let (ta, tb) = ((-a).acos(), (-b).acos());
    let inv = 0.5 / h;
    Ok(gauss_kronrod(|t: f64| t.cos() * (-t.cos() * inv).exp(), ta, tb, spec)?.value)
}

/// Integral of `e^{u/2H} / sqrt(1-u^2)` over `[a, b]`, same substitution.
pub fn integrate_speed(h: f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_unit_interval(h, a, b)?;
    let (ta, tb) = ((-a).acos(), (-b).acos());
    let inv = 0.5 / h;
    Ok(gauss_kronrod(|t: f64| (-t.cos() * inv).exp(), ta, tb, spec)?.value)
}

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSpec {
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl RootSpec {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            bracket_lo: lo,
            bracket_hi: hi,
            tol: 1e-14 * (1.0 + lo.abs().max(hi.abs())),
            max_iters: 400,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Bracket-preserving root finder: secant (regula falsi) steps, with a
/// bisection whenever a step fails to halve the bracket.
///
/// Returns the bracket endpoint with the smaller `|f|` once the bracket is
/// narrower than `tol` (or cannot shrink further in floating point).
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, spec: &RootSpec) -> Result<f64> {
    let (mut a, mut b) = (spec.bracket_lo, spec.bracket_hi);
    if !(a < b) || !(spec.tol > 0.0) {
        return Err(Error::Argument(format!("invalid root spec {spec:?}")));
    }
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Domain("function is NaN at bracket endpoint".into()));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracketing { lo: a, hi: b, flo: fa, fhi: fb });
    }
    let mut width_before = b - a;
    let mut use_bisection = false;
    for _ in 0..spec.max_iters {
        let width = b - a;
        if width <= spec.tol {
            return Ok(if fa.abs() <= fb.abs() { a } else { b });
        }
        let mid = a + 0.5 * width;
        if mid <= a || mid >= b {
            return Ok(if fa.abs() <= fb.abs() { a } else { b });
        }
        let mut x = if use_bisection {
            mid
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        // Keep trial points strictly inside and away from the endpoints.
        let guard = 0.25 * spec.tol.min(width);
        if !(x > a + guard && x < b - guard) {
            x = mid;
        }
        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::Domain(format!("function is NaN at {x}")));
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        let new_width = b - a;
        use_bisection = new_width > 0.5 * width_before;
        width_before = width;
    }
    Err(Error::Convergence {
        what: "bracketed root finding".into(),
        estimate: b - a,
    })
}

/// Locates a zero of a continuous function that is known to be negative on
/// the left end and positive on the right end by scanning `n` samples, then
/// refines it. Used where only a sign pattern, not a bracket, is known.
pub fn scan_and_refine<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, n: usize, tol: f64) -> Result<Option<f64>> {
    let n = n.max(2);
    let mut prev_x = lo;
    let mut prev_f = f(lo);
    for i in 1..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let fx = f(x);
        if prev_f == 0.0 {
            return Ok(Some(prev_x));
        }
        if fx.is_finite() && prev_f.is_finite() && fx.signum() != prev_f.signum() {
            let spec = RootSpec::new(prev_x, x).with_tol(tol);
            return find_root(&mut f, &spec).map(Some);
        }
        prev_x = x;
        prev_f = fx;
    }
    Ok(None)
}

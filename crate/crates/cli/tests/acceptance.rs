//! Acceptance report: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Mutex;

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solgraph_cli::{run_in, Cli};
use solgraph_core::curve::*;
use solgraph_core::domain::*;
use solgraph_core::solver::*;
use solgraph_core::Error;

/// (H, L, M, T, t0, K) from an independent 30-digit mpmath computation.
const TABLE: [(f64, f64, f64, f64, f64, f64); 5] = [
    (0.25, 3.452_824_558_647_19, 73.848_192_984_841_94, 0.475_207_323_930_156_2, 1.917_107_011_856_887_5, 4.601_166_339_982_689),
    (0.5, 1.273_381_330_341_807_6, 4.826_308_541_620_154, 0.699_844_682_416_767, 1.660_601_803_056_995, 1.759_876_663_395_183_4),
    (1.0, 0.560_262_489_481_561_5, 0.667_896_043_047_967_7, 0.864_758_393_883_645_7, 1.064_109_118_016_143_3, 0.128_482_538_148_586_54),
    (2.0, 0.264_198_749_654_053_35, 0.127_046_303_679_879_37, 0.950_906_357_967_602_2, 0.892_366_716_556_932, -0.216_524_430_062_322_26),
    (4.0, 0.128_449_051_145_078_86, 0.027_866_002_308_732_763, 0.984_793_994_852_192_3, 0.911_094_109_163_795_4, -0.178_518_710_301_007_63),
];

/// Largest edgewise flux density seen over every solve in the report.
static MAX_DENSITY: Mutex<f64> = Mutex::new(0.0);

fn record_density(f: &FluxReport) {
    let m = f.max_density.iter().copied().fold(0.0, f64::max);
    let mut g = MAX_DENSITY.lock().unwrap();
    *g = g.max(m);
}

type Outcome = (bool, String);

fn check(ok: bool, what: &str, failures: &mut Vec<String>) {
    if !ok {
        failures.push(what.to_string());
    }
}

fn verdict(failures: Vec<String>, detail: String) -> Outcome {
    if failures.is_empty() {
        (true, detail)
    } else {
        (false, format!("{detail}; failed: {}", failures.join(", ")))
    }
}

// ---------------------------------------------------------------------------

fn c1_curves() -> Outcome {
    let mut f = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let c = CurveParams::new(0.0, rng.random_range(0.2..5.0), rng.random_range(0.25..4.0)).unwrap();
        let t = rng.random_range(-10.0..10.0);
        worst = worst.max(curvature_residual(&c, t));
    }
    check(worst <= 1e-5, "curvature residual", &mut f);
    let mut point_err = 0.0f64;
    for &(h, l, m, t, ..) in &TABLE {
        for z in [0.5, 1.0, 3.0] {
            let c = CurveParams::new(0.0, z, h).unwrap();
            let e = (0.5 / h).exp();
            let t3 = p3_parameter(constants(h).unwrap().t);
            let pairs = [
                (gamma(&c, -FRAC_PI_2), Point::new(z * l, z * e)),
                (gamma(&c, FRAC_PI_2), Point::new(-z * l, z * e)),
                (gamma(&c, PI), Point::new(z * m, z * e * e)),
                (gamma(&c, -PI), Point::new(-z * m, z * e * e)),
                (gamma(&c, t3), Point::new(0.0, z * ((1.0 + t) * 0.5 / h).exp())),
            ];
            for (a, b) in pairs {
                point_err = point_err.max(a.dist(&b) / z.max(1.0) / m.max(1.0));
            }
        }
    }
    check(point_err <= 1e-9, "tabulated points", &mut f);
    verdict(f, format!("max curvature residual {worst:.1e} (tol 1e-5), max point error {point_err:.1e} (tol 1e-9)"))
}

fn c2_constants() -> Outcome {
    let mut f = Vec::new();
    let (mut tres, mut lres, mut kres) = (0.0f64, 0.0f64, 0.0f64);
    for &(h, ..) in &TABLE {
        let c = constants(h).unwrap();
        check(c.t > 0.0 && c.t < 1.0, "T in (0,1)", &mut f);
        tres = tres.max(c.t_residual(h).unwrap().abs());
        lres = lres.max((lbar(h, 1.0).unwrap() - 2.0 * (-0.5 / h).exp() * c.l).abs());
        let k = k_of_h(h).unwrap().k;
        let grid = (0..10_000).map(|i| dbar(h, 2.0 * i as f64 / 9_999.0).unwrap()).fold(f64::INFINITY, f64::min);
        kres = kres.max((grid - k).abs());
    }
    check(tres <= 1e-9, "T residual", &mut f);
    check(lres <= 1e-9, "lbar(1)", &mut f);
    check(kres <= 1e-6, "K grid", &mut f);
    verdict(f, format!("T residual {tres:.1e} (tol 1e-9), lbar(1) {lres:.1e} (tol 1e-9), K vs grid {kres:.1e} (tol 1e-6)"))
}

fn same_arc(a: &ArcOnCurve, b: &ArcOnCurve) -> bool {
    (a.length() - b.length()).abs() < 1e-7 && a.point(0.5 * (a.t_lo + a.t_hi)).dist(&b.point(0.5 * (b.t_lo + b.t_hi))) < 1e-7
}

fn c3_connectors() -> Outcome {
    let mut f = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut ok_h = 0;
    for _ in 0..100 {
        let z = rng.random_range(0.5..3.0);
        let h = rng.random_range(0.25..1.1);
        let c = constants(h).unwrap();
        let cap = z * k_of_h(h).unwrap().k.min(2.0 * (-0.5 / h).exp() * c.l);
        let two_w = rng.random_range(0.01..0.99) * cap;
        let x0 = rng.random_range(-2.0..2.0);
        let (p, q) = (Point::new(x0 - 0.5 * two_w, z), Point::new(x0 + 0.5 * two_w, z));
        let arcs = horizontal_connectors(&p, &q, h).unwrap();
        let sweep = connectors(&p, &q, h).unwrap();
        if arcs.len() == 3 && sweep.len() == 3 && arcs.iter().all(|a| sweep.iter().any(|b| same_arc(a, b))) {
            ok_h += 1;
        }
    }
    check(ok_h == 100, "horizontal count", &mut f);
    let mut type2 = 0;
    for _ in 0..100 {
        let z = rng.random_range(0.5..2.0);
        let h = rng.random_range(0.25..2.0);
        let c = constants(h).unwrap();
        let gap = rng.random_range(0.05..0.95) * z * ((c.t * 0.5 / h).exp() - 1.0);
        let (p, q) = (Point::new(0.0, z), Point::new(0.0, z + gap));
        for b in connectors(&p, &q, h).unwrap() {
            if classify_vertical(&b, &p, &q).unwrap() == VerticalType::TypeII {
                type2 += 1;
            }
        }
    }
    check(type2 == 0, "Type II exclusion", &mut f);
    verdict(f, format!("{ok_h}/100 horizontal samples with 3 arcs matching the sweep, {type2} Type II connectors in 100 vertical samples"))
}

/// Closed region bounded by two arcs with common endpoints, counterclockwise.
fn lens(a: &ArcOnCurve, b: &ArcOnCurve) -> Vec<BoundaryArc> {
    let ob = if b.end().dist(&a.start()) < b.start().dist(&a.start()) { 1 } else { -1 };
    let mut arcs = vec![
        BoundaryArc::new(ArcKind::A, Geometry::Curve(*a), 1).unwrap(),
        BoundaryArc::new(ArcKind::A, Geometry::Curve(*b), ob).unwrap(),
    ];
    if boundary_form_integral(&arcs) < 0.0 {
        arcs = arcs.iter().rev().map(|x| x.reversed()).collect();
    }
    arcs
}

fn c4_inequalities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut v = [0usize; 3];
    for _ in 0..50 {
        let h = rng.random_range(0.3..2.0);
        let z = rng.random_range(0.5..5.0);
        let t = constants(h).unwrap().t;
        let gap = rng.random_range(0.02..0.98) * z * ((t * 0.5 / h).exp() - 1.0);
        let x = rng.random_range(-3.0..3.0);
        let c = vertical_connectors(&Point::new(x, z), &Point::new(x, z + gap), h).unwrap();
        let i = region_integral(&lens(&c[0], &c[1])).unwrap();
        if !(2.0 * c[0].length() > 2.0 * h * i) {
            v[0] += 1;
        }
    }
    let mut count = 0;
    while count < 50 {
        let h = rng.random_range(0.3..1.1);
        let z = rng.random_range(0.5..5.0);
        let l = constants(h).unwrap().l;
        let kh = k_of_h(h).unwrap().k;
        let w = rng.random_range(0.01..0.99) * 0.5 * z * kh.min(2.0 * (-0.5 / h).exp() * l);
        let hc = horizontal_connectors(&Point::new(-w, z), &Point::new(w, z), h).unwrap();
        let (up, down) = (hc[0], hc[1]);
        let a = 2.0 * h * (z / down.curve.z).ln();
        if !(a + (a * 0.5 / h).exp() < 2.0) {
            continue;
        }
        count += 1;
        let i = region_integral(&lens(&down, &up)).unwrap();
        if !(down.length() < up.length() + 2.0 * h * i) {
            v[1] += 1;
        }
    }
    for h in [0.5, 1.0] {
        for i in 1..=50 {
            let s = i as f64 / 51.0;
            let (e, d, phi) = (e_of_s(h, s).unwrap(), d_of_s(h, s).unwrap(), phi_of_s(h, s).unwrap());
            if !(e >= 2.0 * (phi - 1.0)) || !(s < d && d < 2.0 * s) {
                v[2] += 1;
            }
        }
    }
    let f = if v.iter().all(|&x| x == 0) { vec![] } else { vec!["violations".to_string()] };
    verdict(f, format!("violations: Type-I lenses {}/50, close pairs {}/50, claims {}/100", v[0], v[1], v[2]))
}

fn c5_root_chain() -> Outcome {
    let mut f = Vec::new();
    let mut parts = Vec::new();
    for (y0, h) in [(1.0, 0.5), (1.0, 1.0), (2.0, 0.5)] {
        let r = s_star(y0, h).unwrap();
        check(r.f0 > 0.0 && r.f_s0 < 0.0, "F sign change", &mut f);
        check(r.at_root.f.abs() <= 1e-6 * r.at_root.alpha, "|F(s*)|", &mut f);
        let pass = check_conditions(&build_omega_s(y0, h, r.s_star).unwrap(), Mode::CEmpty).unwrap().pass;
        check(pass, "Omega_s* conditions", &mut f);
        for s in [0.5 * r.s_star, 0.5 * (r.s_star + r.s0)] {
            let rep = check_conditions(&build_omega_s(y0, h, s).unwrap(), Mode::CEmpty).unwrap();
            check(!rep.pass, "off-balance widths fail", &mut f);
        }
        parts.push(format!("({y0},{h}) s*={:.6} |F|/alpha={:.0e}", r.s_star, r.at_root.f.abs() / r.at_root.alpha));
    }
    verdict(f, parts.join(", "))
}

fn c6_constructions() -> Outcome {
    let mut f = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut passed = [0usize; 4];
    let mut named = [0usize; 4];
    let named_error = |e: Error| matches!(e, Error::Construction { .. });
    for _ in 0..10 {
        let h = rng.random_range(0.3..1.4);
        let p = Point::new(rng.random_range(-5.0..5.0), rng.random_range(1.0..20.0));
        let bound = 2.0 * p.y / (3.0 + 2.0 * h);
        let d = rng.random_range(0.1..0.95) * bound;
        let eps = rng.random_range(0.05..0.5) * d;
        if check_conditions(&build_b_empty(p, d, eps, h).unwrap(), Mode::BEmpty).unwrap().pass {
            passed[0] += 1;
        }
        if build_b_empty(p, rng.random_range(1.01..1.5) * bound, eps, h).map_or_else(named_error, |_| false) {
            named[0] += 1;
        }
    }
    let l_of = |h: f64| constants(h).unwrap().l;
    for _ in 0..10 {
        let h = rng.random_range(0.4..1.2);
        let c = CurveParams::new(rng.random_range(-1.0..1.0), rng.random_range(0.5..3.0), h).unwrap();
        // generic
        let t = rng.random_range(0.3..1.3) + PI * rng.random_range(0..4) as f64;
        let y = gamma(&c, t).y;
        let dmax = (2.0 * y / 3.0 * (1.0 - (-0.5 / h).exp())).min(2.0 * y / (8.0 * h + 3.0));
        let emax = 2.0 * y * (-1.0 / h).exp() * l_of(h);
        let dd = rng.random_range(0.2..0.9) * dmax;
        let eps = rng.random_range(0.05..0.2) * emax.min(dd);
        if check_conditions(&build_a_empty(c, t, TangencyCase::Generic { d: dd, eps }).unwrap(), Mode::AEmpty).unwrap().pass {
            passed[1] += 1;
        }
        let bad = TangencyCase::Generic { d: rng.random_range(1.01..1.5) * dmax, eps };
        if build_a_empty(c, t, bad).map_or_else(named_error, |_| false) {
            named[1] += 1;
        }
        // vertical tangent
        let t = if rng.random_bool(0.5) { FRAC_PI_2 } else { -FRAC_PI_2 } + 2.0 * PI * rng.random_range(0..3) as f64;
        let y = gamma(&c, t).y;
        let dmax = (y * (1.0 - (-0.5 / h).exp())).min(2.0 * y / (8.0 * h + 1.0));
        let dd = rng.random_range(0.2..0.9) * dmax;
        // gaps wide enough for the curve's drift H d^2 / 4y on each side, short enough for length(B_i) < d/2
        let emax = 2.0 * y * (-1.0 / h).exp() * l_of(h);
        let eps = rng.random_range(h * dd * dd / y..(0.45 * dd).min(emax));
        let dom = build_a_empty(c, t, TangencyCase::VerticalTangent { d: dd, eps }).unwrap();
        if check_conditions(&dom, Mode::AEmpty).unwrap().pass {
            passed[2] += 1;
        }
        let bad = TangencyCase::VerticalTangent { d: rng.random_range(1.01..1.5) * dmax, eps };
        if build_a_empty(c, t, bad).map_or_else(named_error, |_| false) {
            named[2] += 1;
        }
        // horizontal tangent
        let t = PI * rng.random_range(0..4) as f64;
        let y = gamma(&c, t).y;
        let hb = 2.0 * y * (constants(h).unwrap().t / (4.0 * h)).tanh();
        let bb = y / (4.0 * h + 1.0);
        // sides tall enough for the curve's drift H b^2 / 4y at each end, short enough for length(B_i) < b/2
        let base = rng.random_range(0.5..1.0) * bb;
        let height = rng.random_range(h * base * base / y..(0.45 * base).min(0.5 * hb));
        let case = TangencyCase::HorizontalTangent { height, base };
        if check_conditions(&build_a_empty(c, t, case).unwrap(), Mode::AEmpty).unwrap().pass {
            passed[3] += 1;
        }
        let bad = TangencyCase::HorizontalTangent { height: rng.random_range(1.01..1.5) * hb, base: bb };
        if build_a_empty(c, t, bad).map_or_else(named_error, |_| false) {
            named[3] += 1;
        }
    }
    check(passed == [10; 4], "valid draws", &mut f);
    check(named == [10; 4], "named errors", &mut f);
    verdict(
        f,
        format!("valid draws passing [b-empty, generic, vertical, horizontal] = {passed:?}/10, out-of-bound draws with named error = {named:?}/10"),
    )
}

// ---------------------------------------------------------------------------
// Solver criteria

fn seg(a: (f64, f64), b: (f64, f64)) -> BoundaryArc {
    BoundaryArc::new(ArcKind::C, Geometry::Segment(Segment { a: Point::new(a.0, a.1), b: Point::new(b.0, b.1) }), 1).unwrap()
}

fn unit_square() -> Vec<BoundaryArc> {
    vec![seg((0.0, 1.0), (1.0, 1.0)), seg((1.0, 1.0), (1.0, 2.0)), seg((1.0, 2.0), (0.0, 2.0)), seg((0.0, 2.0), (0.0, 1.0))]
}

fn b_domain() -> AdmissibleDomain {
    build_b_empty(Point::new(0.0, 1.0), 0.2, 0.08, 1.0).unwrap()
}

fn mms_flux(x: f64, y: f64) -> (f64, f64) {
    let (gx, gy) = (x.cos() * y.ln(), x.sin() / y);
    let w = (1.0 + y.powi(4) * (gx * gx + gy * gy)).sqrt();
    (y * y * gx / w, y * y * gy / w)
}

fn c7_solver() -> Outcome {
    let mut f = Vec::new();
    let opts = SolverOptions::default();
    let h = 0.5;
    let exact = |p: &Point| p.x.sin() * p.y.ln();
    let forcing = move |p: &Point| {
        let d = 1e-5;
        let dx = mms_flux(p.x + d, p.y).0 - mms_flux(p.x - d, p.y).0;
        let dy = mms_flux(p.x, p.y + d).1 - mms_flux(p.x, p.y - d).1;
        (dx + dy) / (2.0 * d) - 2.0 * h / p.y
    };
    let mut errs = Vec::new();
    for mh in [0.1, 0.05, 0.025] {
        let m = Mesh::from_boundary(&unit_square(), mh).unwrap();
        let pb = DirichletProblem::new(&m, h).unwrap().with_forcing(&forcing);
        let s = pb.solve(&boundary_from_fn(&m, &exact), &opts).unwrap();
        let mut e2 = 0.0;
        for t in &m.triangles {
            let p = t.map(|i| m.nodes[i]);
            let area = 0.5 * ((p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y));
            for k in 0..3 {
                let j = (k + 1) % 3;
                let uh = 0.5 * (s.values[t[k]] + s.values[t[j]]);
                e2 += area / 3.0 * (uh - exact(&p[k].lerp(&p[j], 0.5))).powi(2);
            }
        }
        errs.push(e2.sqrt());
    }
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    check(orders.iter().all(|&o| o >= 1.7), "MMS order", &mut f);

    let d = b_domain();
    let m = make_mesh(&d, d.diameter() / 50.0).unwrap();
    let c = solve_dirichlet(&m, &boundary_from_fn(&m, &|_| 2.75), 0.0, &opts).unwrap();
    let const_err = c.values.iter().map(|v| (v - 2.75).abs()).fold(0.0, f64::max);
    check(const_err <= 1e-10, "constant solve", &mut f);

    let pb = DirichletProblem::new(&m, d.h).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut wave = |amp: f64| {
        let c: Vec<(f64, f64, f64)> =
            (0..4).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-40.0..40.0), rng.random_range(-40.0..40.0))).collect();
        move |p: &Point| amp * c.iter().map(|(a, kx, ky)| a * (kx * p.x + ky * p.y).sin()).sum::<f64>()
    };
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        let (base, bump) = (wave(0.01), wave(0.01));
        let lo = pb.solve(&boundary_from_fn(&m, &base), &opts).unwrap();
        let hi = pb.solve(&boundary_from_fn(&m, &|p| base(p) + bump(p).abs() + 1e-3), &opts).unwrap();
        for s in [&lo, &hi] {
            record_density(&flux_report(&m, &s.values, d.h).unwrap());
        }
        worst = worst.max(lo.values.iter().zip(&hi.values).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max));
    }
    check(worst <= 1e-8, "comparison", &mut f);
    verdict(
        f,
        format!(
            "MMS L2 errors {:.2e} {:.2e} {:.2e}, orders {:.2} {:.2} (min 1.7); constant error {const_err:.0e} (tol 1e-10); comparison max(u1-u2) {worst:.1e} over 20 pairs",
            errs[0], errs[1], errs[2], orders[0], orders[1]
        ),
    )
}

fn c8_flux() -> Outcome {
    let mut f = Vec::new();
    let opts = SolverOptions::default();
    let s = s_star(1.0, 0.5).unwrap();
    let omega = build_omega_s(1.0, 0.5, s.s_star).unwrap();
    let mut parts = Vec::new();
    for (name, arcs, h) in [("b-empty", b_domain().arcs, 1.0), ("Omega_s*", omega.star_arcs().unwrap(), 0.5)] {
        let diam = diameter(&polygonize(&arcs, 64));
        let mut rel = Vec::new();
        for k in [100.0, 200.0] {
            let m = Mesh::from_boundary(&arcs, diam / k).unwrap();
            let sol = solve_dirichlet(&m, &boundary_from_fn(&m, &|p| 0.05 * p.x / diam), h, &opts).unwrap();
            let r = flux_report(&m, &sol.values, h).unwrap();
            record_density(&r);
            rel.push(r.balance.abs() / r.area_term);
        }
        check(rel[0] <= 0.05 && rel[1] < rel[0], "balance", &mut f);
        parts.push(format!("{name} balance {:.2}% -> {:.2}%", 100.0 * rel[0], 100.0 * rel[1]));
    }
    let d = b_domain();
    let a = &d.arcs[1];
    let etas = vec![
        vec![a.end(), a.start()],
        vec![a.end(), Point::new(0.0, 1.0), a.start()],
        vec![a.end(), Point::new(0.02, 0.93), Point::new(-0.03, 0.95), a.start()],
    ];
    let mut diffs = Vec::new();
    for k in [25.0, 50.0, 100.0] {
        let m = make_mesh(&d, d.diameter() / k).unwrap();
        let sol = solve_dirichlet(&m, &boundary_from_fn(&m, &|p| 0.05 * p.x), d.h, &opts).unwrap();
        record_density(&flux_report(&m, &sol.values, d.h).unwrap());
        diffs.push(flux_eta_independence(&m, &sol.values, d.h, 1, &etas).unwrap());
    }
    check(diffs.windows(2).all(|w| w[1] < w[0]), "eta independence", &mut f);
    parts.push(format!("eta differences {:.1e} {:.1e} {:.1e}", diffs[0], diffs[1], diffs[2]));
    verdict(f, parts.join(", "))
}

fn c9_exhaustion() -> Outcome {
    let mut f = Vec::new();
    let opts = SolverOptions::default();
    let ns = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
    let lam = 0.03;
    let d = build_b_empty(Point::new(0.0, lam), 0.2 * lam, 0.08 * lam, 1.0).unwrap();
    let m = exhaustion_mesh(&d, Mode::BEmpty, d.diameter() / 30.0).unwrap();
    let r = solve_exhaustion(&d, &m, &ns, Mode::BEmpty, &|_| 0.0, &[Point::new(0.0, lam)], &opts).unwrap();
    check(r.failure.is_none(), "b-empty solves", &mut f);
    let dens = r.steps.iter().flat_map(|s| s.flux.max_density.iter().copied()).fold(0.0, f64::max);
    check(dens <= 1.0 + 1e-8, "density", &mut f);
    let violations: usize = r.monotone_violations.iter().sum();
    check(violations == 0, "monotonicity", &mut f);
    let gaps: Vec<f64> = r.steps.windows(2).map(|w| (w[1].probe_values[0] - w[0].probe_values[0]).abs()).collect();
    check(gaps.windows(2).all(|g| g[1] < g[0]), "probe gaps", &mut f);
    let mut final_gap = 0.0f64;
    for arc in [0, 2] {
        let l = r.steps[0].flux.length_of(arc).unwrap();
        let fl: Vec<f64> = r.steps.iter().map(|s| s.flux.flux_of(arc).unwrap()).collect();
        check(fl.windows(2).all(|w| w[1] > w[0]), "A flux increasing", &mut f);
        final_gap = final_gap.max((l - fl[fl.len() - 1]) / l);
    }
    check(final_gap <= 0.1, "A flux gap", &mut f);

    let st = s_star(1.0, 0.5).unwrap();
    let om = build_omega_s(1.0, 0.5, st.s_star).unwrap();
    let mc = exhaustion_mesh(&om, Mode::CEmpty, om.diameter() / 40.0).unwrap();
    let rc = solve_exhaustion(&om, &mc, &ns, Mode::CEmpty, &|_| 0.0, &[], &opts).unwrap();
    check(rc.failure.is_none(), "c-empty solves", &mut f);
    let mu: Vec<f64> = rc.steps.iter().map(|s| s.mu.unwrap_or(f64::NAN)).collect();
    let rest: Vec<f64> = ns.iter().zip(&mu).map(|(n, m)| n - m).collect();
    check(mu.windows(2).all(|w| w[1] > w[0]), "mu increasing", &mut f);
    check(rest.windows(2).all(|w| w[1] > w[0]), "n - mu increasing", &mut f);
    verdict(
        f,
        format!(
            "b-empty (scale {lam}, diam/30): violations {:?}, probe gaps {:.2e} .. {:.2e}, final A flux gap {:.1}% (max 10%); Omega_s* mu {:.2} -> {:.2}, n-mu {:.2} -> {:.2}",
            r.monotone_violations,
            gaps[0],
            gaps[gaps.len() - 1],
            100.0 * final_gap,
            mu[0],
            mu[5],
            rest[0],
            rest[5]
        ),
    )
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["curve", "--H", "1", "--z", "1", "--samples", "2000", "--seed", "5"],
        &["omega-s", "--H", "0.5", "--y0", "1"],
        &["domain-build", "--construction", "b-empty", "--H", "1", "--px", "0", "--py", "1", "--d", "0.2", "--eps", "0.08"],
    ];
    let mut files = 0;
    let mut mismatched = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        for copy in ["a", "b"] {
            let mut v = vec!["solgraph"];
            v.extend_from_slice(args);
            run_in(&Cli::try_parse_from(v).unwrap(), &dir.path().join(format!("{i}{copy}"))).unwrap();
        }
        let a = dir.path().join(format!("{i}a"));
        for e in fs::read_dir(&a).unwrap() {
            let name = e.unwrap().file_name();
            files += 1;
            if fs::read(a.join(&name)).unwrap() != fs::read(dir.path().join(format!("{i}b")).join(&name)).unwrap() {
                mismatched.push(name.to_string_lossy().into_owned());
            }
        }
    }
    // solve from the built domain, twice
    let dom = dir.path().join("2a/domain.json");
    for copy in ["a", "b"] {
        let v = vec!["solgraph", "solve", "--input", dom.to_str().unwrap(), "--data", "0.1,0,0.1,0", "--h", "0.01"];
        run_in(&Cli::try_parse_from(v).unwrap(), &dir.path().join(format!("s{copy}"))).unwrap();
    }
    for name in ["manifest.csv", "solution.csv", "flux.csv", "mesh.txt"] {
        files += 1;
        if fs::read(dir.path().join("sa").join(name)).unwrap() != fs::read(dir.path().join("sb").join(name)).unwrap() {
            mismatched.push(name.to_string());
        }
    }
    (mismatched.is_empty(), format!("{files} files compared over 4 commands, mismatched: {mismatched:?}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("curve correctness", c1_curves),
        ("constants", c2_constants),
        ("connector counts", c3_connectors),
        ("inequality suite", c4_inequalities),
        ("root chain", c5_root_chain),
        ("constructions", c6_constructions),
        ("PDE solver", c7_solver),
        ("flux", c8_flux),
        ("exhaustion", c9_exhaustion),
        ("determinism", c10_determinism),
    ];
    static PANIC_AT: Mutex<String> = Mutex::new(String::new());
    std::panic::set_hook(Box::new(|info| {
        if let Some(l) = info.location() {
            *PANIC_AT.lock().unwrap() = format!(" at line {}", l.line());
        }
    }));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let (ok, detail) = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(r) => r,
            Err(e) => {
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                (false, format!("panicked{}: {}", PANIC_AT.lock().unwrap(), msg.unwrap_or_default()))
            }
        };
        // density bound over every solve so far, reported with the flux criterion
        let (ok, detail) = if i == 7 {
            let dmax = *MAX_DENSITY.lock().unwrap();
            (ok && dmax <= 1.0 + 1e-8, format!("{detail}, max edgewise density {dmax:.6} (tol 1 + 1e-8)"))
        } else {
            (ok, detail)
        };
        if !ok {
            failed += 1;
        }
        println!(
            "acceptance {:>2} {} [{name}] {detail} ({:.1}s)",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

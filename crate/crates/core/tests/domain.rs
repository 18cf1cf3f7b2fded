use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solgraph_core::curve::*;
use solgraph_core::domain::*;
use solgraph_core::numerics::gauss_legendre;
use solgraph_core::Error;
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

// ---------------------------------------------------------------------------
// Raster oracle: I = int (width(y) / y) dy with the width of each horizontal
// slice found from exact crossings of the boundary arcs.

fn crossings(arcs: &[BoundaryArc], y: f64) -> Vec<f64> {
    let n = 256;
    let mut xs = Vec::new();
    for a in arcs {
        let f = |u: f64| a.point(u).y - y;
        let mut prev = f(0.0);
        for i in 1..=n {
            let (u0, u1) = ((i - 1) as f64 / n as f64, i as f64 / n as f64);
            let cur = f(u1);
            if (prev < 0.0) != (cur < 0.0) {
                let (mut lo, mut hi) = (u0, u1);
                let flo = prev;
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if (f(mid) < 0.0) == (flo < 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                xs.push(a.point(0.5 * (lo + hi)).x);
            }
            prev = cur;
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs
}

fn width(arcs: &[BoundaryArc], y: f64) -> f64 {
    let xs = crossings(arcs, y);
    assert!(xs.len() % 2 == 0, "odd number of crossings at y = {y}");
    xs.chunks(2).map(|c| c[1] - c[0]).sum()
}

fn y_breakpoints(arcs: &[BoundaryArc]) -> Vec<f64> {
    let mut ys = Vec::new();
    for a in arcs {
        ys.push(a.start().y);
        let n = 512;
        let yv: Vec<f64> = (0..=n).map(|i| a.point(i as f64 / n as f64).y).collect();
        for i in 1..n {
            let is_max = yv[i] > yv[i - 1] && yv[i] >= yv[i + 1];
            let is_min = yv[i] < yv[i - 1] && yv[i] <= yv[i + 1];
            if !(is_max || is_min) {
                continue;
            }
            let sign = if is_max { -1.0 } else { 1.0 };
            let (mut lo, mut hi) = ((i - 1) as f64 / n as f64, (i + 1) as f64 / n as f64);
            for _ in 0..200 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if sign * a.point(m1).y < sign * a.point(m2).y {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            ys.push(a.point(0.5 * (lo + hi)).y);
        }
    }
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ys.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * b.abs());
    ys
}

fn raster_integral(arcs: &[BoundaryArc]) -> f64 {
    let ys = y_breakpoints(arcs);
    let mut total = 0.0;
    for w in ys.windows(2) {
        let (a, b) = (w[0], w[1]);
        // smoothstep substitution flattens square-root endpoints
        let g = |u: f64| {
            let y = a + (b - a) * u * u * (3.0 - 2.0 * u);
            width(arcs, y) / y * (b - a) * 6.0 * u * (1.0 - u)
        };
        total += gauss_legendre(g, 0.0, 1.0, 24);
    }
    total
}

// ---------------------------------------------------------------------------

fn seg(a: (f64, f64), b: (f64, f64)) -> BoundaryArc {
    BoundaryArc::new(
        ArcKind::C,
        Geometry::Segment(Segment { a: Point::new(a.0, a.1), b: Point::new(b.0, b.1) }),
        1,
    )
    .unwrap()
}

fn rectangle() -> Vec<BoundaryArc> {
    vec![seg((0.0, 1.0), (1.0, 1.0)), seg((1.0, 1.0), (1.0, 2.0)), seg((1.0, 2.0), (0.0, 2.0)), seg((0.0, 2.0), (0.0, 1.0))]
}

/// Closed region bounded by two arcs with common endpoints, counterclockwise.
fn lens(a: &ArcOnCurve, b: &ArcOnCurve) -> Vec<BoundaryArc> {
    let oa = 1;
    let ob = if b.end().dist(&a.start()) < b.start().dist(&a.start()) { 1 } else { -1 };
    let mut arcs = vec![
        BoundaryArc::new(ArcKind::A, Geometry::Curve(*a), oa).unwrap(),
        BoundaryArc::new(ArcKind::A, Geometry::Curve(*b), ob).unwrap(),
    ];
    if boundary_form_integral(&arcs) < 0.0 {
        arcs = arcs.iter().rev().map(|x| x.reversed()).collect();
    }
    arcs
}

fn construction_name(e: &Error) -> Option<&str> {
    match e {
        Error::Construction { inequality, .. } => Some(inequality.as_str()),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Region integral

#[test]
fn rectangle_integral_is_ln2() {
    let i = region_integral(&rectangle()).unwrap();
    assert!((i - 2f64.ln()).abs() < 1e-13, "{i}");
}

#[test]
fn double_traversal_cancels() {
    let d = build_omega_s(1.0, 0.5, 0.3).unwrap();
    let mut arcs = d.arcs.clone();
    arcs.extend(d.arcs.iter().rev().map(|a| a.reversed()));
    assert!(boundary_form_integral(&arcs).abs() < 1e-12);
}

#[test]
fn region_integral_rejects_open_and_crossing_boundaries() {
    let mut open = rectangle();
    open.pop();
    assert!(matches!(region_integral(&open), Err(Error::Geometry(_))));
    let bowtie =
        vec![seg((0.0, 1.0), (1.0, 2.0)), seg((1.0, 2.0), (1.0, 1.0)), seg((1.0, 1.0), (0.0, 2.0)), seg((0.0, 2.0), (0.0, 1.0))];
    assert!(matches!(region_integral(&bowtie), Err(Error::Geometry(_))));
}

#[test]
fn reversal_flips_boundary_form() {
    let d = build_omega_s(1.0, 1.0, 0.2).unwrap();
    let rev: Vec<BoundaryArc> = d.arcs.iter().rev().map(|a| a.reversed()).collect();
    let (f, b) = (boundary_form_integral(&d.arcs), boundary_form_integral(&rev));
    assert!((f + b).abs() < 1e-12 * f.abs());
}

#[test]
fn omega_integral_matches_raster_oracle() {
    let d = build_omega_s(1.0, 0.5, 0.3).unwrap();
    let i = d.integral().unwrap();
    let r = raster_integral(&d.arcs);
    assert!((i - r).abs() < 1e-6, "boundary form {i} vs raster {r}");
}

#[test]
fn constructed_domains_match_raster_oracle() {
    let c = CurveParams::new(0.0, 1.0, 1.0).unwrap();
    let domains = vec![
        build_b_empty(Point::new(0.0, 10.0), 2.0, 0.05, 1.0).unwrap(),
        build_a_empty(c, FRAC_PI_2, TangencyCase::VerticalTangent { d: 0.05, eps: 0.005 }).unwrap(),
        build_a_empty(c, 0.0, TangencyCase::HorizontalTangent { height: 0.04, base: 0.2 }).unwrap(),
        build_omega_s(2.0, 0.5, 0.5).unwrap(),
    ];
    for d in &domains {
        let i = d.integral().unwrap();
        let r = raster_integral(&d.arcs);
        assert!((i - r).abs() <= 1e-5 * i, "boundary form {i} vs raster {r}");
    }
}

// ---------------------------------------------------------------------------
// phi, e, d

#[test]
fn phi_endpoints_and_residual() {
    for h in [0.5, 1.0] {
        let t = constants(h).unwrap().t;
        assert!((phi_of_s(h, 0.0).unwrap() - (1.0 + t)).abs() < 1e-9);
        assert!((phi_of_s(h, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }
    let phi = phi_of_s(1.0, 0.5).unwrap();
    assert!((1.0..=1.0 + constants(1.0).unwrap().t).contains(&phi));
    assert!(phi_residual(1.0, 0.5, phi).abs() <= 1e-9);
    let mut prev = f64::INFINITY;
    for i in 0..=20 {
        let p = phi_of_s(0.5, i as f64 / 20.0).unwrap();
        assert!(p < prev);
        prev = p;
    }
}

#[test]
fn e_and_d_residuals() {
    for h in [0.5, 1.0] {
        for s in [0.05, 0.3, 0.7] {
            let e = e_of_s(h, s).unwrap();
            let d = d_of_s(h, s).unwrap();
            let phi = phi_of_s(h, s).unwrap();
            assert!(e_residual(h, s, e).unwrap().abs() < 1e-9);
            assert!(d_residual(h, s, d).abs() < 1e-9);
            assert!((0.0..phi).contains(&e));
        }
    }
}

#[test]
fn small_s_limits() {
    // d vanishes with s; the nontrivial root e tends to 1 + T_H, so the
    // top arc shrinks to the point P3 of the loop
    for h in [0.5, 1.0] {
        let t = constants(h).unwrap().t;
        let s = 1e-6;
        assert!(d_of_s(h, s).unwrap() < 3e-6);
        assert!((e_of_s(h, s).unwrap() - (1.0 + t)).abs() < 1e-3);
        let near = omega_data(1.0, h, 1e-5).unwrap();
        let zero = omega_data(1.0, h, 0.0).unwrap();
        assert!(near.beta < 0.02, "beta = {}", near.beta);
        assert!((near.integral - zero.integral).abs() < 1e-3 * zero.integral);
        assert!((near.alpha - zero.alpha).abs() < 1e-2 * zero.alpha);
    }
}

#[test]
fn claims_on_s_grid() {
    for h in [0.5, 1.0] {
        for i in 1..=50 {
            let s = i as f64 / 51.0;
            let e = e_of_s(h, s).unwrap();
            let d = d_of_s(h, s).unwrap();
            let phi = phi_of_s(h, s).unwrap();
            assert!(e >= 2.0 * (phi - 1.0), "claim 1 at H={h}, s={s}");
            assert!(s < d && d < 2.0 * s, "claim 2 at H={h}, s={s}");
        }
    }
}

// ---------------------------------------------------------------------------
// Omega_s

#[test]
fn omega_s_structure() {
    let d = build_omega_s(1.0, 0.5, 0.2).unwrap();
    assert_eq!(d.kinds(), vec![ArcKind::A, ArcKind::B, ArcKind::A, ArcKind::B]);
    d.validate().unwrap();
    // symmetric about x = 0: D and E pairs
    let v = d.vertices();
    assert!((v[0].x + v[3].x).abs() < 1e-12 && (v[0].y - v[3].y).abs() < 1e-12);
    assert!((v[1].x + v[2].x).abs() < 1e-12 && (v[1].y - v[2].y).abs() < 1e-12);
    // D and E on the loop at heights y0 e^{s/2H} and y0 e^{phi/2H}
    let phi = phi_of_s(0.5, 0.2).unwrap();
    assert!((v[0].y - 0.2f64.exp()).abs() < 1e-12);
    assert!((v[1].y - phi.exp()).abs() < 1e-12);
}

#[test]
fn top_arc_height_matches_e() {
    for (y0, h, s) in [(1.0, 0.5, 0.2), (1.0, 1.0, 0.4), (2.0, 0.5, 0.6)] {
        let d = build_omega_s(y0, h, s).unwrap();
        let e = e_of_s(h, s).unwrap();
        let v = d.vertices();
        let (ep, em) = (v[1], v[2]);
        let bases: Vec<f64> = connectors(&em, &ep, h).unwrap().iter().map(|a| a.curve.z).collect();
        let target = y0 * (e * 0.5 / h).exp();
        let best = bases.iter().map(|z| (z - target).abs() / target).fold(f64::INFINITY, f64::min);
        assert!(best <= 1e-8, "P1 heights {bases:?} vs {target}");
        // the other arc below is the loop itself
        assert!(bases.iter().any(|z| (z - y0).abs() <= 1e-8 * y0));
    }
}

#[test]
fn s_zero_brackets_the_collision() {
    let s0 = s_zero(1.0, 0.5).unwrap();
    assert!(s0 > 0.0 && s0 < 1.0);
    let gap = |s: f64| d_of_s(0.5, s).unwrap() - e_of_s(0.5, s).unwrap();
    assert!(gap(s0).abs() < 1e-9);
    assert!(gap(0.99 * s0) < 0.0 && gap(1.01 * s0) > 0.0);
    build_omega_s(1.0, 0.5, 0.999 * s0).unwrap();
    assert!(matches!(build_omega_s(1.0, 0.5, 1.001 * s0), Err(Error::Geometry(_))));
}

#[test]
fn s_star_root_chain() {
    for (y0, h) in [(1.0, 0.5), (1.0, 1.0), (2.0, 0.5)] {
        let r = s_star(y0, h).unwrap();
        assert!(r.f0 > 0.0 && r.f_s0 < 0.0);
        assert!(r.s_star > 0.0 && r.s_star < r.s0);
        assert!(r.at_root.f.abs() <= 1e-6 * r.at_root.alpha);
        let d = build_omega_s(y0, h, r.s_star).unwrap();
        let balance = d.length_of(ArcKind::A) - d.length_of(ArcKind::B) - 2.0 * h * d.integral().unwrap();
        assert!(balance.abs() <= 1e-6 * r.at_root.alpha);
    }
}

#[test]
fn f_at_zero_is_loop_balance() {
    // the loop from P3 around P1: F(0) = alpha - 2H I with alpha = 2 l(half loop)
    let (y0, h) = (1.0, 0.5);
    let c = constants(h).unwrap();
    let curve = CurveParams::new(0.0, y0, h).unwrap();
    let t3 = p3_parameter(c.t);
    let l = ArcOnCurve::new(curve, -t3, t3).unwrap().length();
    let o = omega_data(y0, h, 0.0).unwrap();
    assert!((o.alpha - l).abs() < 1e-9 * l);
    assert_eq!(o.beta, 0.0);
    assert!(o.f > 0.0);
}

#[test]
fn y0_scales_lengths_and_integral() {
    let a = omega_data(1.0, 0.5, 0.3).unwrap();
    let b = omega_data(2.0, 0.5, 0.3).unwrap();
    assert!((b.alpha - 2.0 * a.alpha).abs() < 1e-10);
    assert!((b.beta - 2.0 * a.beta).abs() < 1e-10);
    assert!((b.integral - 2.0 * a.integral).abs() < 1e-10);
}

// ---------------------------------------------------------------------------
// Conditions on Omega_s

#[test]
fn omega_s_star_passes_c_empty() {
    for (y0, h) in [(1.0, 0.5), (1.0, 1.0), (2.0, 0.5)] {
        let r = s_star(y0, h).unwrap();
        let d = build_omega_s(y0, h, r.s_star).unwrap();
        let rep = check_conditions(&d, Mode::CEmpty).unwrap();
        assert!(rep.pass, "violating {:?}", rep.violating.map(|i| &rep.rows[i]));
        assert!(rep.rows.iter().any(|r| r.whole));
        for s in [0.5 * r.s_star, 0.5 * (r.s_star + r.s0)] {
            let d = build_omega_s(y0, h, s).unwrap();
            let rep = check_conditions(&d, Mode::CEmpty).unwrap();
            assert!(!rep.pass);
            assert!(rep.balance.unwrap().abs() > rep.balance_tol.unwrap());
        }
    }
}

#[test]
fn omega_s_star_polygon_cases() {
    let r = s_star(1.0, 0.5).unwrap();
    let d = build_omega_s(1.0, 0.5, r.s_star).unwrap();
    let polys = enumerate_polygons(&d).unwrap();
    let whole = d.integral().unwrap();
    for n in [2, 3, 4] {
        assert!(polys.iter().any(|p| p.vertices.len() == n), "no {n}-vertex polygon");
    }
    for p in &polys {
        assert!(p.alpha + p.beta <= p.perimeter * (1.0 + 1e-12));
        assert!(p.area_weight > 0.0 && p.area_weight <= whole * (1.0 + 1e-9));
        if p.vertices.len() == 2 {
            // no polygon on two horizontally aligned vertices
            assert!((p.vertices[0].y - p.vertices[1].y).abs() > 1e-6);
            // an A arc and its mirror image
            assert_eq!(p.sides.iter().filter(|s| s.kind == Some(ArcKind::A)).count(), 1);
            assert!((p.sides[0].arc.length() - p.sides[1].arc.length()).abs() < 1e-9);
        }
    }
    // one diagonal of the domain splits it into two 3-gons
    assert!(polys.iter().any(|p| p.vertices.len() == 3 && p.sides.iter().filter(|s| s.boundary.is_none()).count() == 1));
}

#[test]
fn enumeration_on_domain_without_a_or_b_arcs_is_empty() {
    let c1 = CircleArc::new(Point::new(0.0, 5.0), 1.0, 0.0, PI).unwrap();
    let c2 = CircleArc::new(Point::new(0.0, 5.0), 1.0, PI, 2.0 * PI).unwrap();
    let d = AdmissibleDomain {
        h: 1.0,
        arcs: vec![
            BoundaryArc::new(ArcKind::C, Geometry::Circle(c1), 1).unwrap(),
            BoundaryArc::new(ArcKind::C, Geometry::Circle(c2), 1).unwrap(),
        ],
        b_star: vec![],
    };
    d.validate().unwrap();
    assert!(enumerate_polygons(&d).unwrap().is_empty());
}

#[test]
fn modes_require_matching_arc_kinds() {
    let d = build_omega_s(1.0, 0.5, 0.3).unwrap();
    assert!(matches!(check_conditions(&d, Mode::BEmpty), Err(Error::Argument(_))));
    assert!(matches!(check_conditions(&d, Mode::AEmpty), Err(Error::Argument(_))));
}

#[test]
fn dilation_scales_and_keeps_verdicts() {
    let r = s_star(1.0, 0.5).unwrap();
    let d = build_omega_s(1.0, 0.5, r.s_star).unwrap();
    let lam = 3.0;
    let big = d.scaled(lam).unwrap();
    big.validate().unwrap();
    assert!((big.integral().unwrap() - lam * d.integral().unwrap()).abs() < 1e-9);
    assert!((big.length_of(ArcKind::A) - lam * d.length_of(ArcKind::A)).abs() < 1e-9);
    assert!((big.length_of(ArcKind::B) - lam * d.length_of(ArcKind::B)).abs() < 1e-9);
    let (a, b) = (check_conditions(&d, Mode::CEmpty).unwrap(), check_conditions(&big, Mode::CEmpty).unwrap());
    assert_eq!(a.pass, b.pass);
    assert_eq!(a.rows.len(), b.rows.len());
    let bd = build_b_empty(Point::new(0.0, 10.0), 2.0, 0.05, 1.0).unwrap();
    let bd2 = bd.scaled(0.5).unwrap();
    assert_eq!(check_conditions(&bd, Mode::BEmpty).unwrap().pass, check_conditions(&bd2, Mode::BEmpty).unwrap().pass);
}

// ---------------------------------------------------------------------------
// Constructions

#[test]
fn b_empty_example() {
    let d = build_b_empty(Point::new(0.0, 10.0), 2.0, 0.05, 1.0).unwrap();
    assert_eq!(d.kinds(), vec![ArcKind::A, ArcKind::C, ArcKind::A, ArcKind::C]);
    for a in &d.arcs {
        match a.kind {
            ArcKind::A => assert!(a.length() < 1.0),
            ArcKind::C => {
                for i in 0..=50 {
                    let u = i as f64 / 50.0;
                    let k = a.curvature(u);
                    assert!((k - 1.0).abs() < 1e-12);
                    assert!(k > 2.0 / a.point(u).y);
                }
            }
            ArcKind::B => unreachable!(),
        }
    }
    let rep = check_conditions(&d, Mode::BEmpty).unwrap();
    assert!(rep.pass);
    assert!(!rep.rows.is_empty());
}

#[test]
fn b_empty_errors_name_the_inequality() {
    let p = Point::new(0.0, 10.0);
    let bound = 2.0 * 10.0 / 5.0;
    let e = build_b_empty(p, bound, 0.05, 1.0).unwrap_err();
    assert_eq!(construction_name(&e), Some("d < 2 y(p) / (3 + 2H)"));
    let e = build_b_empty(p, 2.0, 5.0, 1.0).unwrap_err();
    assert_eq!(construction_name(&e), Some("eps < y(q1) (e^{T_H/2H} - 1)"));
    let e = build_b_empty(p, 2.0, 2.5, 1.0).unwrap_err();
    assert_eq!(construction_name(&e), Some("length(A_i) < d/2"));
}

#[test]
fn b_empty_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let h = rng.random_range(0.3..1.4);
        let p = Point::new(rng.random_range(-5.0..5.0), rng.random_range(1.0..20.0));
        let d = rng.random_range(0.1..0.95) * 2.0 * p.y / (3.0 + 2.0 * h);
        let eps = rng.random_range(0.05..0.5) * d;
        let dom = build_b_empty(p, d, eps, h).unwrap();
        assert!(check_conditions(&dom, Mode::BEmpty).unwrap().pass);
    }
}

fn generic_bounds(c: &CurveParams, t: f64) -> (f64, f64) {
    let h = c.h;
    let y = gamma(c, t).y;
    let dmax = (2.0 * y / 3.0 * (1.0 - (-0.5 / h).exp())).min(2.0 * y / (8.0 * h + 3.0));
    let emax = 2.0 * y * (-1.0 / h).exp() * constants(h).unwrap().l;
    (dmax, emax)
}

#[test]
fn a_empty_generic() {
    let c = CurveParams::new(0.0, 1.0, 1.0).unwrap();
    let t = 0.7;
    let (dmax, emax) = generic_bounds(&c, t);
    let d = build_a_empty(c, t, TangencyCase::Generic { d: 0.5 * dmax, eps: 0.1 * emax.min(dmax) }).unwrap();
    assert_eq!(d.kinds(), vec![ArcKind::B, ArcKind::C, ArcKind::B, ArcKind::C]);
    assert_eq!(d.b_star.len(), 2);
    let rep = check_conditions(&d, Mode::AEmpty).unwrap();
    assert!(rep.pass);
    for r in &rep.rows {
        assert!(r.beta + 2.0 * c.h * r.area_weight < r.perimeter - r.beta);
    }
    let e = build_a_empty(c, t, TangencyCase::Generic { d: dmax, eps: 0.01 * emax }).unwrap_err();
    assert_eq!(construction_name(&e), Some("d < min{(2y(p)/3)(1 - e^{-1/2H}), 2y(p)/(8H+3)}"));
    let e = build_a_empty(c, t, TangencyCase::Generic { d: 0.5 * dmax, eps: 1.01 * emax }).unwrap_err();
    assert_eq!(construction_name(&e), Some("eps < 2 y(p) e^{-1/H} L_H"));
}

#[test]
fn a_empty_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let h = rng.random_range(0.4..1.2);
        let c = CurveParams::new(rng.random_range(-1.0..1.0), rng.random_range(0.5..3.0), h).unwrap();
        let t = rng.random_range(0.3..1.3) + PI * rng.random_range(0..4) as f64;
        let (dmax, emax) = generic_bounds(&c, t);
        let dd = rng.random_range(0.2..0.9) * dmax;
        let eps = rng.random_range(0.05..0.2) * emax.min(dd);
        let dom = build_a_empty(c, t, TangencyCase::Generic { d: dd, eps }).unwrap();
        assert!(check_conditions(&dom, Mode::AEmpty).unwrap().pass);
    }
}

#[test]
fn a_empty_vertical_tangent() {
    for h in [0.5, 1.0] {
        let c = CurveParams::new(0.0, 1.0, h).unwrap();
        for t in [FRAC_PI_2, -FRAC_PI_2] {
            let y = gamma(&c, t).y;
            let dmax = (y * (1.0 - (-0.5 / h).exp())).min(2.0 * y / (8.0 * h + 1.0));
            let d = build_a_empty(c, t, TangencyCase::VerticalTangent { d: 0.5 * dmax, eps: 0.1 * dmax }).unwrap();
            assert!(check_conditions(&d, Mode::AEmpty).unwrap().pass);
            // the companions are the horizontal connectors on the far side
            for (i, star) in &d.b_star {
                let b = &d.arcs[*i];
                let hc = horizontal_connectors(&b.start(), &b.end(), h).unwrap();
                assert!(hc.iter().any(|a| same_arc(a, star)));
            }
            let e = build_a_empty(c, t, TangencyCase::VerticalTangent { d: dmax, eps: 0.01 * dmax }).unwrap_err();
            assert_eq!(construction_name(&e), Some("d < min{y(p)(1 - e^{-1/2H}), 2y(p)/(8H+1)}"));
        }
    }
}

fn same_arc(a: &ArcOnCurve, b: &ArcOnCurve) -> bool {
    let (pa, mut pb) = (a.sample(20), b.sample(20));
    let close = |p: &[Point], q: &[Point]| p.iter().zip(q).all(|(x, y)| x.dist(y) < 1e-9);
    if close(&pa, &pb) {
        return true;
    }
    pb.reverse();
    close(&pa, &pb)
}

#[test]
fn a_empty_horizontal_tangent() {
    for h in [0.5, 1.0] {
        let c = CurveParams::new(0.0, 1.0, h).unwrap();
        let ct = constants(h).unwrap();
        for t in [0.0, PI] {
            let y = gamma(&c, t).y;
            let hb = 2.0 * y * (ct.t / (4.0 * h)).tanh();
            let bb = y / (4.0 * h + 1.0);
            let d = build_a_empty(c, t, TangencyCase::HorizontalTangent { height: 0.1 * hb, base: bb }).unwrap();
            assert!(check_conditions(&d, Mode::AEmpty).unwrap().pass);
            // each companion is the mirror image of its B arc
            for (i, star) in &d.b_star {
                let b = &d.arcs[*i];
                let x0 = b.start().x;
                for p in star.sample(32) {
                    let m = Point::new(2.0 * x0 - p.x, p.y);
                    let near = b.sample(4096).iter().map(|q| q.dist(&m)).fold(f64::INFINITY, f64::min);
                    assert!(near < 1e-3 * bb);
                }
            }
            let e = build_a_empty(c, t, TangencyCase::HorizontalTangent { height: 1.01 * hb, base: bb }).unwrap_err();
            assert_eq!(construction_name(&e), Some("h < 2 y(p) tanh(T_H/4H)"));
            // near the height bound the arcs outgrow half the base, so the
            // construction stops at the arc length requirement instead
            let e = build_a_empty(c, t, TangencyCase::HorizontalTangent { height: 0.99 * hb, base: bb }).unwrap_err();
            assert_eq!(construction_name(&e), Some("length(B_i) < b/2"));
            let e = build_a_empty(c, t, TangencyCase::HorizontalTangent { height: 0.1 * hb, base: 1.01 * bb }).unwrap_err();
            assert_eq!(construction_name(&e), Some("b <= y(p)/(4H+1)"));
        }
    }
}

#[test]
fn a_empty_rejects_wrong_case() {
    let c = CurveParams::new(0.0, 1.0, 1.0).unwrap();
    assert!(matches!(
        build_a_empty(c, 0.7, TangencyCase::HorizontalTangent { height: 0.01, base: 0.1 }),
        Err(Error::Argument(_))
    ));
    assert!(matches!(build_a_empty(c, 0.0, TangencyCase::Generic { d: 0.01, eps: 0.001 }), Err(Error::Argument(_))));
}

#[test]
fn companions_are_convex_lenses() {
    let c = CurveParams::new(0.0, 1.0, 1.0).unwrap();
    let r = s_star(1.0, 0.5).unwrap();
    let doms = vec![
        build_a_empty(c, 0.0, TangencyCase::HorizontalTangent { height: 0.04, base: 0.2 }).unwrap(),
        build_a_empty(c, FRAC_PI_2, TangencyCase::VerticalTangent { d: 0.05, eps: 0.005 }).unwrap(),
        build_omega_s(1.0, 0.5, r.s_star).unwrap(),
    ];
    for d in &doms {
        for (i, star) in &d.b_star {
            let b = &d.arcs[*i];
            // lens: B forwards, then B* back to the start
            let mut poly = b.sample(100);
            poly.pop();
            let mut s = star.sample(100);
            if s[0].dist(&b.end()) > s[100].dist(&b.end()) {
                s.reverse();
            }
            s.pop();
            poly.extend(s);
            let n = poly.len();
            let turns: Vec<f64> = (0..n)
                .map(|k| {
                    let (a, p, q) = (poly[(k + n - 1) % n], poly[k], poly[(k + 1) % n]);
                    (p.x - a.x) * (q.y - p.y) - (p.y - a.y) * (q.x - p.x)
                })
                .collect();
            assert!(turns.iter().all(|t| *t < 0.0) || turns.iter().all(|t| *t > 0.0));
            // the search finds a companion with the same point set
            let found = b_star(d, *i).unwrap();
            assert!(same_arc(&found, star));
        }
    }
}

#[test]
fn validation_rejects_broken_domains() {
    let d = build_omega_s(1.0, 0.5, 0.3).unwrap();
    let mut no_star = d.clone();
    no_star.b_star.clear();
    assert!(no_star.validate().is_err());
    let mut swapped = d.clone();
    swapped.arcs.swap(0, 1);
    assert!(swapped.validate().is_err());
    let mut wrong = d.clone();
    wrong.arcs[0].kind = ArcKind::B;
    assert!(wrong.validate().is_err());
}

// ---------------------------------------------------------------------------
// Inequalities from the connector lemmas

#[test]
fn type_one_lenses_satisfy_length_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let h = rng.random_range(0.3..2.0);
        let z = rng.random_range(0.5..5.0);
        let t = constants(h).unwrap().t;
        let gap = rng.random_range(0.02..0.98) * z * ((t * 0.5 / h).exp() - 1.0);
        let x = rng.random_range(-3.0..3.0);
        let v = vertical_connectors(&Point::new(x, z), &Point::new(x, z + gap), h).unwrap();
        let l = v[0].length();
        assert!((v[1].length() - l).abs() < 1e-9 * l);
        let i = region_integral(&lens(&v[0], &v[1])).unwrap();
        assert!(2.0 * l > 2.0 * h * i, "H={h} z={z} gap={gap}: 2l={} 2HI={}", 2.0 * l, 2.0 * h * i);
    }
}

#[test]
fn close_horizontal_lenses_satisfy_length_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
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
        assert!(down.length() < up.length() + 2.0 * h * i, "H={h} z={z} w={w}");
        assert!(up.length() < down.length() + 2.0 * h * i);
    }
}

// ---------------------------------------------------------------------------
// Subsolution certificate

#[test]
fn small_domain_feasibility() {
    assert!(small_domain_feasible(1.0, 100.0, 0.01));
    assert!(small_domain_feasible(SQRT_2, 1e6, 1e-6));
    assert!(small_domain_feasible(10.0, 1e-9, 1.0));
    let q = 3f64.powf(SQRT_2);
    let bound = SQRT_2 * (q + 1.0) / (q - 1.0);
    assert!((bound - 2.173).abs() < 1e-3);
    assert!(!small_domain_feasible(10.0, 1.0, 1.0));
    assert!(small_domain_feasible(bound - 1e-9, 1.0, 1.0));
    assert!(!small_domain_feasible(bound + 1e-9, 1.0, 1.0));
}

// ---------------------------------------------------------------------------
// Files

#[test]
fn json_round_trip_is_bit_exact() {
    let c = CurveParams::new(0.3, 1.7, 0.8).unwrap();
    let doms = vec![
        build_omega_s(1.0, 0.5, 0.3).unwrap(),
        build_b_empty(Point::new(0.1, 7.0), 1.0, 0.03, 0.7).unwrap(),
        build_a_empty(c, 0.0, TangencyCase::HorizontalTangent { height: 0.02, base: 0.1 }).unwrap(),
        AdmissibleDomain { h: 0.5, arcs: rectangle(), b_star: vec![] },
    ];
    for d in &doms {
        let text = serde_json::to_string_pretty(&domain_to_json(d)).unwrap();
        let back = domain_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(&back, d);
    }
    for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, f64::MAX] {
        assert_eq!(parse_real(&format_real(v)).unwrap().to_bits(), v.to_bits());
    }
}

#[test]
fn json_rejects_malformed_documents() {
    let bad = [
        r#"{"version": 2, "H": "1", "arcs": []}"#,
        r#"{"version": 1, "arcs": []}"#,
        r#"{"version": 1, "H": "1", "arcs": [{"kind": "A", "geometry": "spline", "orientation": 1}]}"#,
        r#"{"version": 1, "H": "1", "arcs": [], "b_star": [{"arc": 3}]}"#,
    ];
    for b in bad {
        let v: serde_json::Value = serde_json::from_str(b).unwrap();
        assert!(matches!(domain_from_json(&v), Err(Error::Parse(_))), "{b}");
    }
}

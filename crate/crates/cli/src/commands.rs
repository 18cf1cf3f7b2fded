//! Bodies of the subcommands.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solgraph_core::curve::{
    constants, curvature_residual, gamma, k_of_h, lbar, loop_points, CurveParams, Point,
};
use solgraph_core::domain::{
    build_a_empty, build_b_empty, build_omega_s, check_conditions, domain_from_json, domain_to_json, omega_data,
    s_star, s_zero, AdmissibleDomain, ArcKind, Mode, OmegaData, TangencyCase,
};
use solgraph_core::solver::{
    boundary_from_arcs, divergence_mask, exhaustion_mesh, field_from_csv, field_to_csv, flux_report, flux_via_path,
    make_mesh, mesh_from_text, mesh_to_text, solve_dirichlet, solve_exhaustion, FluxReport, Mesh,
};

use crate::emit::{Cell, Figure, Label, Marker, Polyline};
use crate::{Cli, Command, Construction, Output, RunError, Tangency};

/// Points per arc in figures.
const FIGURE_SAMPLES: usize = 512;

fn usage(m: impl Into<String>) -> RunError {
    RunError::Usage(m.into())
}

fn positive(name: &str, v: f64) -> Result<f64, RunError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("{name} must be positive and finite, got {v}")))
    }
}

fn required(name: &str, v: Option<f64>) -> Result<f64, RunError> {
    v.ok_or_else(|| usage(format!("--{name} is required for this construction")))
}

fn parse_reals(s: &str) -> Result<Vec<f64>, RunError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("bad number {t:?} in {s:?}"))))
        .collect()
}

fn parse_point(s: &str) -> Result<Point, RunError> {
    match parse_reals(s)?.as_slice() {
        [x, y] => Ok(Point::new(*x, *y)),
        _ => Err(usage(format!("expected \"x,y\", got {s:?}"))),
    }
}

fn parse_mode(s: &str) -> Result<Mode, RunError> {
    s.parse().map_err(RunError::from)
}

fn read(path: &Path) -> Result<String, RunError> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn read_domain(path: &Path) -> Result<AdmissibleDomain, RunError> {
    let v: serde_json::Value =
        serde_json::from_str(&read(path)?).map_err(|e| usage(format!("{}: invalid JSON: {e}", path.display())))?;
    Ok(domain_from_json(&v)?)
}

fn kind_name(k: ArcKind) -> &'static str {
    match k {
        ArcKind::A => "A",
        ArcKind::B => "B",
        ArcKind::C => "C",
    }
}

fn kind_class(k: ArcKind) -> String {
    format!("arc-{}", kind_name(k).to_lowercase())
}

/// Boundary arcs by kind, companions dashed, each arc labeled.
fn domain_figure(d: &AdmissibleDomain, labels: Option<&[&str]>) -> Figure {
    let mut fig = Figure::default();
    for (i, a) in d.arcs.iter().enumerate() {
        fig.polylines.push(Polyline { points: a.sample(FIGURE_SAMPLES), class: kind_class(a.kind) });
        let text = match labels {
            Some(l) => l[i].to_string(),
            None => format!("{}{i}", kind_name(a.kind)),
        };
        fig.labels.push(Label { at: a.point(0.5), text });
    }
    for (_, c) in &d.b_star {
        fig.polylines.push(Polyline { points: c.sample(FIGURE_SAMPLES), class: "companion".into() });
    }
    fig
}

fn mesh_figure(m: &Mesh, fig: &mut Figure) {
    for t in &m.triangles {
        let mut p: Vec<Point> = t.iter().map(|&i| m.nodes[i]).collect();
        p.push(p[0]);
        fig.polylines.insert(0, Polyline { points: p, class: "mesh".into() });
    }
}

fn mesh_size(d: &AdmissibleDomain, h: Option<f64>) -> Result<f64, RunError> {
    match h {
        Some(h) => positive("--h", h),
        None => Ok(d.diameter() / 50.0),
    }
}

fn flux_rows(d: &AdmissibleDomain, f: &FluxReport, kinds: Option<&[ArcKind]>) -> Vec<Vec<Cell>> {
    let kinds = kinds.map(<[ArcKind]>::to_vec).unwrap_or_else(|| d.kinds());
    (0..f.arcs.len())
        .map(|k| {
            let a = f.arcs[k];
            vec![a.into(), kind_name(kinds[a]).into(), f.flux[k].into(), f.length[k].into(), f.max_density[k].into()]
        })
        .collect()
}

const FLUX_HEADER: [&str; 5] = ["arc", "kind", "flux", "length", "max_density"];

pub fn dispatch(cli: &Cli, out: &mut Output) -> Result<(), RunError> {
    match &cli.command {
        Command::Constants { h } => run_constants(*h, out),
        Command::Curve { h, z, w, samples, t_max, checks } => run_curve(cli, *h, *z, *w, *samples, *t_max, *checks, out),
        Command::DomainBuild { .. } => run_domain_build(cli, out),
        Command::DomainCheck { input, mode } => {
            let d = read_domain(input)?;
            let r = check_conditions(&d, parse_mode(mode)?)?;
            let rows: Vec<Vec<Cell>> = r
                .rows
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    vec![
                        i.into(),
                        p.vertices.into(),
                        p.alpha.into(),
                        p.beta.into(),
                        p.perimeter.into(),
                        p.area_weight.into(),
                        p.slack_alpha.into(),
                        p.slack_beta.into(),
                        p.whole.into(),
                        p.pass.into(),
                    ]
                })
                .collect();
            out.csv(
                "conditions.csv",
                &["polygon", "vertices", "alpha", "beta", "perimeter", "area_weight", "slack_alpha", "slack_beta", "whole", "pass"],
                &rows,
            )?;
            let summary = vec![
                vec!["mode".into(), r.mode.name().into()],
                vec!["pass".into(), r.pass.into()],
                vec!["polygons".into(), r.rows.len().into()],
                vec!["balance".into(), r.balance.into()],
                vec!["balance_tol".into(), r.balance_tol.into()],
                vec!["violating".into(), r.violating.into()],
            ];
            out.csv("summary.csv", &["key", "value"], &summary)
        }
        Command::OmegaS { h, y0, samples } => run_omega_s(*h, *y0, *samples, out),
        Command::Solve { input, mesh_h, data } => run_solve(cli, input, *mesh_h, data.as_deref(), out),
        Command::Exhaust { .. } => run_exhaust(cli, out),
        Command::Flux { input, mesh, field, arc, via } => run_flux(input, mesh, field, *arc, via, out),
    }
}

fn run_constants(h: f64, out: &mut Output) -> Result<(), RunError> {
    positive("--H", h)?;
    let c = constants(h)?;
    let k = k_of_h(h)?;
    let l1 = lbar(h, 1.0)?;
    let expected = 2.0 * (-0.5 / h).exp() * c.l;
    let row = vec![
        h.into(),
        c.l.into(),
        c.m.into(),
        c.t.into(),
        c.t_residual(h)?.into(),
        l1.into(),
        expected.into(),
        (l1 - expected).into(),
        k.k.into(),
        k.t0.into(),
    ];
    out.csv(
        "constants.csv",
        &["H", "L", "M", "T", "T_residual", "lbar_1", "lbar_1_expected", "lbar_1_residual", "K", "t0"],
        &[row],
    )
}

#[allow(clippy::too_many_arguments)]
fn run_curve(cli: &Cli, h: f64, z: f64, w: f64, samples: usize, t_max: f64, checks: usize, out: &mut Output) -> Result<(), RunError> {
    positive("--H", h)?;
    positive("--z", z)?;
    positive("--t-max", t_max)?;
    if samples < FIGURE_SAMPLES {
        return Err(usage(format!("--samples must be at least {FIGURE_SAMPLES}")));
    }
    if !w.is_finite() {
        return Err(usage("--w must be finite"));
    }
    let c = CurveParams::new(w, z, h)?;
    let ts: Vec<f64> = (0..samples).map(|i| -t_max + 2.0 * t_max * i as f64 / (samples - 1) as f64).collect();
    let pts: Vec<Point> = ts.iter().map(|&t| gamma(&c, t)).collect();
    let rows: Vec<Vec<Cell>> = ts.iter().zip(&pts).map(|(&t, p)| vec![t.into(), p.x.into(), p.y.into()]).collect();
    out.csv("curve.csv", &["t", "x", "y"], &rows)?;

    let lp = loop_points(&c, &constants(h)?);
    let named = [
        ("P1", lp.p1),
        ("P2+", lp.p2_plus),
        ("P2-", lp.p2_minus),
        ("P3", lp.p3),
        ("P4+", lp.p4_plus),
        ("P4-", lp.p4_minus),
    ];
    let rows: Vec<Vec<Cell>> = named.iter().map(|(n, p)| vec![(*n).into(), p.x.into(), p.y.into()]).collect();
    out.csv("points.csv", &["label", "x", "y"], &rows)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let rows: Vec<Vec<Cell>> = (0..checks)
        .map(|_| {
            let t = rng.random_range(-t_max..t_max);
            vec![t.into(), curvature_residual(&c, t).into()]
        })
        .collect();
    out.csv("checks.csv", &["t", "curvature_residual"], &rows)?;

    let mut fig = Figure { polylines: vec![Polyline { points: pts, class: "curve".into() }], ..Default::default() };
    for (n, p) in named {
        fig.markers.push(Marker { at: p, class: "point".into() });
        fig.labels.push(Label { at: p, text: n.into() });
    }
    out.svg("curve.svg", &fig)
}

fn run_domain_build(cli: &Cli, out: &mut Output) -> Result<(), RunError> {
    let Command::DomainBuild { construction, h, px, py, d, eps, w, z, t, case, height, base, y0, s } = &cli.command else {
        unreachable!()
    };
    let h = positive("--H", *h)?;
    let mut labels = None;
    let dom = match construction {
        Construction::BEmpty => {
            let p = Point::new(required("px", *px)?, required("py", *py)?);
            build_b_empty(p, required("d", *d)?, required("eps", *eps)?, h)?
        }
        Construction::AEmpty => {
            let c = CurveParams::new(w.unwrap_or(0.0), required("z", *z)?, h)?;
            let case = match case.ok_or_else(|| usage("--case is required for a-empty"))? {
                Tangency::Generic => TangencyCase::Generic { d: required("d", *d)?, eps: required("eps", *eps)? },
                Tangency::Vertical => TangencyCase::VerticalTangent { d: required("d", *d)?, eps: required("eps", *eps)? },
                Tangency::Horizontal => {
                    TangencyCase::HorizontalTangent { height: required("height", *height)?, base: required("base", *base)? }
                }
            };
            build_a_empty(c, required("t", *t)?, case)?
        }
        Construction::OmegaS => {
            let y0 = positive("--y0", y0.unwrap_or(1.0))?;
            let s = match s {
                Some(s) => *s,
                None => s_star(y0, h)?.s_star,
            };
            labels = Some(["A+", "B_E", "A-", "B_D"]);
            build_omega_s(y0, h, s)?
        }
    };
    write_domain(&dom, labels.as_ref().map(|l| &l[..]), "domain", out)
}

fn write_domain(dom: &AdmissibleDomain, labels: Option<&[&str]>, stem: &str, out: &mut Output) -> Result<(), RunError> {
    let json = serde_json::to_string_pretty(&domain_to_json(dom)).expect("domain serializes") + "\n";
    out.bytes(&format!("{stem}.json"), json.as_bytes())?;
    let rows: Vec<Vec<Cell>> = dom
        .arcs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let (p, q) = (a.start(), a.end());
            vec![i.into(), kind_name(a.kind).into(), p.x.into(), p.y.into(), q.x.into(), q.y.into(), a.length().into()]
        })
        .collect();
    out.csv(&format!("{stem}_arcs.csv"), &["arc", "kind", "start_x", "start_y", "end_x", "end_y", "length"], &rows)?;
    out.svg(&format!("{stem}.svg"), &domain_figure(dom, labels))
}

fn omega_row(label: &str, o: &OmegaData) -> Vec<Cell> {
    vec![
        label.into(),
        o.s.into(),
        o.phi.into(),
        o.e.into(),
        o.d.into(),
        o.alpha.into(),
        o.beta.into(),
        o.integral.into(),
        o.f.into(),
    ]
}

fn run_omega_s(h: f64, y0: f64, samples: usize, out: &mut Output) -> Result<(), RunError> {
    positive("--H", h)?;
    positive("--y0", y0)?;
    if samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    let s0 = s_zero(y0, h)?;
    let st = s_star(y0, h)?;
    let mut rows = Vec::new();
    for i in 0..samples {
        let s = s0 * i as f64 / samples as f64;
        rows.push(omega_row("grid", &omega_data(y0, h, s)?));
    }
    rows.push(omega_row("s0", &omega_data(y0, h, s0)?));
    rows.push(omega_row("s*", &st.at_root));
    out.csv("omega_s.csv", &["row", "s", "phi", "e", "d", "alpha", "beta", "integral", "F"], &rows)?;
    let dom = build_omega_s(y0, h, st.s_star)?;
    write_domain(&dom, Some(&["A+", "B_E", "A-", "B_D"]), "omega_s_star", out)
}

fn run_solve(cli: &Cli, input: &Path, mesh_h: Option<f64>, data: Option<&str>, out: &mut Output) -> Result<(), RunError> {
    let d = read_domain(input)?;
    let opts = cli.solver_options()?;
    let values = match data {
        Some(s) => parse_reals(s)?,
        None => vec![0.0; d.arcs.len()],
    };
    if values.len() != d.arcs.len() || values.iter().any(|v| !v.is_finite()) {
        return Err(usage(format!("--data needs {} finite values, one per arc", d.arcs.len())));
    }
    let m = make_mesh(&d, mesh_size(&d, mesh_h)?)?;
    out.bytes("mesh.txt", mesh_to_text(&m).as_bytes())?;
    let bd = boundary_from_arcs(&m, &|a, _| values[a]);
    let sol = solve_dirichlet(&m, &bd, d.h, &opts)?;
    out.bytes("solution.csv", field_to_csv(&m, &sol.values).as_bytes())?;
    let f = flux_report(&m, &sol.values, d.h)?;
    out.csv("flux.csv", &FLUX_HEADER, &flux_rows(&d, &f, None))?;
    let summary = vec![
        vec!["nodes".into(), m.nodes.len().into()],
        vec!["triangles".into(), m.triangles.len().into()],
        vec!["newton_steps".into(), sol.report.newton_steps.into()],
        vec!["picard_steps".into(), sol.report.picard_steps.into()],
        vec!["final_residual".into(), sol.report.residual_history.last().copied().into()],
        vec!["area_term".into(), f.area_term.into()],
        vec!["balance".into(), f.balance.into()],
    ];
    out.csv("summary.csv", &["key", "value"], &summary)?;
    let mut fig = domain_figure(&d, None);
    mesh_figure(&m, &mut fig);
    out.svg("solution.svg", &fig)
}

fn run_exhaust(cli: &Cli, out: &mut Output) -> Result<(), RunError> {
    let Command::Exhaust { input, mode, n, mesh_h, probe, c_data, cutoff } = &cli.command else { unreachable!() };
    let d = read_domain(input)?;
    let mode = parse_mode(mode)?;
    let opts = cli.solver_options()?;
    let ns = parse_reals(n)?;
    let probes = probe.iter().map(|p| parse_point(p)).collect::<Result<Vec<_>, _>>()?;
    if !c_data.is_finite() {
        return Err(usage("--c-data must be finite"));
    }
    let n_max = ns.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cutoff = match cutoff {
        Some(c) => positive("--cutoff", *c)?,
        None => 0.9 * n_max,
    };
    let m = exhaustion_mesh(&d, mode, mesh_size(&d, *mesh_h)?)?;
    out.bytes("mesh.txt", mesh_to_text(&m).as_bytes())?;
    let c = *c_data;
    let r = solve_exhaustion(&d, &m, &ns, mode, &|_| c, &probes, &opts)?;

    let kinds = d.kinds();
    let mut steps = Vec::new();
    let mut fluxes = Vec::new();
    let mut probe_rows = Vec::new();
    for (k, s) in r.steps.iter().enumerate() {
        let violations = if k == 0 { None } else { Some(r.monotone_violations[k - 1]) };
        steps.push(vec![
            s.n.into(),
            s.mu.into(),
            (if probes.is_empty() { None } else { Some(s.probe_min) }).into(),
            (if probes.is_empty() { None } else { Some(s.probe_max) }).into(),
            s.newton_steps.into(),
            violations.into(),
            s.flux.balance.into(),
        ]);
        for mut row in flux_rows(&d, &s.flux, Some(&kinds)) {
            row.insert(0, s.n.into());
            fluxes.push(row);
        }
        for (j, (p, v)) in probes.iter().zip(&s.probe_values).enumerate() {
            probe_rows.push(vec![s.n.into(), j.into(), p.x.into(), p.y.into(), (*v).into()]);
        }
    }
    out.csv(
        "steps.csv",
        &["n", "mu", "probe_min", "probe_max", "newton_steps", "monotone_violations", "balance"],
        &steps,
    )?;
    let mut header = vec!["n"];
    header.extend(FLUX_HEADER);
    out.csv("flux.csv", &header, &fluxes)?;
    out.csv("probes.csv", &["n", "probe", "x", "y", "value"], &probe_rows)?;

    let mut fig = domain_figure(&d, None);
    if let Some(last) = r.steps.last() {
        out.bytes("field_last.csv", field_to_csv(&m, &last.values).as_bytes())?;
        let mask = divergence_mask(&r, &m, cutoff)?;
        let rows: Vec<Vec<Cell>> = m
            .nodes
            .iter()
            .zip(&mask)
            .enumerate()
            .map(|(i, (p, &b))| vec![i.into(), p.x.into(), p.y.into(), b.into()])
            .collect();
        out.csv("mask.csv", &["node_index", "x", "y", "diverges"], &rows)?;
        for (p, &b) in m.nodes.iter().zip(&mask) {
            if b {
                fig.markers.push(Marker { at: *p, class: "mask".into() });
            }
        }
    }
    out.svg("exhaustion.svg", &fig)?;
    match &r.failure {
        Some(f) => Err(RunError::Numerical(f.clone())),
        None => Ok(()),
    }
}

fn run_flux(input: &Path, mesh: &Path, field: &Path, arc: Option<usize>, via: &[String], out: &mut Output) -> Result<(), RunError> {
    let d = read_domain(input)?;
    let m = mesh_from_text(&read(mesh)?)?;
    let u = field_from_csv(&read(field)?)?;
    if u.len() != m.nodes.len() {
        return Err(usage(format!("field has {} values but the mesh has {} nodes", u.len(), m.nodes.len())));
    }
    let kinds = d.kinds();
    if m.arc_ids().iter().any(|&a| a >= kinds.len()) {
        return Err(usage("mesh arc tags do not match the domain"));
    }
    let f = flux_report(&m, &u, d.h)?;
    out.csv("flux.csv", &FLUX_HEADER, &flux_rows(&d, &f, None))?;
    let summary = vec![vec!["area_term".into(), f.area_term.into()], vec!["balance".into(), f.balance.into()]];
    out.csv("summary.csv", &["key", "value"], &summary)?;
    if let Some(a) = arc {
        let edges: Vec<_> = m.boundary_edges.iter().filter(|e| e.2 == a).collect();
        if edges.is_empty() {
            return Err(usage(format!("arc {a} is not on the mesh boundary")));
        }
        let nb = m.boundary_edges.len();
        let first = (0..nb)
            .find(|&i| m.boundary_edges[i].2 == a && m.boundary_edges[(i + nb - 1) % nb].2 != a)
            .unwrap_or(0);
        let start = m.nodes[m.boundary_edges[first].0];
        let end = m.nodes[m.boundary_edges[(first + edges.len() - 1) % nb].1];
        let mut eta = vec![end];
        for p in via {
            eta.push(parse_point(p)?);
        }
        eta.push(start);
        let path = flux_via_path(&m, &u, d.h, a, &eta)?;
        let direct = f.flux_of(a).expect("arc is on the mesh");
        out.csv("eta.csv", &["arc", "flux_boundary", "flux_path"], &[vec![a.into(), direct.into(), path.into()]])?;
    }
    Ok(())
}

//! `solgraph` command-line front end: curve tables, domain construction and
//! checks, Dirichlet solves, fluxes and exhaustion sequences, written as CSV
//! with SVG figures and a checksum manifest.

pub mod commands;
pub mod emit;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use solgraph_core::solver::SolverOptions;

use emit::{sha256_hex, write_atomic, Cell, Figure};

#[derive(Parser, Debug, Clone, Serialize)]
#[command(name = "solgraph", version, about = "Constant mean curvature graphs in Sol3")]
pub struct Cli {
    /// Output directory; the SOLGRAPH_OUT environment variable takes precedence.
    #[arg(long, global = true, default_value = "solgraph-out")]
    #[serde(skip)]
    pub out: PathBuf,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tol: Tolerances,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Tolerances {
    /// Newton stopping tolerance on the max-norm residual.
    #[arg(long = "tol-newton", global = true, default_value_t = 1e-10)]
    pub newton: f64,
    /// Smallest damping factor before a fixed-point step.
    #[arg(long = "tol-damping", global = true, default_value_t = 1.0 / 1024.0)]
    pub damping: f64,
    /// Newton iteration cap.
    #[arg(long = "tol-max-newton", global = true, default_value_t = 200)]
    pub max_newton: usize,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// L, M, T, K and their residuals.
    #[command(allow_negative_numbers = true)]
    Constants {
        #[arg(long = "H")]
        h: f64,
    },
    /// Polyline of one curve with its distinguished points.
    #[command(allow_negative_numbers = true)]
    Curve {
        #[arg(long = "H")]
        h: f64,
        #[arg(long, default_value_t = 1.0)]
        z: f64,
        #[arg(long, default_value_t = 0.0)]
        w: f64,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        /// Parameter range is [-t-max, t-max].
        #[arg(long = "t-max", default_value_t = std::f64::consts::TAU)]
        t_max: f64,
        /// Number of seeded curvature residual checks.
        #[arg(long, default_value_t = 100)]
        checks: usize,
    },
    /// Build a domain and write it as JSON.
    #[command(allow_negative_numbers = true)]
    DomainBuild {
        #[arg(long, value_enum)]
        construction: Construction,
        #[arg(long = "H")]
        h: f64,
        #[arg(long)]
        px: Option<f64>,
        #[arg(long)]
        py: Option<f64>,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        w: Option<f64>,
        #[arg(long)]
        z: Option<f64>,
        /// Curve parameter of the tangency point.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long = "case", value_enum)]
        case: Option<Tangency>,
        #[arg(long)]
        height: Option<f64>,
        #[arg(long)]
        base: Option<f64>,
        #[arg(long)]
        y0: Option<f64>,
        /// Omega_s parameter; the balanced value when omitted.
        #[arg(long)]
        s: Option<f64>,
    },
    /// Enumerate polygons and report the length/area conditions.
    #[command(allow_negative_numbers = true)]
    DomainCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        mode: String,
    },
    /// Table of the Omega_s family, its endpoints and the balanced member.
    #[command(allow_negative_numbers = true)]
    OmegaS {
        #[arg(long = "H")]
        h: f64,
        #[arg(long, default_value_t = 1.0)]
        y0: f64,
        #[arg(long, default_value_t = 32)]
        samples: usize,
    },
    /// Dirichlet solve with constant data on each arc.
    #[command(allow_negative_numbers = true)]
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// Mesh size; diameter / 50 when omitted.
        #[arg(long = "h")]
        mesh_h: Option<f64>,
        /// Comma list of one value per arc; zeros when omitted.
        #[arg(long)]
        data: Option<String>,
    },
    /// Sequence of solves with data +-n on the A and B arcs.
    #[command(allow_negative_numbers = true)]
    Exhaust {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        mode: String,
        #[arg(long, default_value = "1,2,4,8,16,32")]
        n: String,
        #[arg(long = "h")]
        mesh_h: Option<f64>,
        /// Probe point "x,y"; repeatable.
        #[arg(long)]
        probe: Vec<String>,
        /// Constant data on C arcs.
        #[arg(long = "c-data", default_value_t = 0.0)]
        c_data: f64,
        /// Divergence cutoff; 0.9 times the largest n when omitted.
        #[arg(long)]
        cutoff: Option<f64>,
    },
    /// Fluxes of a stored solution, optionally along an interior path.
    #[command(allow_negative_numbers = true)]
    Flux {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        field: PathBuf,
        /// Arc whose flux is also computed along a path.
        #[arg(long)]
        arc: Option<usize>,
        /// Interior path point "x,y" from the arc end back to its start; repeatable.
        #[arg(long)]
        via: Vec<String>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    BEmpty,
    AEmpty,
    OmegaS,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tangency {
    Generic,
    Vertical,
    Horizontal,
}

#[derive(Debug)]
pub enum RunError {
    /// Invalid configuration; exit status 2.
    Usage(String),
    /// Numerical failure; exit status 1.
    Numerical(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Usage(_) => 2,
            RunError::Numerical(_) => 1,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "usage error: {m}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<solgraph_core::Error> for RunError {
    fn from(e: solgraph_core::Error) -> Self {
        use solgraph_core::Error as E;
        match e {
            E::Argument(_) | E::Domain(_) | E::Construction { .. } | E::Parse(_) => RunError::Usage(e.to_string()),
            E::Solver { ref message, ref residual_history } => {
                let hist: Vec<String> = residual_history.iter().map(|r| format!("{r:e}")).collect();
                RunError::Numerical(format!("{message}\nresidual history: {}", hist.join(" ")))
            }
            _ => RunError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Numerical(format!("I/O failure: {e}"))
    }
}

/// Output directory: SOLGRAPH_OUT if set, else `--out`.
pub fn output_dir(cli: &Cli) -> PathBuf {
    std::env::var_os("SOLGRAPH_OUT").filter(|v| !v.is_empty()).map(PathBuf::from).unwrap_or_else(|| cli.out.clone())
}

impl Cli {
    pub fn solver_options(&self) -> Result<SolverOptions, RunError> {
        let o = SolverOptions {
            newton_tol: self.tol.newton,
            max_newton: self.tol.max_newton,
            damping_min: self.tol.damping,
            ..SolverOptions::default()
        };
        o.validate().map_err(RunError::from)?;
        Ok(o)
    }

    /// Configuration echo: flattened `key, value` pairs, sorted by key.
    fn echo(&self) -> Vec<(String, String)> {
        let v = serde_json::to_value(self).expect("config serializes");
        let mut out = Vec::new();
        flatten("", &v, &mut out);
        out
    }
}

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut Vec<(String, String)>) {
    match v {
        serde_json::Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        serde_json::Value::String(s) => out.push((prefix.into(), s.clone())),
        serde_json::Value::Null => out.push((prefix.into(), String::new())),
        other => out.push((prefix.into(), other.to_string())),
    }
}

/// Files written by one run, in order, with their checksums.
pub struct Output {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self, RunError> {
        fs::create_dir_all(dir).map_err(|e| RunError::Usage(format!("output directory {}: {e}", dir.display())))?;
        let meta = fs::metadata(dir).map_err(|e| RunError::Usage(format!("output directory {}: {e}", dir.display())))?;
        if meta.permissions().readonly() {
            return Err(RunError::Usage(format!("output directory {} is not writable", dir.display())));
        }
        Ok(Output { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn bytes(&mut self, name: &str, data: &[u8]) -> Result<(), RunError> {
        write_atomic(&self.dir.join(name), data)?;
        self.files.retain(|(n, _)| n != name);
        self.files.push((name.to_string(), sha256_hex(data)));
        Ok(())
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<(), RunError> {
        self.bytes(name, emit::csv_string(header, rows).as_bytes())
    }

    pub fn svg(&mut self, name: &str, fig: &Figure) -> Result<(), RunError> {
        self.bytes(name, emit::svg_string(fig).as_bytes())
    }

    /// `manifest.csv`: version, configuration echo and file checksums.
    fn manifest(&mut self, cli: &Cli, status: &str) -> Result<(), RunError> {
        let mut rows: Vec<Vec<Cell>> = vec![vec!["version".into(), "solgraph".into(), env!("CARGO_PKG_VERSION").into()]];
        for (k, v) in cli.echo() {
            rows.push(vec!["config".into(), k.into(), v.into()]);
        }
        rows.push(vec!["status".into(), "exit".into(), status.into()]);
        for (n, h) in &self.files {
            rows.push(vec!["sha256".into(), n.as_str().into(), h.as_str().into()]);
        }
        let text = emit::csv_string(&["section", "key", "value"], &rows);
        write_atomic(&self.dir.join("manifest.csv"), text.as_bytes())?;
        Ok(())
    }
}

/// Runs the command with outputs in `dir`. A numerical failure leaves a
/// `diagnostic.txt` next to the partial outputs.
pub fn run_in(cli: &Cli, dir: &Path) -> Result<(), RunError> {
    let mut out = Output::new(dir)?;
    let res = commands::dispatch(cli, &mut out);
    match &res {
        Ok(()) => out.manifest(cli, "0")?,
        Err(e @ RunError::Numerical(m)) => {
            out.bytes("diagnostic.txt", format!("{m}\n").as_bytes())?;
            out.manifest(cli, &e.exit_code().to_string())?;
        }
        Err(e) => out.manifest(cli, &e.exit_code().to_string())?,
    }
    res
}

pub fn run(cli: &Cli) -> Result<(), RunError> {
    run_in(cli, &output_dir(cli))
}

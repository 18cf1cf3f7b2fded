//! CSV, SVG and manifest writers. Every file is written to a temporary name
//! in the target directory and renamed into place.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use sha2::{Digest, Sha256};
use solgraph_core::curve::Point;
use solgraph_core::domain::format_real;

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "true" } else { "false" }.into())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Real(v) => format_real(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// CSV text: header row, reals at 17 significant digits, `\n` line ends.
pub fn csv_string(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in rows {
        assert_eq!(r.len(), header.len(), "row width does not match the header");
        w.write_record(r.iter().map(Cell::render)).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 fields")
}

/// Header and rows of a CSV text, as strings.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>), csv::Error> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers()?.iter().map(str::to_string).collect();
    let rows = r.records().map(|rec| rec.map(|r| r.iter().map(str::to_string).collect())).collect::<Result<_, _>>()?;
    Ok((header, rows))
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

pub fn emit_csv(header: &[&str], rows: &[Vec<Cell>], path: &Path) -> io::Result<()> {
    write_atomic(path, csv_string(header, rows).as_bytes())
}

/// A polyline with a style class.
#[derive(Debug, Clone)]
pub struct Polyline {
    pub points: Vec<Point>,
    pub class: String,
}

#[derive(Debug, Clone)]
pub struct Label {
    pub at: Point,
    pub text: String,
}

/// A dot marker with a style class.
#[derive(Debug, Clone)]
pub struct Marker {
    pub at: Point,
    pub class: String,
}

#[derive(Debug, Clone, Default)]
pub struct Figure {
    pub polylines: Vec<Polyline>,
    pub labels: Vec<Label>,
    pub markers: Vec<Marker>,
}

const STYLE: &str = "polyline{fill:none;stroke-width:1.5;vector-effect:non-scaling-stroke}\
.curve{stroke:#222}.arc-a{stroke:#c0392b}.arc-b{stroke:#2471a3}.arc-c{stroke:#1e8449}\
.companion{stroke:#2471a3;stroke-dasharray:4 3;stroke-width:1}.mesh{stroke:#bbb;stroke-width:0.5}\
.point{fill:#222}.mask{fill:#e67e22;opacity:0.7}text{font-family:sans-serif}";

/// SVG text. The half-plane is drawn with `y` upward: points are mapped to
/// `(x, -y)` and the view box is the bounding box plus 5% on each side.
pub fn svg_string(fig: &Figure) -> String {
    let pts = fig
        .polylines
        .iter()
        .flat_map(|p| p.points.iter())
        .chain(fig.labels.iter().map(|l| &l.at))
        .chain(fig.markers.iter().map(|m| &m.at));
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-300);
    let (w, h) = ((x1 - x0).max(1e-3 * span), (y1 - y0).max(1e-3 * span));
    let (mx, my) = (0.05 * w, 0.05 * h);
    let size = w.max(h);
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"{}\">\n",
        x0 - mx,
        -y1 - my,
        w + 2.0 * mx,
        h + 2.0 * my,
        (800.0 * (h + 2.0 * my) / (w + 2.0 * mx)).round().clamp(50.0, 4000.0)
    ));
    s.push_str(&format!("<style>{STYLE}</style>\n"));
    for p in &fig.polylines {
        let coords: Vec<String> = p.points.iter().map(|q| format!("{},{}", q.x, -q.y)).collect();
        s.push_str(&format!("<polyline class=\"{}\" points=\"{}\"/>\n", p.class, coords.join(" ")));
    }
    for m in &fig.markers {
        s.push_str(&format!("<circle class=\"{}\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>\n", m.class, m.at.x, -m.at.y, 0.004 * size));
    }
    for l in &fig.labels {
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"{}\">{}</text>\n",
            l.at.x,
            -l.at.y,
            0.03 * size,
            escape(&l.text)
        ));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn emit_svg(fig: &Figure, path: &Path) -> io::Result<()> {
    write_atomic(path, svg_string(fig).as_bytes())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

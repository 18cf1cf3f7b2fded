use serde_json::{json, Map, Value};

use crate::curve::{ArcOnCurve, CurveParams, Point};
use crate::{Error, Result};

use super::admissible::AdmissibleDomain;
use super::geometry::{ArcKind, BoundaryArc, CircleArc, Geometry, Segment};

pub const FORMAT_VERSION: u64 = 1;

/// Decimal string with 17 significant digits; parses back to the same bits.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn parse_real(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad real {s:?}: {e}")))
}

fn real(obj: &Map<String, Value>, key: &str) -> Result<f64> {
    match obj.get(key) {
        Some(Value::String(s)) => parse_real(s),
        Some(Value::Number(n)) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad number in {key:?}"))),
        Some(_) => Err(Error::Parse(format!("field {key:?} is not a real"))),
        None => Err(Error::Parse(format!("missing field {key:?}"))),
    }
}

fn point(obj: &Map<String, Value>, key: &str) -> Result<Point> {
    let arr = obj
        .get(key)
        .and_then(Value::as_array)
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Parse(format!("field {key:?} must be a pair")))?;
    let coord = |v: &Value| match v {
        Value::String(s) => parse_real(s),
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse("bad number".into())),
        _ => Err(Error::Parse(format!("bad coordinate in {key:?}"))),
    };
    Ok(Point::new(coord(&arr[0])?, coord(&arr[1])?))
}

fn pt(p: &Point) -> Value {
    json!([format_real(p.x), format_real(p.y)])
}

fn curve_fields(m: &mut Map<String, Value>, a: &ArcOnCurve) {
    m.insert("w".into(), format_real(a.curve.w).into());
    m.insert("z".into(), format_real(a.curve.z).into());
    m.insert("t_lo".into(), format_real(a.t_lo).into());
    m.insert("t_hi".into(), format_real(a.t_hi).into());
}

fn parse_curve(obj: &Map<String, Value>, h: f64) -> Result<ArcOnCurve> {
    let c = CurveParams::new(real(obj, "w")?, real(obj, "z")?, h)?;
    ArcOnCurve::new(c, real(obj, "t_lo")?, real(obj, "t_hi")?)
}

pub fn domain_to_json(d: &AdmissibleDomain) -> Value {
    let arcs: Vec<Value> = d
        .arcs
        .iter()
        .map(|a| {
            let mut m = Map::new();
            m.insert("kind".into(), json!(a.kind));
            match &a.geometry {
                Geometry::Curve(c) => {
                    m.insert("geometry".into(), "curve".into());
                    curve_fields(&mut m, c);
                }
                Geometry::Circle(c) => {
                    m.insert("geometry".into(), "circle".into());
                    m.insert("center".into(), pt(&c.center));
                    m.insert("radius".into(), format_real(c.radius).into());
                    m.insert("angle_lo".into(), format_real(c.angle_lo).into());
                    m.insert("angle_hi".into(), format_real(c.angle_hi).into());
                }
                Geometry::Segment(s) => {
                    m.insert("geometry".into(), "segment".into());
                    m.insert("a".into(), pt(&s.a));
                    m.insert("b".into(), pt(&s.b));
                }
            }
            m.insert("orientation".into(), json!(a.orientation));
            Value::Object(m)
        })
        .collect();
    let b_star: Vec<Value> = d
        .b_star
        .iter()
        .map(|(i, c)| {
            let mut m = Map::new();
            m.insert("arc".into(), json!(i));
            curve_fields(&mut m, c);
            Value::Object(m)
        })
        .collect();
    json!({
        "version": FORMAT_VERSION,
        "H": format_real(d.h),
        "arcs": arcs,
        "b_star": b_star,
    })
}

/// Parses a domain document. The result is not validated.
pub fn domain_from_json(v: &Value) -> Result<AdmissibleDomain> {
    let root = v.as_object().ok_or_else(|| Error::Parse("domain must be an object".into()))?;
    match root.get("version").and_then(Value::as_u64) {
        Some(FORMAT_VERSION) => {}
        other => return Err(Error::Parse(format!("unsupported version {other:?}"))),
    }
    let h = real(root, "H")?;
    let arcs_v = root
        .get("arcs")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing arcs".into()))?;
    let mut arcs = Vec::with_capacity(arcs_v.len());
    for (i, a) in arcs_v.iter().enumerate() {
        let obj = a.as_object().ok_or_else(|| Error::Parse(format!("arc {i} is not an object")))?;
        let kind: ArcKind = serde_json::from_value(obj.get("kind").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Parse(format!("arc {i}: kind: {e}")))?;
        let geometry = match obj.get("geometry").and_then(Value::as_str) {
            Some("curve") => Geometry::Curve(parse_curve(obj, h)?),
            Some("circle") => Geometry::Circle(CircleArc::new(
                point(obj, "center")?,
                real(obj, "radius")?,
                real(obj, "angle_lo")?,
                real(obj, "angle_hi")?,
            )?),
            Some("segment") => Geometry::Segment(Segment { a: point(obj, "a")?, b: point(obj, "b")? }),
            other => return Err(Error::Parse(format!("arc {i}: unknown geometry {other:?}"))),
        };
        let orientation = obj
            .get("orientation")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::Parse(format!("arc {i}: missing orientation")))?;
        arcs.push(BoundaryArc::new(kind, geometry, orientation as i8)?);
    }
    let mut b_star = Vec::new();
    if let Some(list) = root.get("b_star").and_then(Value::as_array) {
        for (j, b) in list.iter().enumerate() {
            let obj = b.as_object().ok_or_else(|| Error::Parse(format!("b_star {j} is not an object")))?;
            let idx = obj
                .get("arc")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse(format!("b_star {j}: missing arc index")))? as usize;
            if idx >= arcs.len() {
                return Err(Error::Parse(format!("b_star {j}: arc index {idx} out of range")));
            }
            b_star.push((idx, parse_curve(obj, h)?));
        }
    }
    Ok(AdmissibleDomain { h, arcs, b_star })
}

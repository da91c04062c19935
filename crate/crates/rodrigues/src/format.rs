//! CSV and JSON forms of the core data.
//!
//! CSV numbers are written with 17 significant digits so they read back bit-exactly.
//! JSON numbers use the shortest representation that reads back bit-exactly.

use std::fmt;

use rodrigues_core::boutroux::ResidueReport;
use rodrigues_core::curves::BivariateCurve;
use rodrigues_core::parse::format_rational;
use rodrigues_core::rootfind::EmpiricalMeasure;
use rodrigues_core::saddleflow::SaddleFiber;
use rodrigues_core::trace::{SupportEstimate, TraceField, Window};
use rodrigues_core::{Complex64, ExactPoly, Rational};
use serde_json::{json, Value};

#[derive(Debug)]
pub enum FormatError {
    Csv(csv::Error),
    Json(serde_json::Error),
    Column(&'static str),
    Number(String),
    Shape(&'static str),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Csv(e) => write!(f, "csv: {}", e),
            FormatError::Json(e) => write!(f, "json: {}", e),
            FormatError::Column(c) => write!(f, "missing column {}", c),
            FormatError::Number(s) => write!(f, "not a number: {}", s),
            FormatError::Shape(s) => write!(f, "{}", s),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<csv::Error> for FormatError {
    fn from(e: csv::Error) -> Self {
        FormatError::Csv(e)
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e)
    }
}

pub fn num(x: f64) -> String {
    format!("{:.16e}", x)
}

fn parse_num(s: &str) -> Result<f64, FormatError> {
    s.trim().parse().map_err(|_| FormatError::Number(s.to_string()))
}

/// Non-finite values become `null`.
pub fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn complex_json(z: Complex64) -> Value {
    json!({"re": json_num(z.re), "im": json_num(z.im)})
}

pub fn rational_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn poly_json(p: &ExactPoly) -> Value {
    json!({"coeffs": p.coeffs().iter().map(rational_json).collect::<Vec<_>>()})
}

pub fn curve_json(c: &BivariateCurve) -> Value {
    json!({
        "alpha": rational_json(&c.alpha),
        "variable": c.variable.name(),
        "coeffs": c.coeffs.iter().map(|p| p.coeffs().iter().map(rational_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn measure_json(m: &EmpiricalMeasure) -> Value {
    let atoms: Vec<Value> = m
        .atoms
        .iter()
        .map(|a| json!({"re": json_num(a.location.re), "im": json_num(a.location.im), "mass": json_num(a.mass)}))
        .collect();
    json!({"atoms": atoms})
}

pub fn fiber_json(f: &SaddleFiber) -> Value {
    let saddles: Vec<Value> = f
        .saddles
        .iter()
        .map(|s| {
            json!({
                "u": complex_json(s.u),
                "G": json_num(s.g),
                "H": json_num(s.h),
                "relevance": s.relevance.map(|r| r.name()),
                "endpoints": s.endpoints.map(|e| [e[0].name(), e[1].name()]),
            })
        })
        .collect();
    json!({"z": complex_json(f.z), "saddles": saddles})
}

pub fn residue_json(r: &ResidueReport) -> Value {
    let entries: Vec<Value> = r
        .entries
        .iter()
        .map(|e| {
            json!({
                "label": e.label,
                "location": e.location.map(complex_json),
                "computed": complex_json(e.computed),
                "expected": json_num(e.expected),
                "abs_error": json_num(e.abs_error),
                "alternative": e.alternative.map(json_num),
            })
        })
        .collect();
    json!({
        "entries": entries,
        "sum": complex_json(r.sum),
        "radius_drift": json_num(r.radius_drift),
        "max_imag": json_num(r.max_imag()),
        "max_error": json_num(r.max_error()),
    })
}

pub fn window_json(w: &Window) -> Value {
    json!([json_num(w.re_min), json_num(w.re_max), json_num(w.im_min), json_num(w.im_max)])
}

/// GeoJSON-like feature collection: polylines as `LineString`, atoms as `Point` with a mass.
pub fn support_json(s: &SupportEstimate, window: &Window) -> Value {
    let mut features = Vec::new();
    for line in &s.polylines {
        let coords: Vec<Value> = line.iter().map(|z| json!([json_num(z.re), json_num(z.im)])).collect();
        features.push(json!({"type": "Feature", "geometry": {"type": "LineString", "coordinates": coords}, "properties": {}}));
    }
    for (z, m) in &s.point_masses {
        features.push(json!({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [json_num(z.re), json_num(z.im)]},
            "properties": {"mass": json_num(*m)},
        }));
    }
    json!({"type": "FeatureCollection", "bbox": window_json(window), "features": features})
}

pub fn read_support_json(text: &str) -> Result<(SupportEstimate, Window), FormatError> {
    let v: Value = serde_json::from_str(text)?;
    let pt = |c: &Value| -> Result<Complex64, FormatError> {
        let re = c.get(0).and_then(Value::as_f64).ok_or(FormatError::Shape("bad coordinate"))?;
        let im = c.get(1).and_then(Value::as_f64).ok_or(FormatError::Shape("bad coordinate"))?;
        Ok(Complex64::new(re, im))
    };
    let b = v.get("bbox").and_then(Value::as_array).ok_or(FormatError::Shape("missing bbox"))?;
    let bf: Vec<f64> = b.iter().filter_map(Value::as_f64).collect();
    if bf.len() != 4 {
        return Err(FormatError::Shape("bbox needs four numbers"));
    }
    let window = Window::new(bf[0], bf[1], bf[2], bf[3]);
    let mut est = SupportEstimate { polylines: Vec::new(), point_masses: Vec::new() };
    let features = v.get("features").and_then(Value::as_array).ok_or(FormatError::Shape("missing features"))?;
    for f in features {
        let g = &f["geometry"];
        match g["type"].as_str() {
            Some("LineString") => {
                let cs = g["coordinates"].as_array().ok_or(FormatError::Shape("bad line"))?;
                est.polylines.push(cs.iter().map(pt).collect::<Result<_, _>>()?);
            }
            Some("Point") => {
                let m = f["properties"]["mass"].as_f64().unwrap_or(0.0);
                est.point_masses.push((pt(&g["coordinates"])?, m));
            }
            _ => return Err(FormatError::Shape("unknown geometry")),
        }
    }
    Ok((est, window))
}

fn write_rows(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Columns `re,im`.
pub fn roots_csv(roots: &[Complex64]) -> String {
    write_rows(&["re", "im"], roots.iter().map(|z| vec![num(z.re), num(z.im)]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointKind {
    Descendant,
    Root,
    Center,
    Branch,
}

impl PointKind {
    pub fn name(self) -> &'static str {
        match self {
            PointKind::Descendant => "descendant",
            PointKind::Root => "root",
            PointKind::Center => "center",
            PointKind::Branch => "branch",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [PointKind::Descendant, PointKind::Root, PointKind::Center, PointKind::Branch].into_iter().find(|k| k.name() == s)
    }
}

/// Columns `re,im,kind`.
pub fn points_csv(points: &[(Complex64, PointKind)]) -> String {
    write_rows(&["re", "im", "kind"], points.iter().map(|(z, k)| vec![num(z.re), num(z.im), k.name().to_string()]))
}

/// Reads either `re,im` or `re,im,kind`; points without a kind are descendants.
pub fn read_points_csv(text: &str) -> Result<Vec<(Complex64, PointKind)>, FormatError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let h = r.headers()?.clone();
    let col = |name: &'static str| h.iter().position(|c| c == name).ok_or(FormatError::Column(name));
    let (ire, iim) = (col("re")?, col("im")?);
    let ik = h.iter().position(|c| c == "kind");
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let z = Complex64::new(parse_num(&rec[ire])?, parse_num(&rec[iim])?);
        let k = match ik {
            Some(i) => PointKind::parse(&rec[i]).ok_or(FormatError::Shape("unknown point kind"))?,
            None => PointKind::Descendant,
        };
        out.push((z, k));
    }
    Ok(out)
}

pub const FIELD_HEADER: [&str; 7] = ["z_re", "z_im", "potential", "cauchy_re", "cauchy_im", "branch", "flag"];

/// One row per node, real part running fastest.
pub fn field_csv(f: &TraceField) -> String {
    let rows = (0..f.ny).flat_map(move |iy| {
        (0..f.nx).map(move |ix| {
            let k = f.index(ix, iy);
            let z = f.node(ix, iy);
            vec![
                num(z.re),
                num(z.im),
                num(f.potential[k]),
                num(f.cauchy[k].re),
                num(f.cauchy[k].im),
                f.branch_index[k].to_string(),
                f.flags[k].name().to_string(),
            ]
        })
    });
    write_rows(&FIELD_HEADER, rows)
}

/// A field read back from CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldTable {
    pub nx: usize,
    pub ny: usize,
    pub z: Vec<Complex64>,
    pub potential: Vec<f64>,
    pub cauchy: Vec<Complex64>,
    pub branch: Vec<i32>,
    pub flag: Vec<String>,
}

impl FieldTable {
    pub fn window(&self) -> Window {
        let (a, b) = (self.z[0], self.z[self.z.len() - 1]);
        Window::new(a.re, b.re, a.im, b.im)
    }
}

pub fn read_field_csv(text: &str) -> Result<FieldTable, FormatError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let h = r.headers()?.clone();
    let mut idx = [0usize; 7];
    for (slot, name) in idx.iter_mut().zip(FIELD_HEADER) {
        *slot = h.iter().position(|c| c == name).ok_or(FormatError::Column(name))?;
    }
    let mut t = FieldTable { nx: 0, ny: 0, z: vec![], potential: vec![], cauchy: vec![], branch: vec![], flag: vec![] };
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| parse_num(&rec[idx[i]]);
        t.z.push(Complex64::new(f(0)?, f(1)?));
        t.potential.push(f(2)?);
        t.cauchy.push(Complex64::new(f(3)?, f(4)?));
        t.branch.push(rec[idx[5]].trim().parse().map_err(|_| FormatError::Number(rec[idx[5]].to_string()))?);
        t.flag.push(rec[idx[6]].to_string());
    }
    if t.z.is_empty() {
        return Err(FormatError::Shape("empty field"));
    }
    t.nx = t.z.iter().take_while(|z| z.im == t.z[0].im).count();
    if !t.z.len().is_multiple_of(t.nx) {
        return Err(FormatError::Shape("field rows have unequal length"));
    }
    t.ny = t.z.len() / t.nx;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rodrigues_core::exactpoly::rat;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(parse_num(&num(x)).unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(num(-4.0), "-4.0000000000000000e0");
        assert_eq!(json_num(f64::NAN), Value::Null);
    }

    #[test]
    fn poly_to_json() {
        let p = ExactPoly::new(vec![rat(-1, 2), rat(0, 1), rat(3, 1)]);
        assert_eq!(poly_json(&p).to_string(), r#"{"coeffs":["-1/2","0","3"]}"#);
    }

    #[test]
    fn points_round_trip() {
        let pts = vec![(Complex64::new(0.5, -1.0 / 7.0), PointKind::Root), (Complex64::new(-2.0, 0.0), PointKind::Branch)];
        assert_eq!(read_points_csv(&points_csv(&pts)).unwrap(), pts);
        let plain = read_points_csv(&roots_csv(&[Complex64::new(1.0, 2.0)])).unwrap();
        assert_eq!(plain, vec![(Complex64::new(1.0, 2.0), PointKind::Descendant)]);
        assert!(read_points_csv("x,y\n1,2\n").is_err());
    }
}

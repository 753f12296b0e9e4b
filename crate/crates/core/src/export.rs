//! JSON, CSV and SVG renderings of analysis results.
//!
//! JSON numbers are rounded to 12 significant digits and every document
//! carries `"schema_version": "1"`.

use serde::Serialize;
use serde_json::{json, Map, Value};
use std::fmt::Write as _;

use crate::error::Result;
use crate::oracle::ZeroCount;
use crate::plant::ControllerPoint;
use crate::region::{HInterval, PointClass, StabilityRegion};
use crate::stabilizability::{StabilizabilityReport, ZoneScan};

pub const SCHEMA_VERSION: &str = "1";

/// Column order of the zone-scan CSV.
pub const ZONE_CSV_HEADER: &str = "param1,param2,verdict,zone,phi1,phi2,poles,Ne_required,Ne_achieved";

pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(f) = n.as_f64() {
                *v = json!(round_sig(f, 12));
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Serializes, rounds and stamps the schema version on an object.
pub fn document<T: Serialize>(value: &T) -> Value {
    let mut v = serde_json::to_value(value).unwrap_or(Value::Null);
    round_json(&mut v);
    match v {
        Value::Object(mut map) => {
            map.insert("schema_version".into(), Value::String(SCHEMA_VERSION.into()));
            Value::Object(map)
        }
        other => {
            let mut map = Map::new();
            map.insert("schema_version".into(), Value::String(SCHEMA_VERSION.into()));
            map.insert("data".into(), other);
            Value::Object(map)
        }
    }
}

pub fn report_json(report: &StabilizabilityReport) -> Value {
    document(report)
}

pub fn region_json(region: &StabilityRegion) -> Value {
    document(region)
}

pub fn interval_json(interval: &HInterval) -> Value {
    document(&json!({
        "lower": interval.lower,
        "upper": interval.upper,
        "case": interval.case,
    }))
}

/// Regions along `h`; failed slices are reported with their error.
pub fn sweep_json(interval: &HInterval, slices: &[Result<StabilityRegion>]) -> Value {
    let slices: Vec<Value> = slices
        .iter()
        .map(|s| match s {
            Ok(r) => serde_json::to_value(r).unwrap_or(Value::Null),
            Err(e) => json!({ "error": e.to_string() }),
        })
        .collect();
    document(&json!({
        "interval": [interval.lower, interval.upper],
        "case": interval.case,
        "slices": slices,
    }))
}

pub fn verify_json(point: &ControllerPoint, count: &ZeroCount, class: Option<PointClass>) -> Value {
    let mut v = json!({
        "point": point,
        "rhp_zeros": count.rhp_zeros,
        "contour": count.contour,
        "certified": count.certified,
        "poles_inside": count.poles_inside,
        "winding": count.winding,
        "stable": count.rhp_zeros == 0,
    });
    if let Some(c) = class {
        v["region_class"] = json!(c);
    }
    document(&v)
}

pub fn zones_json(scan: &ZoneScan) -> Value {
    document(scan)
}

fn csv_num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{}", round_sig(v, 12)),
        _ => String::new(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn zones_csv(scan: &ZoneScan) -> String {
    let mut out = String::from(ZONE_CSV_HEADER);
    out.push('\n');
    for c in &scan.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            csv_num(Some(c.param1)),
            csv_num(c.param2),
            c.verdict,
            csv_field(c.zone.as_deref().unwrap_or("")),
            csv_num(c.phi1),
            csv_num(c.phi2),
            c.poles.map(|p| p.to_string()).unwrap_or_default(),
            c.ne_required.map(|p| p.to_string()).unwrap_or_default(),
            c.ne_achieved.map(|p| p.to_string()).unwrap_or_default(),
        );
    }
    out
}

/// Polygon vertices, counterclockwise.
pub fn region_csv(region: &StabilityRegion) -> String {
    let mut out = String::from("vertex,hi,hd\n");
    for (i, p) in region.polygon.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", i, csv_num(Some(p[0])), csv_num(Some(p[1])));
    }
    out
}

/// Polygons of a sweep, one row per vertex.
pub fn sweep_csv(slices: &[Result<StabilityRegion>]) -> String {
    let mut out = String::from("h,vertex,hi,hd\n");
    for r in slices.iter().flatten() {
        for (i, p) in r.polygon.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                csv_num(Some(r.h)),
                i,
                csv_num(Some(p[0])),
                csv_num(Some(p[1]))
            );
        }
    }
    out
}

const SVG_SIZE: f64 = 640.0;
const SVG_PAD: f64 = 48.0;

struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl Frame {
    fn fit(points: &[[f64; 2]]) -> Frame {
        let (mut lo, mut hi) = ([0.0f64, 0.0f64], [0.0f64, 0.0f64]);
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        let scale = (SVG_SIZE - 2.0 * SVG_PAD) / span;
        Frame {
            x0: lo[0] - 0.5 * (span - (hi[0] - lo[0])),
            y0: lo[1] - 0.5 * (span - (hi[1] - lo[1])),
            scale,
        }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (
            SVG_PAD + (p[0] - self.x0) * self.scale,
            SVG_SIZE - SVG_PAD - (p[1] - self.y0) * self.scale,
        )
    }

    fn path(&self, pts: &[[f64; 2]]) -> String {
        pts.iter()
            .map(|p| {
                let (x, y) = self.map(*p);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Region chart in the `(h_i, h_d)` plane: the triangles of every root pair,
/// the stability polygon and the labeled vertices of the first triangle.
pub fn region_svg(region: &StabilityRegion) -> String {
    let mut pts: Vec<[f64; 2]> = region.polygon.clone();
    if let Some(t) = region.triangles.first() {
        pts.extend([t.u, t.v, t.w]);
    }
    let frame = Frame::fit(&pts);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}" font-family="sans-serif" font-size="12">"#,
        SVG_SIZE
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    // axes through the origin, when visible
    let (ox, oy) = frame.map([0.0, 0.0]);
    if (0.0..=SVG_SIZE).contains(&ox) {
        let _ = writeln!(s, r##"<line x1="{ox:.2}" y1="0" x2="{ox:.2}" y2="{SVG_SIZE}" stroke="#888" stroke-width="1"/>"##);
    }
    if (0.0..=SVG_SIZE).contains(&oy) {
        let _ = writeln!(s, r##"<line x1="0" y1="{oy:.2}" x2="{SVG_SIZE}" y2="{oy:.2}" stroke="#888" stroke-width="1"/>"##);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">h_i</text>"#, SVG_SIZE - SVG_PAD + 8.0, SVG_SIZE - 8.0);
    let _ = writeln!(s, r#"<text x="8" y="16">h_d</text>"#);
    let _ = writeln!(s, r#"<text x="8" y="{:.2}">h = {}</text>"#, SVG_SIZE - 8.0, round_sig(region.h, 6));

    for t in &region.triangles {
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="none" stroke="#4a7ab5" stroke-width="0.8" stroke-dasharray="4 3"/>"##,
            frame.path(&[t.u, t.v, t.w])
        );
    }
    if !region.polygon.is_empty() {
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#8fd18f" fill-opacity="0.6" stroke="#1f6f1f" stroke-width="1.5"/>"##,
            frame.path(&region.polygon)
        );
    }
    if let Some(t) = region.triangles.first() {
        for (name, p) in [("U", t.u), ("V", t.v), ("W", t.w)] {
            let (x, y) = frame.map(p);
            let _ = writeln!(s, r##"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="#b53a3a"/>"##);
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{}{} ({}, {})</text>"#,
                x + 6.0,
                y - 6.0,
                name,
                t.index,
                round_sig(p[0], 4),
                round_sig(p[1], 4)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

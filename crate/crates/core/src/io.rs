//! Curve file formats.
//!
//! JSON: `{"metric": "euclidean"|"lorentzian", "dimension": n, "h": .., "s0": ..,
//! "points": [[..], ..]}` with optional `provenance` and `certificate`.
//! CSV: header `s,x1,...,xn`, one row per node.
//!
//! Every coordinate is written with 17 significant digits and parsed with
//! correct rounding, so a write/read cycle is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::curve::{Certificate, CurveSamples};
use crate::error::{Error, Result};
use crate::metric::{Metric, Signature};

/// Formats a float with 17 significant digits as a JSON/CSV number.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Deserialize)]
struct CurveFile {
    metric: Signature,
    dimension: usize,
    h: f64,
    s0: f64,
    points: Vec<Vec<f64>>,
    #[serde(default)]
    provenance: String,
    #[serde(default)]
    certificate: Option<Certificate>,
}

pub fn curve_to_json(curve: &CurveSamples) -> String {
    let metric = match curve.metric.signature {
        Signature::Euclidean => "euclidean",
        Signature::Lorentzian => "lorentzian",
    };
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"metric\": \"{metric}\",");
    let _ = writeln!(out, "  \"dimension\": {},", curve.dim());
    let _ = writeln!(out, "  \"h\": {},", fmt_f64(curve.h));
    let _ = writeln!(out, "  \"s0\": {},", fmt_f64(curve.s0));
    let _ = writeln!(
        out,
        "  \"provenance\": {},",
        serde_json::to_string(&curve.provenance).expect("string serializes")
    );
    if let Some(cert) = &curve.certificate {
        let _ = writeln!(
            out,
            "  \"certificate\": {},",
            serde_json::to_string(cert).expect("certificate serializes")
        );
    }
    out.push_str("  \"points\": [\n");
    for (j, p) in curve.points.iter().enumerate() {
        let row: Vec<String> = p.iter().map(|v| fmt_f64(*v)).collect();
        let sep = if j + 1 == curve.len() { "" } else { "," };
        let _ = writeln!(out, "    [{}]{sep}", row.join(", "));
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn curve_from_json(text: &str) -> Result<CurveSamples> {
    let file: CurveFile = serde_json::from_str(text)?;
    let metric = Metric::new(file.metric, file.dimension)?;
    let mut curve = CurveSamples::new(metric, file.s0, file.h, file.points)?;
    curve.provenance = file.provenance;
    curve.certificate = file.certificate;
    Ok(curve)
}

pub fn curve_to_csv(curve: &CurveSamples) -> String {
    let mut out = String::from("s");
    for c in 1..=curve.dim() {
        let _ = write!(out, ",x{c}");
    }
    out.push('\n');
    for (j, p) in curve.points.iter().enumerate() {
        out.push_str(&fmt_f64(curve.s(j)));
        for v in p {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        out.push('\n');
    }
    out
}

/// Reads the CSV form; the metric is not part of the format and must be
/// supplied by the caller.
pub fn curve_from_csv(text: &str, signature: Signature) -> Result<CurveSamples> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    if headers.get(0) != Some("s") || headers.len() < 3 {
        return Err(Error::Parse("CSV header must be s,x1,...,xn with n >= 2".into()));
    }
    let dim = headers.len() - 1;
    let mut s = Vec::new();
    let mut points = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))?;
        if vals.len() != dim + 1 {
            return Err(Error::Parse(format!("row {} has {} fields", line + 2, vals.len())));
        }
        s.push(vals[0]);
        points.push(vals[1..].to_vec());
    }
    CurveSamples::from_parameterized(Metric::new(signature, dim)?, &s, points)
}

/// Reads a curve file, choosing the format by extension (`.csv` or JSON).
pub fn read_curve(path: &Path, csv_signature: Signature) -> Result<CurveSamples> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => curve_from_csv(&text, csv_signature),
        _ => curve_from_json(&text),
    }
}

pub fn write_curve(path: &Path, curve: &CurveSamples) -> Result<()> {
    let text = match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => curve_to_csv(curve),
        _ => curve_to_json(curve),
    };
    std::fs::write(path, text)?;
    Ok(())
}

//! `generate`: certified curve files.

use std::path::Path;

use ndhelix::generators::{
    circle_e2, circular_helix_certificate, circular_helix_e3, curve_from_curvatures,
    general_helix, general_helix_certificate, perturb_curve, reference_battery,
    roundtrip_tolerance, spiral_tangent_curve_e3, timelike_helix_certificate, timelike_helix_l3,
    torus_curve_e4, CurvatureProfile, PerturbMode, DEFAULT_INTERVAL,
};
use ndhelix::helix::classify_helix;
use ndhelix::io::{curve_to_csv, curve_to_json, read_curve};
use ndhelix::{
    frenet_apparatus, AnalyticCurve, Certificate, CurveSamples, Error, FrenetOptions, Metric,
    Signature, Thresholds,
};
use serde::Serialize;

use crate::{report_error, GenerateCommand, GenerateOutput, ModeArg, Sink, EXIT_ERROR, EXIT_HELIX};

fn curve_text(path: &Path, curve: &CurveSamples) -> String {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => curve_to_csv(curve),
        _ => curve_to_json(curve),
    }
}

fn sample(curve: &AnalyticCurve, h: f64, certificate: Certificate) -> Result<CurveSamples, Error> {
    let mut samples = curve.reparameterize_unit_speed(h)?;
    samples.provenance = curve.name.clone();
    samples.certificate = Some(certificate);
    Ok(samples)
}

/// Built-in profile for `general-helix` in `E^n`, living in `E^{n-1}`.
fn default_profile(n: usize) -> Result<AnalyticCurve, Error> {
    match n {
        3 => circle_e2(1.0),
        4 => spiral_tangent_curve_e3(0.4, 0.04, 1.0),
        5 => torus_curve_e4(0.6, 1.0, 0.5),
        _ => Err(Error::BadParameters(format!(
            "general-helix has built-in profiles for n = 3, 4, 5, got {n}"
        ))),
    }
}

#[derive(Serialize)]
struct RoundTrip {
    profile: String,
    h: f64,
    tolerance: f64,
    /// Per curvature, `max |recovered - prescribed|` over evaluable nodes.
    max_errors: Vec<f64>,
    within_tolerance: bool,
    helix_verdict: Option<bool>,
    c_mean: Option<f64>,
}

fn load_kappa_file(path: &Path, metric: Signature) -> Result<(CurvatureProfile, (f64, f64)), Error> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut s = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let vals = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))?;
        if vals.len() < 2 || (!columns.is_empty() && vals.len() != columns.len() + 1) {
            return Err(Error::Parse(format!("row {} has {} fields", line + 2, vals.len())));
        }
        if columns.is_empty() {
            columns = vec![Vec::new(); vals.len() - 1];
        }
        s.push(vals[0]);
        columns.iter_mut().zip(&vals[1..]).for_each(|(c, v)| c.push(*v));
    }
    if s.len() < 4 {
        return Err(Error::Parse("curvature file needs at least 4 rows".into()));
    }
    let h = (s[s.len() - 1] - s[0]) / (s.len() - 1) as f64;
    let uniform = s
        .iter()
        .enumerate()
        .all(|(j, v)| (v - (s[0] + j as f64 * h)).abs() <= 1e-9 * (1.0 + v.abs()));
    if !uniform {
        return Err(Error::Parse("curvature file must use a uniform grid".into()));
    }
    let metric = Metric::new(metric, columns.len() + 1)?;
    let profile = CurvatureProfile::sampled(metric, s[0], h, &columns)?
        .named(format!("sampled({})", path.display()));
    Ok((profile, (s[0], s[s.len() - 1])))
}

fn round_trip(profile: &CurvatureProfile, curve: &CurveSamples, h: f64) -> Result<RoundTrip, Error> {
    let fd = frenet_apparatus(curve, &FrenetOptions::default())?;
    let max_errors: Vec<f64> = fd
        .curvatures
        .iter()
        .enumerate()
        .map(|(i, k)| {
            k.iter()
                .zip(&fd.s)
                .filter(|(v, _)| v.is_finite())
                .map(|(v, s)| (v - profile.kappa(i + 1, *s)).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let tolerance = roundtrip_tolerance(h);
    let report = classify_helix(&fd, &Thresholds::default()).ok();
    Ok(RoundTrip {
        profile: profile.name.clone(),
        h,
        tolerance,
        within_tolerance: max_errors.iter().all(|e| *e <= tolerance),
        max_errors,
        helix_verdict: report.as_ref().map(|r| r.verdict),
        c_mean: report.as_ref().map(|r| r.c_mean),
    })
}

/// Runs a `generate` subcommand and returns the exit code.
pub fn cmd_generate(cmd: GenerateCommand) -> i32 {
    match generate(cmd) {
        Ok(()) => EXIT_HELIX,
        Err(e) => {
            report_error(&e);
            EXIT_ERROR
        }
    }
}

fn write_single(out: &GenerateOutput, build: impl FnOnce(f64) -> Result<CurveSamples, Error>) -> Result<(), Error> {
    let sink = Sink::open(Some(&out.output))?;
    let curve = build(out.h)?;
    sink.write(&curve_text(&out.output, &curve))
}

fn generate(cmd: GenerateCommand) -> Result<(), Error> {
    match cmd {
        GenerateCommand::Helix { a, b, out } => write_single(&out, |h| {
            sample(&circular_helix_e3(a, b)?, h, circular_helix_certificate(a, b))
        }),
        GenerateCommand::TimelikeHelix { c, a, omega, out } => write_single(&out, |h| {
            sample(&timelike_helix_l3(c, a, omega)?, h, timelike_helix_certificate(c, a, omega))
        }),
        GenerateCommand::GeneralHelix {
            dimension,
            theta,
            axis,
            out,
        } => write_single(&out, |h| {
            let axis = axis.unwrap_or_else(|| {
                let mut u = vec![0.0; dimension];
                if let Some(last) = u.last_mut() {
                    *last = 1.0;
                }
                u
            });
            if axis.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: axis.len(),
                });
            }
            let curve = general_helix(&axis, theta, &default_profile(dimension)?)?;
            sample(&curve, h, general_helix_certificate(&axis, theta))
        }),
        GenerateCommand::FromCurvatures {
            kappa,
            kappa_file,
            metric,
            interval,
            report,
            out,
        } => {
            let sink = Sink::open(Some(&out.output))?;
            let report_sink = Sink::open(report.as_ref())?;
            let (profile, file_interval) = match (kappa, kappa_file) {
                (Some(k), _) => {
                    let m = Metric::new(metric.into(), k.len() + 1)?;
                    (CurvatureProfile::constant(m, &k)?, DEFAULT_INTERVAL)
                }
                (None, Some(path)) => load_kappa_file(&path, metric.into())?,
                (None, None) => unreachable!("clap requires one curvature source"),
            };
            let interval = interval.map(|v| (v[0], v[1])).unwrap_or(file_interval);
            let mut curve = curve_from_curvatures(&profile, interval, out.h, None)?;
            curve.provenance = format!("curve_from_curvatures({})", profile.name);
            let rt = round_trip(&profile, &curve, out.h)?;
            sink.write(&curve_text(&out.output, &curve))?;
            let mut text = serde_json::to_string_pretty(&rt).expect("report serializes");
            text.push('\n');
            report_sink.write(&text)
        }
        GenerateCommand::Perturb {
            input,
            amplitude,
            mode,
            metric,
            out,
        } => {
            let sink = Sink::open(Some(&out.output))?;
            let curve = read_curve(&input, metric.map(Into::into).unwrap_or(Signature::Euclidean))?;
            let mode = match mode {
                ModeArg::Bump => PerturbMode::Bump,
                ModeArg::Sinusoid => PerturbMode::Sinusoid,
            };
            let perturbed = perturb_curve(&curve, amplitude, mode)?;
            sink.write(&curve_text(&out.output, &perturbed))
        }
        GenerateCommand::Battery {
            output_dir,
            h,
            amplitude,
        } => {
            std::fs::create_dir_all(&output_dir)
                .map_err(|e| Error::Io(format!("{}: {e}", output_dir.display())))?;
            for c in reference_battery(h, amplitude)? {
                let path = output_dir.join(format!("{}.json", c.name));
                let mut samples = c.samples;
                if samples.provenance.is_empty() {
                    samples.provenance = c.name.clone();
                }
                Sink::open(Some(&path))?.write(&curve_to_json(&samples))?;
            }
            Ok(())
        }
    }
}

//! `analyze` and `verify`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ndhelix::helix::{analyze_helix, HelixAnalysis};
use ndhelix::io::{fmt_f64, read_curve};
use ndhelix::{
    frenet_apparatus, Certificate, CurveSamples, Error, Execution, FrenetData, FrenetOptions,
    HelixReport, Signature,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::{
    combine_exit_codes, exit_code_for, report_error, AnalyzeArgs, ReportFormat, Sink, EXIT_ERROR,
    EXIT_HELIX, EXIT_NOT_HELIX,
};

#[derive(Debug, Clone, Serialize)]
struct CurveInfo {
    metric: Signature,
    dimension: usize,
    nodes: usize,
    h: f64,
    s0: f64,
    length: f64,
    provenance: String,
    certificate: Option<Certificate>,
}

impl CurveInfo {
    fn of(c: &CurveSamples) -> Self {
        Self {
            metric: c.metric.signature,
            dimension: c.dim(),
            nodes: c.len(),
            h: c.h,
            s0: c.s0,
            length: c.length(),
            provenance: c.provenance.clone(),
            certificate: c.certificate.clone(),
        }
    }
}

/// The four characterization outcomes, as reported by `verify`.
#[derive(Debug, Clone, Serialize)]
struct CrossCheck {
    agreement: bool,
    verdict: bool,
    residuals: BTreeMap<String, f64>,
    characterizations: BTreeMap<String, bool>,
    diagnostics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
enum Body {
    Analyze(Box<HelixReport>),
    Verify(CrossCheck),
}

#[derive(Debug, Clone, Serialize)]
struct FileResult {
    input: String,
    status: &'static str,
    exit_code: i32,
    curve: Option<CurveInfo>,
    report: Option<Body>,
    error: Option<String>,
}

#[derive(Serialize)]
struct SingleReport<'a> {
    config: &'a RunConfig,
    #[serde(flatten)]
    result: &'a FileResult,
}

#[derive(Serialize)]
struct ManifestReport<'a> {
    config: &'a RunConfig,
    manifest: String,
    exit_code: i32,
    results: &'a [FileResult],
}

struct Computed {
    curve: Option<CurveSamples>,
    fd: Option<FrenetData>,
    analysis: Result<HelixAnalysis, Error>,
}

fn load(path: &Path, cfg: &RunConfig) -> Result<CurveSamples, Error> {
    let curve = read_curve(path, cfg.metric.unwrap_or(Signature::Euclidean))
        .map_err(|e| match e {
            Error::Io(msg) => Error::Io(format!("{}: {msg}", path.display())),
            other => other,
        })?;
    if let Some(m) = cfg.metric {
        if curve.metric.signature != m {
            return Err(Error::BadParameters(format!(
                "--metric {m:?} does not match the file's metric {:?}",
                curve.metric.signature
            )));
        }
    }
    if let Some(d) = cfg.dimension {
        if curve.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: curve.dim(),
            });
        }
    }
    match cfg.h {
        Some(h) => curve.reparameterize_unit_speed(h).map(|c| CurveSamples {
            provenance: curve.provenance.clone(),
            certificate: curve.certificate.clone(),
            ..c
        }),
        None => Ok(curve),
    }
}

fn compute(path: &Path, cfg: &RunConfig) -> Computed {
    let curve = match load(path, cfg) {
        Ok(c) => c,
        Err(e) => {
            return Computed {
                curve: None,
                fd: None,
                analysis: Err(e),
            }
        }
    };
    let options = FrenetOptions {
        step: cfg.step,
        execution: Execution::Parallel,
        ..FrenetOptions::default()
    };
    match frenet_apparatus(&curve, &options) {
        Ok(fd) => Computed {
            analysis: analyze_helix(&fd, &cfg.thresholds),
            fd: Some(fd),
            curve: Some(curve),
        },
        Err(e) => Computed {
            curve: Some(curve),
            fd: None,
            analysis: Err(e),
        },
    }
}

fn summarize(input: &Path, computed: &Computed, verify: bool) -> FileResult {
    let curve = computed.curve.as_ref().map(CurveInfo::of);
    let input = input.display().to_string();
    match &computed.analysis {
        Ok(a) => {
            let r = &a.report;
            let (status, exit_code, body) = if verify {
                let code = if r.agreement { EXIT_HELIX } else { EXIT_NOT_HELIX };
                let check = CrossCheck {
                    agreement: r.agreement,
                    verdict: r.verdict,
                    residuals: r.residuals.clone(),
                    characterizations: r.characterizations.clone(),
                    diagnostics: r.diagnostics.clone(),
                };
                let status = if r.agreement { "agree" } else { "disagree" };
                (status, code, Body::Verify(check))
            } else if r.verdict {
                ("helix", EXIT_HELIX, Body::Analyze(Box::new(r.clone())))
            } else {
                ("not_helix", EXIT_NOT_HELIX, Body::Analyze(Box::new(r.clone())))
            };
            FileResult {
                input,
                status,
                exit_code,
                curve,
                report: Some(body),
                error: None,
            }
        }
        Err(e) => {
            let exit_code = exit_code_for(e);
            FileResult {
                input,
                status: if exit_code == EXIT_ERROR { "error" } else { "degenerate" },
                exit_code,
                curve,
                report: None,
                error: Some(e.to_string()),
            }
        }
    }
}

/// Shortest round-trip form, as in the JSON report.
fn num(v: f64) -> String {
    serde_json::to_string(&v).expect("float serializes")
}

fn render_text(result: &FileResult, out: &mut String) {
    let _ = writeln!(out, "input: {}", result.input);
    let _ = writeln!(out, "status: {}", result.status);
    let _ = writeln!(out, "exit_code: {}", result.exit_code);
    if let Some(c) = &result.curve {
        let _ = writeln!(
            out,
            "curve: {:?} n={} nodes={} h={}",
            c.metric, c.dimension, c.nodes, num(c.h)
        );
    }
    if let Some(e) = &result.error {
        let _ = writeln!(out, "error: {e}");
    }
    let (residuals, characterizations, diagnostics) = match &result.report {
        Some(Body::Analyze(r)) => {
            let _ = writeln!(out, "verdict: {}", r.verdict);
            let _ = writeln!(out, "agreement: {}", r.agreement);
            let _ = writeln!(out, "c_mean: {}", num(r.c_mean));
            let _ = writeln!(out, "c_relative_dispersion: {}", num(r.c_relative_dispersion));
            if let Some(t) = r.theta {
                let _ = writeln!(out, "theta: {}", num(t));
            }
            if let Some(u) = &r.axis {
                let u: Vec<String> = u.iter().map(|x| num(*x)).collect();
                let _ = writeln!(out, "axis: [{}]", u.join(", "));
            }
            (&r.residuals, &r.characterizations, &r.diagnostics)
        }
        Some(Body::Verify(v)) => {
            let _ = writeln!(out, "agreement: {}", v.agreement);
            let _ = writeln!(out, "verdict: {}", v.verdict);
            (&v.residuals, &v.characterizations, &v.diagnostics)
        }
        None => return,
    };
    for (k, v) in residuals {
        let _ = writeln!(out, "residual.{k}: {} ({})", num(*v), if characterizations[k] { "pass" } else { "fail" });
    }
    for (k, v) in diagnostics {
        let _ = writeln!(out, "diagnostic.{k}: {}", num(*v));
    }
}

fn render_config_text(cfg: &RunConfig, out: &mut String) {
    let t = &cfg.thresholds;
    let _ = writeln!(out, "command: {}", cfg.command);
    let _ = writeln!(
        out,
        "config: metric={:?} dimension={:?} h={} step={}",
        cfg.metric,
        cfg.dimension,
        cfg.h.map_or("none".into(), num),
        num(cfg.step)
    );
    let _ = writeln!(
        out,
        "thresholds: tau_c={} tau_axis={} tau_mn={} tau_expand={} tau_pair={} tau_ode={}",
        num(t.tau_c),
        num(t.tau_axis),
        num(t.tau_mn),
        num(t.tau_expand),
        num(t.tau_pair),
        num(t.tau_ode)
    );
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn indicator_table(s: &[f64], c: &[f64]) -> String {
    let mut out = String::from("s,C\n");
    for (si, ci) in s.iter().zip(c) {
        let _ = writeln!(out, "{},{}", fmt_f64(*si), fmt_f64(*ci));
    }
    out
}

/// Runs `analyze` (or `verify`) and returns the exit code.
pub fn cmd_analyze(args: &AnalyzeArgs, verify: bool) -> i32 {
    let cfg = match RunConfig::resolve(args, verify) {
        Ok(c) => c,
        Err(e) => {
            report_error(&e);
            return EXIT_ERROR;
        }
    };
    match &args.manifest {
        Some(m) => run_manifest(args, &cfg, m, verify),
        None => run_single(args, &cfg, args.input.as_ref().expect("clap enforces input"), verify),
    }
}

fn run_single(args: &AnalyzeArgs, cfg: &RunConfig, input: &Path, verify: bool) -> i32 {
    let open = |p: &Option<PathBuf>| p.as_ref().map(|p| Sink::open(Some(p))).transpose();
    let sinks = (|| -> Result<_, Error> {
        Ok((
            Sink::open(args.output.as_ref())?,
            open(&args.dump_frenet)?,
            open(&args.dump_g)?,
            open(&args.dump_indicator)?,
        ))
    })();
    let (report_sink, frenet_sink, g_sink, indicator_sink) = match sinks {
        Ok(s) => s,
        Err(e) => {
            report_error(&e);
            return EXIT_ERROR;
        }
    };

    let computed = compute(input, cfg);
    let result = summarize(input, &computed, verify);
    if let Some(e) = &result.error {
        report_error(e);
    }

    let mut dumps: Vec<(Sink, String)> = Vec::new();
    if let (Some(sink), Some(fd)) = (frenet_sink, &computed.fd) {
        dumps.push((sink, to_json(fd)));
    }
    if let Ok(a) = &computed.analysis {
        if let Some(sink) = g_sink {
            dumps.push((sink, to_json(&a.g)));
        }
        if let Some(sink) = indicator_sink {
            dumps.push((sink, indicator_table(&a.g.s, &a.indicator)));
        }
    }

    let text = match cfg.format {
        ReportFormat::Json => to_json(&SingleReport {
            config: cfg,
            result: &result,
        }),
        ReportFormat::Text => {
            let mut out = String::new();
            render_config_text(cfg, &mut out);
            render_text(&result, &mut out);
            out
        }
    };
    dumps.push((report_sink, text));
    for (sink, text) in dumps {
        if let Err(e) = sink.write(&text) {
            report_error(&e);
            return EXIT_ERROR;
        }
    }
    result.exit_code
}

/// Reads a manifest: one path per line, blank lines and `#` comments
/// skipped, relative paths resolved against the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<PathBuf>, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let p = PathBuf::from(l);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        })
        .collect())
}

fn run_manifest(args: &AnalyzeArgs, cfg: &RunConfig, manifest: &Path, verify: bool) -> i32 {
    if args.dump_frenet.is_some() || args.dump_g.is_some() || args.dump_indicator.is_some() {
        report_error(&"dump flags need a single --input, not --manifest");
        return EXIT_ERROR;
    }
    let sink = match Sink::open(args.output.as_ref()) {
        Ok(s) => s,
        Err(e) => {
            report_error(&e);
            return EXIT_ERROR;
        }
    };
    let inputs = match read_manifest(manifest) {
        Ok(i) => i,
        Err(e) => {
            report_error(&e);
            return EXIT_ERROR;
        }
    };
    let results: Vec<FileResult> = Execution::Parallel.map_items(&inputs, |p| {
        let computed = compute(p, cfg);
        summarize(p, &computed, verify)
    });
    for r in &results {
        if let Some(e) = &r.error {
            eprintln!("ndhelix: {}: {e}", r.input);
        }
    }
    let exit_code = combine_exit_codes(results.iter().map(|r| r.exit_code));
    let text = match cfg.format {
        ReportFormat::Json => to_json(&ManifestReport {
            config: cfg,
            manifest: manifest.display().to_string(),
            exit_code,
            results: &results,
        }),
        ReportFormat::Text => {
            let mut out = String::new();
            render_config_text(cfg, &mut out);
            let _ = writeln!(out, "manifest: {}", manifest.display());
            let _ = writeln!(out, "exit_code: {exit_code}");
            for r in &results {
                out.push('\n');
                render_text(r, &mut out);
            }
            out
        }
    };
    if let Err(e) = sink.write(&text) {
        report_error(&e);
        return EXIT_ERROR;
    }
    exit_code
}

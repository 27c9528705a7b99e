//! Effective run configuration: flags over config file over defaults.

use std::path::Path;

use ndhelix::diff::DEFAULT_STENCIL_STEP;
use ndhelix::{Error, Signature, Thresholds};
use serde::{Deserialize, Serialize};

use crate::{AnalyzeArgs, ReportFormat};

/// Config file contents. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub metric: Option<Signature>,
    pub dimension: Option<usize>,
    pub h: Option<f64>,
    pub step: Option<f64>,
    pub tol_c: Option<f64>,
    pub tol_axis: Option<f64>,
    pub tol_mn: Option<f64>,
    pub tol_expand: Option<f64>,
    pub tol_pair: Option<f64>,
    pub tol_ode: Option<f64>,
    pub format: Option<ReportFormat>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

/// The configuration actually used, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    /// Metric assumed for CSV input (`None`: Euclidean).
    pub metric: Option<Signature>,
    pub dimension: Option<usize>,
    /// Resampling spacing (`None`: keep the file's grid).
    pub h: Option<f64>,
    pub step: f64,
    pub thresholds: Thresholds,
    pub format: ReportFormat,
}

impl RunConfig {
    pub fn resolve(args: &AnalyzeArgs, verify: bool) -> Result<Self, Error> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let d = Thresholds::default();
        let thresholds = Thresholds {
            tau_c: args.tol_c.or(file.tol_c).unwrap_or(d.tau_c),
            tau_axis: args.tol_axis.or(file.tol_axis).unwrap_or(d.tau_axis),
            tau_mn: args.tol_mn.or(file.tol_mn).unwrap_or(d.tau_mn),
            tau_expand: args.tol_expand.or(file.tol_expand).unwrap_or(d.tau_expand),
            tau_pair: args.tol_pair.or(file.tol_pair).unwrap_or(d.tau_pair),
            tau_ode: args.tol_ode.or(file.tol_ode).unwrap_or(d.tau_ode),
        };
        thresholds.validate()?;
        let cfg = RunConfig {
            command: if verify { "verify" } else { "analyze" }.into(),
            metric: args.metric.map(Signature::from).or(file.metric),
            dimension: args.dimension.or(file.dimension),
            h: args.h.or(file.h),
            step: args.step.or(file.step).unwrap_or(DEFAULT_STENCIL_STEP),
            thresholds,
            format: args.format.or(file.format).unwrap_or(ReportFormat::Json),
        };
        if let Some(h) = cfg.h {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::BadParameters(format!("h must be positive, got {h}")));
            }
        }
        if !(cfg.step > 0.0 && cfg.step.is_finite()) {
            return Err(Error::BadParameters(format!("step must be positive, got {}", cfg.step)));
        }
        Ok(cfg)
    }
}

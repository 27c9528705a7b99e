//! Cylindrical-helix analysis.
//!
//! A unit-speed curve is a cylindrical helix when its tangent keeps a
//! constant angle with a fixed axis. Four equivalent tests are evaluated
//! on the same frame data:
//!
//! 1. `sum_{i>=3} G_i^2` is constant (`sum_constancy`);
//! 2. `G_n' + k_{n-1} G_{n-1} = 0` (`pair_condition`);
//! 3. the first integrals `m`, `n` are constant (`mn_constancy`);
//! 4. the linear ODE in `G_3 = k1/k2` vanishes (`corollary_ode`).
//!
//! On a Euclidean helix the constant is `tan^2(theta)` and the axis is
//! recovered from the frame.

mod axis;
mod characterize;
mod expansion;
mod gfun;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use axis::{axis_angle_profile, axis_vector, AxisEstimate};
pub use characterize::{
    integral_characterization, mn_invariants, ode_residual_a, theorem_pair_condition,
    AxisOdeResidual, IntegralCharacterization, MnInvariants, PairCondition,
};
pub use expansion::{
    a_coefficients, corollary_ode_residual, corollary_quadratic_form, g_from_a_expansion,
    ACoefficients,
};
pub use gfun::{
    g_functions, helix_indicator, magden_e4_function, recursion_residual, GProfile,
    MAX_DEGENERATE_FRACTION,
};

use crate::error::{Error, Result};
use crate::frenet::FrenetData;
use crate::metric::Signature;
use crate::stats;

/// Nodes needed for any verdict.
pub const MIN_EVALUABLE_NODES: usize = 16;

pub const SUM_CONSTANCY: &str = "sum_constancy";
pub const PAIR_CONDITION: &str = "pair_condition";
pub const MN_CONSTANCY: &str = "mn_constancy";
pub const COROLLARY_ODE: &str = "corollary_ode";

/// Decision thresholds. Defaults sit about an order of magnitude above the
/// discretization error observed on reference helices at `h = 1e-3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Relative dispersion of `C(s)`.
    pub tau_c: f64,
    /// Node-wise spread of the reconstructed axis.
    pub tau_axis: f64,
    /// Relative dispersion of `m` and `n`.
    pub tau_mn: f64,
    /// Agreement of algebraically identical quantities computed by
    /// different routes.
    pub tau_expand: f64,
    /// `max |G_n' + k_{n-1} G_{n-1}|`.
    pub tau_pair: f64,
    /// `max |corollary ODE residual|`.
    pub tau_ode: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            tau_c: 1e-3,
            tau_axis: 1e-4,
            tau_mn: 1e-3,
            tau_expand: 1e-6,
            tau_pair: 1e-3,
            tau_ode: 1e-3,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.tau_c,
            self.tau_axis,
            self.tau_mn,
            self.tau_expand,
            self.tau_pair,
            self.tau_ode,
        ];
        if all.iter().all(|t| *t > 0.0 && t.is_finite()) {
            Ok(())
        } else {
            Err(Error::BadParameters("thresholds must be strictly positive".into()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracySummary {
    pub total_nodes: usize,
    pub degenerate_nodes: usize,
    pub evaluable_nodes: usize,
}

/// Outcome of [`classify_helix`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HelixReport {
    pub metric: Signature,
    pub dimension: usize,
    pub verdict: bool,
    pub c_mean: f64,
    pub c_relative_dispersion: f64,
    /// Radians in `[0, pi/2)`; Euclidean helices only.
    pub theta: Option<f64>,
    pub axis: Option<Vec<f64>>,
    /// Statistic of each characterization (compared to its threshold).
    pub residuals: BTreeMap<String, f64>,
    /// Boolean outcome of each characterization.
    pub characterizations: BTreeMap<String, bool>,
    /// Whether the four characterizations agree.
    pub agreement: bool,
    /// Secondary consistency checks that do not enter the verdict.
    pub diagnostics: BTreeMap<String, f64>,
    pub degeneracy: DegeneracySummary,
    pub thresholds: Thresholds,
}

/// Every intermediate quantity of one classification.
#[derive(Debug, Clone)]
pub struct HelixAnalysis {
    pub g: GProfile,
    pub indicator: Vec<f64>,
    pub pair: PairCondition,
    pub mn: MnInvariants,
    pub integral: IntegralCharacterization,
    pub a: ACoefficients,
    pub corollary: Vec<f64>,
    pub quadratic_form: Vec<f64>,
    pub axis: Option<AxisEstimate>,
    pub report: HelixReport,
}

/// Runs all characterizations and returns the report with its inputs.
pub fn analyze_helix(fd: &FrenetData, thresholds: &Thresholds) -> Result<HelixAnalysis> {
    thresholds.validate()?;
    let g = g_functions(fd)?;
    let indicator = helix_indicator(&g);
    let pair = theorem_pair_condition(&g, fd)?;
    let mn = mn_invariants(&g, fd)?;
    let integral = integral_characterization(&g, &mn);
    let a = a_coefficients(fd)?;
    let corollary = corollary_ode_residual(&a);
    let quadratic_form = corollary_quadratic_form(&a);

    let evaluable = (0..fd.len())
        .filter(|&t| {
            indicator[t].is_finite()
                && pair.series[t].is_finite()
                && mn.m[t].is_finite()
                && corollary[t].is_finite()
        })
        .count();
    if evaluable < MIN_EVALUABLE_NODES {
        return Err(Error::InsufficientSamples {
            found: evaluable,
            required: MIN_EVALUABLE_NODES,
        });
    }

    let c_mean = stats::mean(&indicator);
    let c_disp = stats::relative_dispersion(&indicator);
    let ode = stats::max_abs(&corollary);
    let mut residuals = BTreeMap::new();
    residuals.insert(SUM_CONSTANCY.to_string(), c_disp);
    residuals.insert(PAIR_CONDITION.to_string(), pair.residual_derivative);
    residuals.insert(MN_CONSTANCY.to_string(), mn.dispersion());
    residuals.insert(COROLLARY_ODE.to_string(), ode);
    let mut characterizations = BTreeMap::new();
    characterizations.insert(SUM_CONSTANCY.to_string(), c_disp < thresholds.tau_c);
    characterizations.insert(
        PAIR_CONDITION.to_string(),
        pair.residual_derivative < thresholds.tau_pair,
    );
    characterizations.insert(MN_CONSTANCY.to_string(), mn.dispersion() < thresholds.tau_mn);
    characterizations.insert(COROLLARY_ODE.to_string(), ode < thresholds.tau_ode);
    let verdict = characterizations.values().all(|v| *v);
    let agreement = characterizations.values().all(|v| *v == verdict);

    let expanded = g_from_a_expansion(&a, fd);
    let expansion_gap = (3..=fd.dim())
        .map(|j| {
            let diff: Vec<f64> = expanded.g(j).iter().zip(g.g(j)).map(|(x, y)| x - y).collect();
            stats::max_abs(&diff) / stats::max_abs(g.g(j)).max(1.0)
        })
        .fold(0.0, f64::max);
    let quad_gap = {
        let diff: Vec<f64> = quadratic_form.iter().zip(&indicator).map(|(x, y)| x - y).collect();
        stats::max_abs(&diff)
    };
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("recursion_residual".to_string(), recursion_residual(&g, fd));
    diagnostics.insert("pair_formula_residual".to_string(), pair.residual_formula);
    diagnostics.insert("integral_characterization".to_string(), integral.residual);
    diagnostics.insert("expansion_gap".to_string(), expansion_gap);
    diagnostics.insert("quadratic_form_gap".to_string(), quad_gap);
    diagnostics.insert("a_closed_form_defect".to_string(), a.closed_form_defect);

    let (theta, axis) = if verdict && !fd.metric.is_lorentzian() {
        let theta = c_mean.max(0.0).sqrt().atan();
        match axis_vector(fd, &g, theta, thresholds.tau_axis) {
            Ok(est) => {
                diagnostics.insert("axis_dispersion".to_string(), est.dispersion);
                diagnostics.insert("axis_angle_defect".to_string(), est.angle_defect);
                (Some(theta), Some(est))
            }
            Err(Error::NotAHelix { dispersion, .. }) => {
                diagnostics.insert("axis_dispersion".to_string(), dispersion);
                (Some(theta), None)
            }
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };

    let report = HelixReport {
        metric: fd.metric.signature,
        dimension: fd.dim(),
        verdict,
        c_mean,
        c_relative_dispersion: c_disp,
        theta,
        axis: axis.as_ref().map(|a| a.axis.clone()),
        residuals,
        characterizations,
        agreement,
        diagnostics,
        degeneracy: DegeneracySummary {
            total_nodes: fd.len(),
            degenerate_nodes: fd.degenerate_node_count(),
            evaluable_nodes: evaluable,
        },
        thresholds: *thresholds,
    };
    Ok(HelixAnalysis {
        g,
        indicator,
        pair,
        mn,
        integral,
        a,
        corollary,
        quadratic_form,
        axis,
        report,
    })
}

/// Decides the cylindrical-helix property of a curve from its frame data.
pub fn classify_helix(fd: &FrenetData, thresholds: &Thresholds) -> Result<HelixReport> {
    analyze_helix(fd, thresholds).map(|a| a.report)
}

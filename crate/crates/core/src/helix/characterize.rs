//! Characterizations through `G_{n-1}`, `G_n` and the phase
//! `phi = int k_{n-1}`, plus the direct check of the axis decomposition.

use serde::Serialize;

use crate::diff::cumulative_trapezoid;
use crate::error::{Error, Result};
use crate::frenet::FrenetData;
use crate::helix::gfun::GProfile;
use crate::stats;

#[derive(Debug, Clone, Serialize)]
pub struct PairCondition {
    /// `max |k_{n-1} G_n - k_{n-2} G_{n-2} - G_{n-1}'|`; zero by construction.
    pub residual_formula: f64,
    /// `max |G_n' + k_{n-1} G_{n-1}|`; vanishes exactly on helices.
    pub residual_derivative: f64,
    /// Per-node `G_n' + k_{n-1} G_{n-1}`.
    #[serde(skip)]
    pub series: Vec<f64>,
}

pub fn theorem_pair_condition(g: &GProfile, fd: &FrenetData) -> Result<PairCondition> {
    let n = g.dim();
    if n < 3 {
        return Err(Error::BadParameters(format!("pair condition needs n >= 3, got {n}")));
    }
    let k_last = &fd.curvatures[n - 2];
    let k_prev = &fd.curvatures[n - 3];
    let mut formula: f64 = 0.0;
    let mut series = vec![f64::NAN; fd.len()];
    for t in 0..fd.len() {
        let f = k_last[t] * g.g(n)[t] - k_prev[t] * g.g(n - 2)[t] - g.dg(n - 1)[t];
        if f.is_finite() {
            formula = formula.max(f.abs());
        }
        series[t] = g.dg(n)[t] + k_last[t] * g.g(n - 1)[t];
    }
    Ok(PairCondition {
        residual_formula: formula,
        residual_derivative: stats::max_abs(&series),
        series,
    })
}

/// The phase and the two first integrals
/// `m = G_n cos(phi) + G_{n-1} sin(phi) + int k_{n-2} G_{n-2} sin(phi)` and
/// `n = G_n sin(phi) - G_{n-1} cos(phi) - int k_{n-2} G_{n-2} cos(phi)`.
#[derive(Debug, Clone, Serialize)]
pub struct MnInvariants {
    pub phi: Vec<f64>,
    pub m: Vec<f64>,
    pub n: Vec<f64>,
    /// `int k_{n-2} G_{n-2} sin(phi)`.
    pub int_sin: Vec<f64>,
    /// `int k_{n-2} G_{n-2} cos(phi)`.
    pub int_cos: Vec<f64>,
}

impl MnInvariants {
    /// Larger of the relative dispersions of `m` and `n`.
    pub fn dispersion(&self) -> f64 {
        stats::relative_dispersion(&self.m).max(stats::relative_dispersion(&self.n))
    }
}

pub fn mn_invariants(g: &GProfile, fd: &FrenetData) -> Result<MnInvariants> {
    let dim = g.dim();
    if dim < 3 {
        return Err(Error::BadParameters(format!("m/n invariants need n >= 3, got {dim}")));
    }
    let len = fd.len();
    let h = fd.h;
    let live = |t: usize| g.g(dim)[t].is_finite();
    let k_last: Vec<f64> = (0..len)
        .map(|t| if live(t) { fd.curvatures[dim - 2][t] } else { f64::NAN })
        .collect();
    let phi = cumulative_trapezoid(&k_last, h);
    let weight: Vec<f64> = (0..len)
        .map(|t| fd.curvatures[dim - 3][t] * g.g(dim - 2)[t])
        .collect();
    let ws: Vec<f64> = (0..len).map(|t| weight[t] * phi[t].sin()).collect();
    let wc: Vec<f64> = (0..len).map(|t| weight[t] * phi[t].cos()).collect();
    let int_sin = cumulative_trapezoid(&ws, h);
    let int_cos = cumulative_trapezoid(&wc, h);
    let (mut m, mut nn) = (vec![f64::NAN; len], vec![f64::NAN; len]);
    for t in 0..len {
        let (sp, cp) = phi[t].sin_cos();
        let gn = g.g(dim)[t];
        let gm = g.g(dim - 1)[t];
        m[t] = gn * cp + gm * sp + int_sin[t];
        nn[t] = gn * sp - gm * cp - int_cos[t];
    }
    Ok(MnInvariants {
        phi,
        m,
        n: nn,
        int_sin,
        int_cos,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralCharacterization {
    pub a: f64,
    pub b: f64,
    /// `max |G_{n-1} - ((A - I_sin) sin(phi) - (B + I_cos) cos(phi))|`.
    pub residual: f64,
}

/// Fits `A = mean(m)`, `B = mean(n)` and measures how far `G_{n-1}` is
/// from the closed form those constants predict.
pub fn integral_characterization(
    g: &GProfile,
    mn: &MnInvariants,
) -> IntegralCharacterization {
    let dim = g.dim();
    let a = stats::mean(&mn.m);
    let b = stats::mean(&mn.n);
    let diff: Vec<f64> = (0..mn.phi.len())
        .map(|t| {
            let (sp, cp) = mn.phi[t].sin_cos();
            let rhs = (a - mn.int_sin[t]) * sp - (b + mn.int_cos[t]) * cp;
            g.g(dim - 1)[t] - rhs
        })
        .collect();
    IntegralCharacterization {
        a,
        b,
        residual: stats::max_abs(&diff),
    }
}

/// Residuals of the system satisfied by the components `a_i` of a fixed
/// direction `U = sum a_i V_i`.
#[derive(Debug, Clone, Serialize)]
pub struct AxisOdeResidual {
    /// Row 0 is `a_2` itself; row `r >= 1` is equation `j = r + 1`:
    /// `a_j' + sum_i a_i m_ij`, whose Euclidean form is
    /// `a_j' + k_{j-1} a_{j-1} - k_j a_{j+1}`.
    pub rows: Vec<Vec<f64>>,
    pub max: f64,
    /// `a_1` vanishes identically, which forces `U = 0` for a valid axis.
    pub a1_vanishes: bool,
}

pub fn ode_residual_a(fd: &FrenetData, axis: &[f64]) -> Result<AxisOdeResidual> {
    fd.metric.check(axis)?;
    let n = fd.dim();
    let len = fd.len();
    let comps: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..len)
                .map(|t| fd.metric.dot(&fd.frames[i][t], axis) * fd.epsilon(i))
                .collect()
        })
        .collect();
    let dcomps: Vec<Vec<f64>> = comps.iter().map(|a| fd.differentiator.derivative(a)).collect();
    let mut rows = vec![comps[1].clone()];
    for j in 1..n {
        let row = (0..len)
            .map(|t| {
                let m = fd.frenet_matrix(t);
                dcomps[j][t] + (0..n).map(|i| comps[i][t] * m[i][j]).sum::<f64>()
            })
            .collect();
        rows.push(row);
    }
    let max = rows.iter().map(|r| stats::max_abs(r)).fold(0.0, f64::max);
    let a1_vanishes = stats::max_abs(&comps[0]) < 1e-8 * (1.0 + fd.metric.norm(axis));
    Ok(AxisOdeResidual {
        rows,
        max,
        a1_vanishes,
    })
}

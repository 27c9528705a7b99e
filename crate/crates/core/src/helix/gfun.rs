use serde::Serialize;

use crate::error::{Error, Result};
use crate::frenet::FrenetData;

/// Fraction of nodes that may be flagged degenerate before curvature
/// functions are refused outright.
pub const MAX_DEGENERATE_FRACTION: f64 = 0.2;

/// `G_1..G_n` and their derivatives per node.
#[derive(Debug, Clone, Serialize)]
pub struct GProfile {
    pub s: Vec<f64>,
    /// `values[i][node]` is `G_{i+1}`.
    pub values: Vec<Vec<f64>>,
    /// `derivatives[i][node]` is `G_{i+1}'`.
    pub derivatives: Vec<Vec<f64>>,
}

impl GProfile {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `G_i` with 1-based `i`.
    pub fn g(&self, i: usize) -> &[f64] {
        &self.values[i - 1]
    }

    /// `G_i'` with 1-based `i`.
    pub fn dg(&self, i: usize) -> &[f64] {
        &self.derivatives[i - 1]
    }
}

/// Masked curvature `k_i` (1-based), or an error when too many nodes are
/// degenerate for the functions built on it to mean anything.
pub(crate) fn checked_curvatures(fd: &FrenetData) -> Result<Vec<Vec<f64>>> {
    let flagged = fd.degenerate_node_count();
    if flagged as f64 > MAX_DEGENERATE_FRACTION * fd.len() as f64 || flagged == fd.len() {
        let (node, index) = fd
            .degeneracy_flags
            .iter()
            .enumerate()
            .find_map(|(j, f)| f.first().map(|i| (j, *i)))
            .expect("flagged nodes exist");
        return Err(Error::DegenerateCurvature {
            index,
            count: flagged,
            at: fd.s[node],
        });
    }
    Ok((0..fd.dim() - 1).map(|i| fd.masked_curvature(i)).collect())
}

/// `G_1 = 1`, `G_2 = 0`, `G_i = (k_{i-2} G_{i-2} + G_{i-1}') / k_{i-1}`.
pub fn g_functions(fd: &FrenetData) -> Result<GProfile> {
    let n = fd.dim();
    if n < 3 {
        return Err(Error::BadParameters(format!(
            "curvature functions need n >= 3, got {n}"
        )));
    }
    let kappa = checked_curvatures(fd)?;
    let d = &fd.differentiator;
    let len = fd.len();
    let mut values = vec![vec![1.0; len], vec![0.0; len]];
    let mut derivatives = vec![vec![0.0; len], vec![0.0; len]];
    values.push(kappa[0].iter().zip(&kappa[1]).map(|(a, b)| a / b).collect());
    for j in 4..=n {
        let prev = d.derivative(&values[j - 2]);
        let next: Vec<f64> = (0..len)
            .map(|t| (kappa[j - 3][t] * values[j - 3][t] + prev[t]) / kappa[j - 2][t])
            .collect();
        derivatives.push(prev);
        values.push(next);
    }
    derivatives.push(d.derivative(&values[n - 1]));
    Ok(GProfile {
        s: fd.s.clone(),
        values,
        derivatives,
    })
}

/// Largest `|k_{i-1} G_i - k_{i-2} G_{i-2} - G_{i-1}'|` over `3 <= i <= n`.
pub fn recursion_residual(g: &GProfile, fd: &FrenetData) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 3..=g.dim() {
        for t in 0..fd.len() {
            let r = fd.curvatures[i - 2][t] * g.g(i)[t]
                - fd.curvatures[i - 3][t] * g.g(i - 2)[t]
                - g.dg(i - 1)[t];
            if r.is_finite() {
                worst = worst.max(r.abs());
            }
        }
    }
    worst
}

/// Helix indicator `C(s) = sum_{i=3}^n G_i(s)^2`.
pub fn helix_indicator(g: &GProfile) -> Vec<f64> {
    let len = g.s.len();
    (0..len)
        .map(|t| (3..=g.dim()).map(|i| g.g(i)[t] * g.g(i)[t]).sum())
        .collect()
}

/// The four-dimensional special case written directly in curvatures:
/// `(k1/k2)^2 + ((k1/k2)' / k3)^2`.
pub fn magden_e4_function(fd: &FrenetData) -> Result<Vec<f64>> {
    if fd.dim() != 4 {
        return Err(Error::WrongDimension {
            required: 4,
            found: fd.dim(),
        });
    }
    let kappa = checked_curvatures(fd)?;
    let ratio: Vec<f64> = kappa[0].iter().zip(&kappa[1]).map(|(a, b)| a / b).collect();
    let dratio = fd.differentiator.derivative(&ratio);
    Ok((0..fd.len())
        .map(|t| {
            let q = dratio[t] / kappa[2][t];
            ratio[t] * ratio[t] + q * q
        })
        .collect())
}

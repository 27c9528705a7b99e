use serde::Serialize;

use crate::error::{Error, Result};
use crate::frenet::FrenetData;
use crate::helix::gfun::GProfile;

#[derive(Debug, Clone, Serialize)]
pub struct AxisEstimate {
    pub axis: Vec<f64>,
    /// Norm of the componentwise range of the node-wise axis vectors; an
    /// upper bound on their largest pairwise distance.
    pub dispersion: f64,
    /// Norm of the averaged vector before normalization.
    pub raw_norm: f64,
    /// `max |<V_1, U> - cos(theta)|` (before any sign flip).
    pub angle_defect: f64,
    pub nodes: usize,
}

/// Axis `U = cos(theta) (V_1 + sum_{i>=3} G_i V_i)`, averaged over nodes.
/// The sign is fixed so the first nonzero component is positive.
///
/// Fails with `NotAHelix` when the node-wise vectors spread by more than
/// `tau_axis` or when `<V_1, U>` departs from `cos(theta)` by more.
pub fn axis_vector(
    fd: &FrenetData,
    g: &GProfile,
    theta: f64,
    tau_axis: f64,
) -> Result<AxisEstimate> {
    if fd.metric.is_lorentzian() {
        return Err(Error::BadParameters(
            "axis angle is only defined for Euclidean curves".into(),
        ));
    }
    let n = fd.dim();
    let c = theta.cos();
    let per_node: Vec<Vec<f64>> = (0..fd.len())
        .filter_map(|t| {
            let mut u = fd.frames[0][t].clone();
            for i in 3..=n {
                let gi = g.g(i)[t];
                for (uk, vk) in u.iter_mut().zip(&fd.frames[i - 1][t]) {
                    *uk += gi * vk;
                }
            }
            u.iter_mut().for_each(|x| *x *= c);
            u.iter().all(|x| x.is_finite()).then_some(u)
        })
        .collect();
    if per_node.is_empty() {
        return Err(Error::InsufficientSamples {
            found: 0,
            required: 1,
        });
    }
    let count = per_node.len() as f64;
    let mut mean = vec![0.0; n];
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for u in &per_node {
        for k in 0..n {
            mean[k] += u[k];
            lo[k] = lo[k].min(u[k]);
            hi[k] = hi[k].max(u[k]);
        }
    }
    mean.iter_mut().for_each(|x| *x /= count);
    let dispersion = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt();
    if !(dispersion <= tau_axis) {
        return Err(Error::NotAHelix {
            dispersion,
            threshold: tau_axis,
        });
    }
    let raw_norm = fd.metric.norm(&mean);
    let mut axis: Vec<f64> = mean.iter().map(|x| x / raw_norm).collect();
    let angle_defect = axis_angle_profile(fd, &axis)?
        .iter()
        .filter(|v| v.is_finite())
        .map(|v| (v - c).abs())
        .fold(0.0, f64::max);
    if !(angle_defect <= tau_axis) {
        return Err(Error::NotAHelix {
            dispersion: angle_defect,
            threshold: tau_axis,
        });
    }
    if let Some(first) = axis.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            axis.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(AxisEstimate {
        axis,
        dispersion,
        raw_norm,
        angle_defect,
        nodes: per_node.len(),
    })
}

/// `<V_1(s), U>` per node.
pub fn axis_angle_profile(fd: &FrenetData, axis: &[f64]) -> Result<Vec<f64>> {
    fd.metric.check(axis)?;
    Ok(fd.frames[0].iter().map(|v| fd.metric.dot(v, axis)).collect())
}

//! Frenet frame and curvatures of a unit-speed sampled curve.
//!
//! The frame is built stage by stage: `V_1 = alpha'`, then each `V_{k+1}` is
//! the metric Gram–Schmidt rejection of `V_k'` from `V_1..V_k`, and the last
//! vector completes a positively oriented basis. The span of `V_1..V_{k+1}`
//! equals that of `alpha'..alpha^(k+1)`, so this is the classical
//! construction with unit vectors differentiated instead of raw derivatives.
//! Curvatures come from `k_i = <V_i', V_{i+1}> e_{i+1}`, which is the
//! coefficient structure of the Frenet system itself.

use serde::{Serialize, Serializer};

use crate::curve::{CurveSamples, TAU_SPEED_SAMPLED};
use crate::diff::{Differentiator, DEFAULT_STENCIL_STEP};
use crate::error::{Error, Result};
use crate::metric::{determinant, euclidean_norm, Metric};
use crate::par::Execution;

/// Relative threshold below which a Gram–Schmidt norm or curvature counts
/// as vanishing.
pub const TAU_DEGENERATE: f64 = 1e-7;
/// Orthonormality tolerance of computed frames.
pub const TAU_FRAME: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetOptions {
    /// Physical stencil step; ignored when `stride` is set.
    pub step: f64,
    pub stride: Option<usize>,
    pub tau_degenerate: f64,
    pub tau_speed: f64,
    pub execution: Execution,
}

impl Default for FrenetOptions {
    fn default() -> Self {
        Self {
            step: DEFAULT_STENCIL_STEP,
            stride: None,
            tau_degenerate: TAU_DEGENERATE,
            tau_speed: TAU_SPEED_SAMPLED,
            execution: Execution::default(),
        }
    }
}

impl FrenetOptions {
    pub fn differentiator(&self, h: f64) -> Differentiator {
        match self.stride {
            Some(s) => Differentiator::new(h, s),
            None => Differentiator::with_step(h, self.step),
        }
        .with_execution(self.execution)
    }
}

/// Frames and curvatures on the evaluable part of a grid.
#[derive(Debug, Clone)]
pub struct FrenetData {
    pub metric: Metric,
    pub h: f64,
    pub s: Vec<f64>,
    /// `frames[i][node]` is `V_{i+1}` at that node.
    pub frames: Vec<Vec<Vec<f64>>>,
    /// `curvatures[i][node]` is `k_{i+1}`.
    pub curvatures: Vec<Vec<f64>>,
    /// Unsigned curvatures from Gram–Schmidt norms of raw derivatives,
    /// kept as an independent cross-check.
    pub gs_curvatures: Vec<Vec<f64>>,
    /// Per node, the 1-based indices `i` whose `k_i` fell below threshold.
    pub degeneracy_flags: Vec<Vec<usize>>,
    pub differentiator: Differentiator,
}

impl FrenetData {
    /// Assembles frame data from known frames and curvatures, e.g. from
    /// integration of the Frenet system or hand-built test frames.
    pub fn from_parts(
        metric: Metric,
        h: f64,
        s: Vec<f64>,
        frames: Vec<Vec<Vec<f64>>>,
        curvatures: Vec<Vec<f64>>,
        differentiator: Differentiator,
    ) -> Result<Self> {
        let n = metric.dim;
        if frames.len() != n || curvatures.len() != n - 1 {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: frames.len(),
            });
        }
        let len = s.len();
        if frames.iter().any(|f| f.len() != len) || curvatures.iter().any(|k| k.len() != len) {
            return Err(Error::Parse("frame and curvature series must match the grid".into()));
        }
        Ok(Self {
            metric,
            h,
            s,
            frames,
            gs_curvatures: curvatures.iter().map(|k| k.iter().map(|v| v.abs()).collect()).collect(),
            curvatures,
            degeneracy_flags: vec![Vec::new(); len],
            differentiator,
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.dim
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Causal sign of `V_{i+1}` (0-based `i`).
    pub fn epsilon(&self, i: usize) -> f64 {
        self.metric.sign(i)
    }

    /// `k_{i+1}` series with flagged nodes replaced by `NaN`.
    pub fn masked_curvature(&self, i: usize) -> Vec<f64> {
        self.curvatures[i]
            .iter()
            .zip(&self.degeneracy_flags)
            .map(|(k, flags)| if flags.is_empty() { *k } else { f64::NAN })
            .collect()
    }

    pub fn degenerate_node_count(&self) -> usize {
        self.degeneracy_flags.iter().filter(|f| !f.is_empty()).count()
    }

    /// Frame derivatives `V_i'` by the stored differentiator, `[i][node]`.
    pub fn frame_derivatives(&self) -> Vec<Vec<Vec<f64>>> {
        self.frames
            .iter()
            .map(|v| self.differentiator.derivative_vec(v))
            .collect()
    }

    /// Frenet coefficient matrix at a node: `V_i' = sum_j m[i][j] V_j`.
    ///
    /// Superdiagonal `k_i`; subdiagonal fixed by metric skew-adjointness,
    /// `-k_i e_i e_{i+1}`, which for a timelike tangent turns row 2 into
    /// `V_2' = k_1 V_1 + k_2 V_3`.
    pub fn frenet_matrix(&self, node: usize) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n - 1 {
            let k = self.curvatures[i][node];
            m[i][i + 1] = k;
            m[i + 1][i] = -k * self.epsilon(i) * self.epsilon(i + 1);
        }
        m
    }

    /// Largest `|<V_i, V_j> - e_i d_ij|` over finite nodes.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for node in 0..self.len() {
            for i in 0..n {
                for j in i..n {
                    let vi = &self.frames[i][node];
                    let vj = &self.frames[j][node];
                    if !vi[0].is_finite() || !vj[0].is_finite() {
                        continue;
                    }
                    let target = if i == j { self.epsilon(i) } else { 0.0 };
                    worst = worst.max((self.metric.dot(vi, vj) - target).abs());
                }
            }
        }
        worst
    }
}

/// Serialization view: frames become per-node row-major `n x n` matrices.
impl Serialize for FrenetData {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            metric: &'a Metric,
            h: f64,
            stencil_stride: usize,
            s: &'a [f64],
            frames: Vec<Vec<f64>>,
            curvatures: &'a [Vec<f64>],
            degeneracy_flags: &'a [Vec<usize>],
        }
        let frames = (0..self.len())
            .map(|node| {
                self.frames
                    .iter()
                    .flat_map(|v| v[node].iter().copied())
                    .collect()
            })
            .collect();
        View {
            metric: &self.metric,
            h: self.h,
            stencil_stride: self.differentiator.stride,
            s: &self.s,
            frames,
            curvatures: &self.curvatures,
            degeneracy_flags: &self.degeneracy_flags,
        }
        .serialize(serializer)
    }
}

/// Metric Gram–Schmidt rejection of `v` from the (orthonormal) `basis`.
fn reject(metric: &Metric, v: &[f64], basis: &[&[f64]]) -> Vec<f64> {
    let mut w = v.to_vec();
    for (j, b) in basis.iter().enumerate() {
        let c = metric.dot(&w, b) * metric.sign(j);
        for (wk, bk) in w.iter_mut().zip(b.iter()) {
            *wk -= c * bk;
        }
    }
    w
}

/// Unit vector completing `basis` (n-1 vectors) to a positively oriented
/// orthonormal frame.
fn complete_frame(metric: &Metric, basis: &[&[f64]]) -> Vec<f64> {
    let n = metric.dim;
    if basis.iter().any(|b| !b[0].is_finite()) {
        return vec![f64::NAN; n];
    }
    let mut best = Vec::new();
    let mut best_norm = -1.0;
    for c in 0..n {
        let mut e = vec![0.0; n];
        e[c] = 1.0;
        let mut w = reject(metric, &e, basis);
        // a second pass restores orthogonality lost to cancellation
        w = reject(metric, &w, basis);
        let norm = metric.norm(&w);
        if norm > best_norm {
            best_norm = norm;
            best = w;
        }
    }
    for v in best.iter_mut() {
        *v /= best_norm;
    }
    let mut rows: Vec<Vec<f64>> = basis.iter().map(|b| b.to_vec()).collect();
    rows.push(best.clone());
    if determinant(&rows) < 0.0 {
        for v in best.iter_mut() {
            *v = -*v;
        }
    }
    best
}

/// Estimates the Frenet frame and curvatures of a unit-speed curve.
pub fn frenet_apparatus(curve: &CurveSamples, options: &FrenetOptions) -> Result<FrenetData> {
    let metric = curve.metric;
    let n = metric.dim;
    let d = options.differentiator(curve.h);
    let total = curve.len();
    let trim = n * d.half_width();
    if total <= 2 * trim {
        return Err(Error::InsufficientSamples {
            found: total,
            required: 2 * trim + 1,
        });
    }
    let exec = options.execution;

    let velocity = d.derivative_vec(&curve.points);
    let mut speed_defect: f64 = 0.0;
    for (j, v) in velocity.iter().enumerate() {
        if !v[0].is_finite() {
            continue;
        }
        let q = metric.dot(v, v);
        if metric.is_lorentzian() && !(q < 0.0) {
            return Err(Error::NotTimelike { at: curve.s(j), value: q });
        }
        speed_defect = speed_defect.max((q.abs().sqrt() - 1.0).abs());
    }
    if speed_defect > options.tau_speed {
        return Err(Error::NotUnitSpeed { deviation: speed_defect });
    }

    let mut frames: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n);
    frames.push(exec.map(total, |j| {
        let v = &velocity[j];
        let norm = metric.norm(v);
        v.iter().map(|x| x / norm).collect()
    }));
    let mut curvatures: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    let mut flags: Vec<Vec<usize>> = vec![Vec::new(); total];
    let footprint = 2 * d.half_width() + 1;

    for k in 0..n.saturating_sub(2) {
        let dv = d.derivative_vec(&frames[k]);
        let built: Vec<(Vec<f64>, f64, bool)> = exec.map(total, |j| {
            let basis: Vec<&[f64]> = frames.iter().map(|f| f[j].as_slice()).collect();
            if !dv[j][0].is_finite() || basis.iter().any(|b| !b[0].is_finite()) {
                return (vec![f64::NAN; n], f64::NAN, false);
            }
            let w = reject(&metric, &dv[j], &basis);
            let w = reject(&metric, &w, &basis);
            let norm = metric.norm(&w);
            let scale = euclidean_norm(&dv[j]).max(1.0);
            if norm < options.tau_degenerate * scale {
                return (vec![f64::NAN; n], norm, true);
            }
            let v: Vec<f64> = w.iter().map(|x| x / norm).collect();
            let kappa = metric.dot(&dv[j], &v) * metric.sign(k + 1);
            (v, kappa, false)
        });
        let mut run = 0usize;
        for (j, (_, _, degenerate)) in built.iter().enumerate() {
            if *degenerate {
                flags[j].push(k + 1);
                run += 1;
                if run >= footprint {
                    let start = j + 1 - run;
                    return Err(Error::DegenerateFrame {
                        index: k + 1,
                        at: curve.s(start),
                    });
                }
            } else {
                run = 0;
            }
        }
        let (vecs, kappas): (Vec<_>, Vec<_>) = built.into_iter().map(|(v, k, _)| (v, k)).unzip();
        frames.push(vecs);
        curvatures.push(kappas);
    }

    frames.push(exec.map(total, |j| {
        let basis: Vec<&[f64]> = frames.iter().map(|f| f[j].as_slice()).collect();
        complete_frame(&metric, &basis)
    }));
    let dv = d.derivative_vec(&frames[n - 2]);
    let last: Vec<f64> = exec.map(total, |j| {
        metric.dot(&dv[j], &frames[n - 1][j]) * metric.sign(n - 1)
    });
    for (j, k) in last.iter().enumerate() {
        let scale = euclidean_norm(&dv[j]).max(1.0);
        if k.is_finite() && k.abs() < options.tau_degenerate * scale {
            flags[j].push(n - 1);
        }
    }
    curvatures.push(last);

    let gs_curvatures = raw_derivative_curvatures(curve, &d);

    let range = trim..total - trim;
    Ok(FrenetData {
        metric,
        h: curve.h,
        s: range.clone().map(|j| curve.s(j)).collect(),
        frames: frames.into_iter().map(|f| f[range.clone()].to_vec()).collect(),
        curvatures: curvatures.into_iter().map(|k| k[range.clone()].to_vec()).collect(),
        gs_curvatures: gs_curvatures.into_iter().map(|k| k[range.clone()].to_vec()).collect(),
        degeneracy_flags: flags[range].to_vec(),
        differentiator: d,
    })
}

/// `|k_i| = |e_{i+1}| / (|e_i| |alpha'|)` with `e_i` the Gram–Schmidt
/// residuals of the raw derivatives `alpha', ..., alpha^(n)`.
fn raw_derivative_curvatures(curve: &CurveSamples, d: &Differentiator) -> Vec<Vec<f64>> {
    let metric = curve.metric;
    let n = metric.dim;
    let mut derivs = Vec::with_capacity(n);
    let mut current = curve.points.clone();
    for _ in 0..n {
        current = d.derivative_vec(&current);
        derivs.push(current.clone());
    }
    let rows: Vec<Vec<f64>> = d.execution.map(curve.len(), |j| {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut norms = Vec::with_capacity(n);
        for dk in &derivs {
            let mut w = dk[j].clone();
            for (i, b) in basis.iter().enumerate() {
                let c = metric.dot(&w, b) * metric.sign(i);
                for (wk, bk) in w.iter_mut().zip(b) {
                    *wk -= c * bk;
                }
            }
            let norm = metric.norm(&w);
            norms.push(norm);
            basis.push(w.iter().map(|x| x / norm).collect());
        }
        (0..n - 1)
            .map(|i| norms[i + 1] / (norms[i] * norms[0]))
            .collect()
    });
    (0..n - 1)
        .map(|i| rows.iter().map(|r| r[i]).collect())
        .collect()
}

/// `|V_i' - sum_j m_ij V_j|` (coordinate norm) per node, `[node][i]`.
/// Nodes where a frame derivative is unavailable hold `NaN`.
pub fn frenet_residuals(fd: &FrenetData) -> Vec<Vec<f64>> {
    let n = fd.dim();
    let dv = fd.frame_derivatives();
    fd.differentiator.execution.map(fd.len(), |node| {
        let m = fd.frenet_matrix(node);
        (0..n)
            .map(|i| {
                let mut r = dv[i][node].clone();
                for (j, mij) in m[i].iter().enumerate() {
                    if *mij != 0.0 {
                        for (rk, vk) in r.iter_mut().zip(&fd.frames[j][node]) {
                            *rk -= mij * vk;
                        }
                    }
                }
                euclidean_norm(&r)
            })
            .collect()
    })
}

/// Largest finite Frenet residual over nodes and rows.
pub fn max_frenet_residual(fd: &FrenetData) -> f64 {
    frenet_residuals(fd)
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max)
}

/// Connection matrix `c_ij = <V_i', V_j> e_j` per node.
pub fn connection_matrices(fd: &FrenetData) -> Vec<Vec<Vec<f64>>> {
    let n = fd.dim();
    let dv = fd.frame_derivatives();
    (0..fd.len())
        .map(|node| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| fd.metric.dot(&dv[i][node], &fd.frames[j][node]) * fd.epsilon(j))
                        .collect()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::AnalyticCurve;

    fn helix(a: f64, b: f64, len: f64, h: f64) -> CurveSamples {
        AnalyticCurve::new(Metric::euclidean(3), (0.0, len), move |s| {
            vec![a * s.cos(), a * s.sin(), b * s]
        })
        .reparameterize_unit_speed(h)
        .unwrap()
    }

    #[test]
    fn helix_curvatures() {
        let c = helix(0.6, 0.8, 20.0, 1e-3);
        let fd = frenet_apparatus(&c, &FrenetOptions::default()).unwrap();
        for node in 0..fd.len() {
            assert!((fd.curvatures[0][node] - 0.6).abs() < 1e-6);
            assert!((fd.curvatures[1][node] - 0.8).abs() < 1e-6);
            assert!((fd.gs_curvatures[0][node] - 0.6).abs() < 1e-5);
            assert!((fd.gs_curvatures[1][node] - 0.8).abs() < 1e-5);
        }
        assert!(fd.orthonormality_defect() < TAU_FRAME);
        assert_eq!(fd.degenerate_node_count(), 0);
    }

    #[test]
    fn straight_line_is_degenerate() {
        let pts = (0..2000).map(|j| vec![j as f64 * 1e-3, 0.0, 0.0]).collect();
        let c = CurveSamples::new(Metric::euclidean(3), 0.0, 1e-3, pts).unwrap();
        assert!(matches!(
            frenet_apparatus(&c, &FrenetOptions::default()),
            Err(Error::DegenerateFrame { index: 1, .. })
        ));
    }

    #[test]
    fn planar_circle_flags_torsion() {
        let c = AnalyticCurve::new(Metric::euclidean(3), (0.0, 10.0), |s| {
            vec![s.cos(), s.sin(), 0.0]
        })
        .reparameterize_unit_speed(1e-3)
        .unwrap();
        let fd = frenet_apparatus(&c, &FrenetOptions::default()).unwrap();
        for node in 0..fd.len() {
            assert!((fd.curvatures[0][node] - 1.0).abs() < 1e-6);
            assert_eq!(fd.degeneracy_flags[node], vec![2]);
        }
    }

    #[test]
    fn deterministic_across_execution_modes() {
        let c = helix(0.6, 0.8, 4.0, 1e-3);
        let seq = FrenetOptions {
            execution: Execution::Sequential,
            ..Default::default()
        };
        let a = frenet_apparatus(&c, &seq).unwrap();
        let b = frenet_apparatus(&c, &FrenetOptions::default()).unwrap();
        assert_eq!(a.curvatures, b.curvatures);
        assert_eq!(a.frames, b.frames);
    }

    #[test]
    fn not_unit_speed_rejected() {
        let pts = (0..2000)
            .map(|j| {
                let t = 2.0 * j as f64 * 1e-3;
                vec![t.cos(), t.sin(), t]
            })
            .collect();
        let c = CurveSamples::new(Metric::euclidean(3), 0.0, 1e-3, pts).unwrap();
        assert!(matches!(
            frenet_apparatus(&c, &FrenetOptions::default()),
            Err(Error::NotUnitSpeed { .. })
        ));
    }

    fn constant_frame(len: usize) -> FrenetData {
        let n = 3;
        let frames = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                vec![e; len]
            })
            .collect();
        FrenetData::from_parts(
            Metric::euclidean(n),
            0.01,
            (0..len).map(|j| j as f64 * 0.01).collect(),
            frames,
            vec![vec![0.0; len]; n - 1],
            Differentiator::new(0.01, 1),
        )
        .unwrap()
    }

    #[test]
    fn constant_frame_with_zero_curvature_has_zero_residual() {
        let fd = constant_frame(50);
        let res = frenet_residuals(&fd);
        for row in res.iter().filter(|r| r[0].is_finite()) {
            assert!(row.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn negated_normal_doubles_first_row() {
        let c = helix(0.6, 0.8, 6.0, 1e-3);
        let mut fd = frenet_apparatus(&c, &FrenetOptions::default()).unwrap();
        for v in fd.frames[1].iter_mut() {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        let res = frenet_residuals(&fd);
        for row in res.iter().filter(|r| r[0].is_finite()) {
            assert!((row[0] - 1.2).abs() < 1e-6, "{}", row[0]);
        }
    }

    #[test]
    fn connection_is_skew_adjoint() {
        for metric in [Metric::euclidean(3), Metric::lorentzian(3)] {
            let curve = if metric.is_lorentzian() {
                AnalyticCurve::new(metric, (0.0, 6.0), |s| {
                    vec![2f64.sqrt() * s, s.cos(), s.sin()]
                })
            } else {
                AnalyticCurve::new(metric, (0.0, 6.0), |s| {
                    vec![0.6 * s.cos(), 0.6 * s.sin(), 0.8 * s]
                })
            };
            let fd = frenet_apparatus(
                &curve.reparameterize_unit_speed(1e-3).unwrap(),
                &FrenetOptions::default(),
            )
            .unwrap();
            for m in connection_matrices(&fd).iter().filter(|m| m[0][0].is_finite()) {
                for i in 0..3 {
                    for j in 0..3 {
                        let sym = m[i][j] + fd.epsilon(i) * m[j][i] * fd.epsilon(j);
                        assert!(sym.abs() < 1e-6, "{i}{j}: {sym}");
                    }
                }
            }
        }
    }

    #[test]
    fn timelike_helix_frame() {
        let curve = AnalyticCurve::new(Metric::lorentzian(3), (0.0, 10.0), |s| {
            vec![2f64.sqrt() * s, s.cos(), s.sin()]
        });
        let fd = frenet_apparatus(
            &curve.reparameterize_unit_speed(1e-3).unwrap(),
            &FrenetOptions::default(),
        )
        .unwrap();
        assert!(fd.orthonormality_defect() < TAU_FRAME);
        for node in 0..fd.len() {
            assert!((fd.curvatures[0][node] - 1.0).abs() < 1e-6);
            assert!((fd.curvatures[1][node].abs() - 2f64.sqrt()).abs() < 1e-6);
        }
        assert!(max_frenet_residual(&fd) < 1e-5);
    }
}

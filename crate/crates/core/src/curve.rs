//! Discrete and closed-form curves, and arc-length reparameterization.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diff::{central_derivative, Differentiator};
use crate::error::{Error, Result};
use crate::interp::{adaptive_integral, gauss_legendre, CubicSpline, MonotoneCubic};
use crate::metric::Metric;
use crate::par::Execution;

/// Speed tolerance for curves built from closed forms.
pub const TAU_SPEED_ANALYTIC: f64 = 1e-8;
/// Speed tolerance for externally supplied sampled data.
pub const TAU_SPEED_SAMPLED: f64 = 1e-4;
/// Grid spacing must be uniform to this relative tolerance.
pub const UNIFORM_GRID_TOL: f64 = 1e-12;
/// Speeds below this are treated as a singular point.
pub const REGULARITY_THRESHOLD: f64 = 1e-8;

/// Expected invariants attached to generated curves so that downstream
/// harnesses can assert against them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Certificate {
    pub generator: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub is_helix: Option<bool>,
}

/// An arc-length sampled curve on the uniform grid `s_j = s0 + j h`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSamples {
    pub metric: Metric,
    pub s0: f64,
    pub h: f64,
    pub points: Vec<Vec<f64>>,
    pub provenance: String,
    pub certificate: Option<Certificate>,
}

impl CurveSamples {
    pub fn new(metric: Metric, s0: f64, h: f64, points: Vec<Vec<f64>>) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::BadParameters(format!("grid spacing must be positive, got {h}")));
        }
        for p in &points {
            metric.check(p)?;
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parse("non-finite coordinate".into()));
            }
        }
        let min_nodes = Self::min_nodes(metric.dim);
        if points.len() < min_nodes {
            return Err(Error::InsufficientSamples {
                found: points.len(),
                required: min_nodes,
            });
        }
        Ok(Self {
            metric,
            s0,
            h,
            points,
            provenance: String::new(),
            certificate: None,
        })
    }

    /// Smallest grid that carries derivative stencils up to order `n`.
    pub fn min_nodes(dim: usize) -> usize {
        2 * (dim + 2)
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.metric.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn s(&self, j: usize) -> f64 {
        self.s0 + j as f64 * self.h
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.s(j)).collect()
    }

    /// Arc length of the grid, `(N - 1) h`.
    pub fn length(&self) -> f64 {
        (self.len() - 1) as f64 * self.h
    }

    /// Largest deviation of the discrete speed from 1 on interior nodes.
    ///
    /// Velocity is the Richardson combination `(16 D_1 - D_2) / 15` of the
    /// fourth-order stencils with strides 1 and 2, which is sixth order, so
    /// coarse grids of exact samples are not flagged by truncation error.
    /// Grids too short for the stride-2 stencil use stride 1 alone.
    pub fn speed_defect(&self) -> f64 {
        let d1 = Differentiator::new(self.h, 1).derivative_vec(&self.points);
        let d2 = Differentiator::new(self.h, 2).derivative_vec(&self.points);
        let combined: Vec<Vec<f64>> = d1
            .iter()
            .zip(&d2)
            .filter(|(_, b)| b[0].is_finite())
            .map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (16.0 * x - y) / 15.0).collect())
            .collect();
        let vel = if combined.is_empty() { d1 } else { combined };
        vel.iter()
            .filter(|v| v[0].is_finite())
            .map(|v| (self.metric.norm(v) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Resamples onto a uniform arc-length grid, treating the stored grid as
    /// an arbitrary (not necessarily unit-speed) parameter.
    pub fn reparameterize_unit_speed(&self, target_h: f64) -> Result<CurveSamples> {
        let t: Vec<f64> = self.grid();
        let splines: Vec<CubicSpline> = (0..self.dim())
            .map(|c| {
                let y: Vec<f64> = self.points.iter().map(|p| p[c]).collect();
                CubicSpline::new(&t, &y)
            })
            .collect();
        let pos = |x: f64| splines.iter().map(|s| s.eval(x)).collect::<Vec<_>>();
        let vel = |x: f64| splines.iter().map(|s| s.derivative(x)).collect::<Vec<_>>();
        let mut out = resample_by_arc_length(
            self.metric,
            &pos,
            &vel,
            (t[0], t[t.len() - 1]),
            target_h,
            Execution::default(),
        )?;
        let defect = out.speed_defect();
        if defect > TAU_SPEED_SAMPLED {
            return Err(Error::NotUnitSpeed { deviation: defect });
        }
        out.s0 = self.s0;
        out.provenance = self.provenance.clone();
        Ok(out)
    }

    /// Builds samples from an arbitrary increasing parameter column. A
    /// non-uniform column is resampled to a uniform one by cubic spline.
    pub fn from_parameterized(metric: Metric, s: &[f64], points: Vec<Vec<f64>>) -> Result<Self> {
        if s.len() != points.len() || s.len() < 2 {
            return Err(Error::Parse("parameter column and point rows differ in length".into()));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parse("parameter column must be strictly increasing".into()));
        }
        let n = s.len();
        let h = (s[n - 1] - s[0]) / (n - 1) as f64;
        let scale = s[0].abs().max(s[n - 1].abs()).max(1.0);
        let uniform = s
            .iter()
            .enumerate()
            .all(|(j, v)| (v - (s[0] + j as f64 * h)).abs() <= UNIFORM_GRID_TOL * scale);
        if uniform {
            return Self::new(metric, s[0], h, points);
        }
        let splines: Vec<CubicSpline> = (0..metric.dim)
            .map(|c| {
                let y: Vec<f64> = points.iter().map(|p| p[c]).collect();
                CubicSpline::new(s, &y)
            })
            .collect();
        let resampled = (0..n)
            .map(|j| {
                let x = s[0] + j as f64 * h;
                splines.iter().map(|sp| sp.eval(x)).collect()
            })
            .collect();
        Self::new(metric, s[0], h, resampled)
    }
}

type PointFn = dyn Fn(f64) -> Vec<f64> + Send + Sync;
type DerivFn = dyn Fn(f64, usize) -> Vec<f64> + Send + Sync;

/// A closed-form curve `t -> alpha(t)` on a declared interval.
#[derive(Clone)]
pub struct AnalyticCurve {
    pub metric: Metric,
    pub interval: (f64, f64),
    eval: Arc<PointFn>,
    derivative: Option<Arc<DerivFn>>,
    pub name: String,
}

impl fmt::Debug for AnalyticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticCurve")
            .field("metric", &self.metric)
            .field("interval", &self.interval)
            .field("name", &self.name)
            .field("has_derivatives", &self.derivative.is_some())
            .finish()
    }
}

const ANALYTIC_FD_STEP: f64 = 1e-3;

impl AnalyticCurve {
    pub fn new<F>(metric: Metric, interval: (f64, f64), eval: F) -> Self
    where
        F: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            metric,
            interval,
            eval: Arc::new(eval),
            derivative: None,
            name: String::from("analytic"),
        }
    }

    /// Attaches exact derivatives: `derivative(t, k)` is the k-th derivative.
    pub fn with_derivatives<D>(mut self, derivative: D) -> Self
    where
        D: Fn(f64, usize) -> Vec<f64> + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.metric.dim
    }

    pub fn point(&self, t: f64) -> Vec<f64> {
        (self.eval)(t)
    }

    pub fn has_derivatives(&self) -> bool {
        self.derivative.is_some()
    }

    /// First derivative, exact when available, otherwise a fourth-order
    /// central difference of the evaluator.
    pub fn velocity(&self, t: f64) -> Vec<f64> {
        self.derivative_of_order(t, 1)
    }

    pub fn derivative_of_order(&self, t: f64, k: usize) -> Vec<f64> {
        if k == 0 {
            return self.point(t);
        }
        if let Some(d) = &self.derivative {
            return d(t, k);
        }
        (0..self.dim())
            .map(|c| {
                if k == 1 {
                    central_derivative(|x| (self.eval)(x)[c], t, ANALYTIC_FD_STEP)
                } else {
                    central_derivative(
                        |x| self.derivative_of_order(x, k - 1)[c],
                        t,
                        ANALYTIC_FD_STEP,
                    )
                }
            })
            .collect()
    }

    /// Samples the curve on its declared interval at uniform arc length.
    pub fn reparameterize_unit_speed(&self, target_h: f64) -> Result<CurveSamples> {
        self.reparameterize_on(self.interval, target_h)
    }

    pub fn reparameterize_on(&self, interval: (f64, f64), target_h: f64) -> Result<CurveSamples> {
        let pos = |t: f64| self.point(t);
        let vel = |t: f64| self.velocity(t);
        let mut out =
            resample_by_arc_length(self.metric, &pos, &vel, interval, target_h, Execution::default())?;
        let defect = out.speed_defect();
        if defect > TAU_SPEED_ANALYTIC {
            return Err(Error::NotUnitSpeed { deviation: defect });
        }
        out.provenance = self.name.clone();
        Ok(out)
    }
}

/// Core of both reparameterizations: tabulate arc length, invert it with a
/// monotone cubic guess polished by Newton steps, and evaluate positions.
fn resample_by_arc_length(
    metric: Metric,
    pos: &(dyn Fn(f64) -> Vec<f64> + Sync),
    vel: &(dyn Fn(f64) -> Vec<f64> + Sync),
    (t0, t1): (f64, f64),
    target_h: f64,
    execution: Execution,
) -> Result<CurveSamples> {
    if !(t1 > t0) || !(target_h > 0.0) {
        return Err(Error::BadParameters(format!(
            "need t1 > t0 and h > 0, got [{t0}, {t1}] with h = {target_h}"
        )));
    }
    let speed = |t: f64| -> f64 { metric.dot(&vel(t), &vel(t)).abs().sqrt() };

    // Table of cumulative arc length; also where regularity is enforced.
    let segments = (((t1 - t0) / target_h) as usize / 8).clamp(256, 1 << 16);
    let dt = (t1 - t0) / segments as f64;
    let knots: Vec<f64> = (0..=segments).map(|k| t0 + k as f64 * dt).collect();
    for &t in &knots {
        let v = vel(t);
        let q = metric.dot(&v, &v);
        if metric.is_lorentzian() && !(q < 0.0) {
            return Err(Error::NotTimelike { at: t, value: q });
        }
        let sp = q.abs().sqrt();
        if !(sp > REGULARITY_THRESHOLD) {
            return Err(Error::NotRegular { at: t, speed: sp });
        }
    }
    let pieces: Vec<f64> = execution.map(segments, |k| {
        adaptive_integral(&speed, knots[k], knots[k + 1], 1e-12)
    });
    let mut arc = Vec::with_capacity(segments + 1);
    arc.push(0.0);
    let mut acc = 0.0;
    for p in &pieces {
        acc += p;
        arc.push(acc);
    }
    let total = acc;
    let nodes = ((total / target_h).round() as usize).max(1) + 1;
    let h = total / (nodes - 1) as f64;
    let guess = MonotoneCubic::new(&arc, &knots);

    let points: Vec<Vec<f64>> = execution.map(nodes, |j| {
        let s = if j + 1 == nodes { total } else { j as f64 * h };
        let mut t = guess.eval(s).clamp(t0, t1);
        for _ in 0..8 {
            let k = (((t - t0) / dt) as usize).min(segments - 1);
            let here = arc[k] + gauss_legendre(&speed, knots[k], t);
            let step = (here - s) / speed(t);
            t = (t - step).clamp(t0, t1);
            if step.abs() <= 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        pos(t)
    });
    let mut out = CurveSamples::new(metric, 0.0, h, points)?;
    out.provenance = String::from("resampled");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_circle_is_reproduced() {
        let c = AnalyticCurve::new(Metric::euclidean(3), (0.0, 2.0 * PI), |t| {
            vec![t.cos(), t.sin(), 0.0]
        });
        let s = c.reparameterize_unit_speed(1e-3).unwrap();
        for (j, p) in s.points.iter().enumerate() {
            let t = s.s(j);
            let q = c.point(t);
            let err = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < TAU_SPEED_ANALYTIC, "node {j}: {err}");
        }
        assert!((s.length() - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn double_speed_circle_has_length_two_pi() {
        let c = AnalyticCurve::new(Metric::euclidean(3), (0.0, PI), |t| {
            vec![(2.0 * t).cos(), (2.0 * t).sin(), 0.0]
        });
        let s = c.reparameterize_unit_speed(1e-3).unwrap();
        assert!((s.length() - 2.0 * PI).abs() < 1e-9);
        assert!(s.speed_defect() < TAU_SPEED_ANALYTIC);
        // the resampled curve is the unit circle at arc length s
        let p = &s.points[1000];
        let t = s.s(1000);
        assert!((p[0] - t.cos()).abs() < 1e-9 && (p[1] - t.sin()).abs() < 1e-9);
    }

    #[test]
    fn lorentzian_timelike_unit_speed_accepted() {
        let c = AnalyticCurve::new(Metric::lorentzian(3), (0.0, 5.0), |t| {
            vec![2f64.sqrt() * t, t.cos(), t.sin()]
        });
        let v = c.velocity(1.3);
        let q = Metric::lorentzian(3).dot(&v, &v);
        assert!((q + 1.0).abs() < 1e-10);
        let s = c.reparameterize_unit_speed(1e-3).unwrap();
        assert!((s.length() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn spacelike_rejected_for_lorentzian() {
        let c = AnalyticCurve::new(Metric::lorentzian(3), (0.0, 1.0), |t| vec![0.0, t, 0.0]);
        assert!(matches!(
            c.reparameterize_unit_speed(1e-2),
            Err(Error::NotTimelike { .. })
        ));
    }

    #[test]
    fn singular_point_rejected() {
        let c = AnalyticCurve::new(Metric::euclidean(2), (-1.0, 1.0), |t| vec![t * t * t, t * t]);
        assert!(matches!(
            c.reparameterize_unit_speed(1e-2),
            Err(Error::NotRegular { .. })
        ));
    }

    #[test]
    fn too_few_nodes_rejected() {
        let pts = vec![vec![0.0, 0.0, 0.0]; 9];
        assert!(matches!(
            CurveSamples::new(Metric::euclidean(3), 0.0, 0.1, pts),
            Err(Error::InsufficientSamples { found: 9, required: 10 })
        ));
    }

    #[test]
    fn sampled_reparameterization_is_idempotent() {
        let c = AnalyticCurve::new(Metric::euclidean(3), (0.0, 6.0), |t| {
            vec![t.cos(), t.sin(), 0.5 * t * t]
        });
        let once = c.reparameterize_unit_speed(1e-2).unwrap();
        let twice = once.reparameterize_unit_speed(1e-2).unwrap();
        assert_eq!(once.len(), twice.len());
        let err = once
            .points
            .iter()
            .zip(&twice.points)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        assert!(err < 10.0 * TAU_SPEED_ANALYTIC, "{err}");
    }

    #[test]
    fn arc_length_matches_quadrature() {
        // parabola: length has a closed form
        let c = AnalyticCurve::new(Metric::euclidean(2), (0.0, 2.0), |t| vec![t, t * t]);
        let s = c.reparameterize_unit_speed(1e-3).unwrap();
        let exact = {
            let f = |x: f64| 0.25 * (2.0 * x * (1.0 + 4.0 * x * x).sqrt() + (2.0 * x + (1.0 + 4.0 * x * x).sqrt()).ln());
            f(2.0) - f(0.0)
        };
        assert!(((s.length() - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn nonuniform_column_is_resampled() {
        let s: Vec<f64> = (0..40).map(|j| (j as f64 * 0.1).powf(1.1)).collect();
        let pts: Vec<Vec<f64>> = s.iter().map(|x| vec![x.cos(), x.sin()]).collect();
        let c = CurveSamples::from_parameterized(Metric::euclidean(2), &s, pts).unwrap();
        let h = (s[39] - s[0]) / 39.0;
        assert!((c.h - h).abs() < 1e-15);
        let p = &c.points[20];
        let x = c.s(20);
        assert!((p[0] - x.cos()).abs() < 1e-4);
    }
}

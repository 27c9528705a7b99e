//! Certified inputs: helices with known axis and angle, curves with
//! prescribed curvatures, and controlled non-helix perturbations.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::{AnalyticCurve, Certificate, CurveSamples, REGULARITY_THRESHOLD};
use crate::diff::Differentiator;
use crate::error::{Error, Result};
use crate::frenet::FrenetData;
use crate::interp::CubicSpline;
use crate::metric::Metric;

/// Default parameter interval of the closed-form generators.
pub const DEFAULT_INTERVAL: (f64, f64) = (0.0, 20.0);
/// Largest orthonormality loss tolerated within one integration step.
pub const TAU_DRIFT: f64 = 1e-6;
/// Tolerance on the constraints defining each closed-form family.
pub const TAU_PARAMETERS: f64 = 1e-12;
/// Tolerance on profile orthogonality and unit speed in `general_helix`.
pub const TAU_PROFILE: f64 = 1e-8;
/// Curvatures below this magnitude count as a zero crossing.
pub const TAU_PROFILE_ZERO: f64 = 1e-12;

/// Round-trip tolerance of `curve_from_curvatures` followed by frame
/// estimation: `max(1e-4, 100 h^2)`.
pub fn roundtrip_tolerance(h: f64) -> f64 {
    (100.0 * h * h).max(1e-4)
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadParameters(msg.into())
}

/// `alpha(s) = (a cos s, a sin s, b s)` with `a^2 + b^2 = 1`.
pub fn circular_helix_e3(a: f64, b: f64) -> Result<AnalyticCurve> {
    if !(a > 0.0) || b == 0.0 || !b.is_finite() {
        return Err(bad(format!("need a > 0 and b != 0, got a={a}, b={b}")));
    }
    if (a * a + b * b - 1.0).abs() > TAU_PARAMETERS {
        return Err(bad(format!("a^2 + b^2 must equal 1, got {}", a * a + b * b)));
    }
    let eval = move |s: f64| vec![a * s.cos(), a * s.sin(), b * s];
    let deriv = move |s: f64, k: usize| {
        let (sin, cos) = s.sin_cos();
        match k {
            0 => vec![a * cos, a * sin, b * s],
            1 => vec![-a * sin, a * cos, b],
            _ => {
                // rotation by k quarter turns
                let (x, y) = match k % 4 {
                    0 => (cos, sin),
                    1 => (-sin, cos),
                    2 => (-cos, -sin),
                    _ => (sin, -cos),
                };
                vec![a * x, a * y, 0.0]
            }
        }
    };
    Ok(AnalyticCurve::new(Metric::euclidean(3), DEFAULT_INTERVAL, eval)
        .with_derivatives(deriv)
        .named(format!("circular_helix_e3(a={a}, b={b})")))
}

/// Certificate of `circular_helix_e3(a, b)`.
pub fn circular_helix_certificate(a: f64, b: f64) -> Certificate {
    let theta = b.abs().acos();
    Certificate {
        generator: "circular_helix_e3".into(),
        expected_c: Some((a / b).powi(2)),
        theta: Some(theta),
        axis: Some(vec![0.0, 0.0, 1.0]),
        is_helix: Some(true),
    }
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `u`,
/// built from the coordinate vectors least aligned with `u`.
fn complement_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    let drop = (0..n)
        .max_by(|&i, &j| u[i].abs().total_cmp(&u[j].abs()))
        .unwrap();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for c in (0..n).filter(|&c| c != drop) {
        let mut w = vec![0.0; n];
        w[c] = 1.0;
        for _ in 0..2 {
            for b in basis.iter().chain(std::iter::once(&u.to_vec())) {
                let p: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        basis.push(w.into_iter().map(|x| x / norm).collect());
    }
    basis
}

/// `alpha(s) = s cos(theta) U + sin(theta) gamma(s)` for a unit-speed
/// profile `gamma` orthogonal to `U`.
///
/// The profile is either an `n`-dimensional curve whose velocity is
/// orthogonal to `U`, or an `(n-1)`-dimensional curve embedded in the
/// hyperplane `U^perp` (coordinates of `U^perp` follow the coordinate
/// axes when `U` is one of them).
pub fn general_helix(axis: &[f64], theta: f64, profile: &AnalyticCurve) -> Result<AnalyticCurve> {
    let n = axis.len();
    if n < 3 {
        return Err(bad(format!("general helix needs n >= 3, got {n}")));
    }
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(bad(format!("theta must lie in (0, pi/2), got {theta}")));
    }
    let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > TAU_PARAMETERS {
        return Err(bad(format!("axis must be a unit vector, |U| = {norm}")));
    }
    if profile.metric.is_lorentzian() {
        return Err(bad("profile must be Euclidean"));
    }
    let embed: Option<Vec<Vec<f64>>> = match profile.dim() {
        d if d == n => None,
        d if d + 1 == n => Some(complement_basis(axis)),
        d => {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: d,
            })
        }
    };
    let lift = {
        let embed = embed.clone();
        move |p: Vec<f64>| -> Vec<f64> {
            match &embed {
                None => p,
                Some(basis) => {
                    let mut out = vec![0.0; n];
                    for (pk, b) in p.iter().zip(basis) {
                        out.iter_mut().zip(b).for_each(|(o, v)| *o += pk * v);
                    }
                    out
                }
            }
        }
    };

    let (t0, t1) = profile.interval;
    let mut ortho: f64 = 0.0;
    let mut speed: f64 = 0.0;
    for j in 0..=256 {
        let t = t0 + (t1 - t0) * j as f64 / 256.0;
        let v = lift(profile.velocity(t));
        ortho = ortho.max(v.iter().zip(axis).map(|(x, y)| x * y).sum::<f64>().abs());
        speed = speed.max((v.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs());
    }
    if ortho > TAU_PROFILE {
        return Err(Error::ProfileNotOrthogonal { deviation: ortho });
    }
    if speed > TAU_PROFILE {
        return Err(Error::ProfileNotUnitSpeed { deviation: speed });
    }

    let (st, ct) = theta.sin_cos();
    let u = axis.to_vec();
    let gamma = profile.clone();
    let lift = Arc::new(lift);
    let (u_eval, g_eval, l_eval) = (u.clone(), gamma.clone(), lift.clone());
    let eval = move |s: f64| {
        let g = l_eval(g_eval.point(s));
        (0..n).map(|k| s * ct * u_eval[k] + st * g[k]).collect()
    };
    let deriv = move |s: f64, k: usize| {
        let g = lift(gamma.derivative_of_order(s, k));
        (0..n)
            .map(|c| {
                let base = match k {
                    0 => s * ct * u[c],
                    1 => ct * u[c],
                    _ => 0.0,
                };
                base + st * g[c]
            })
            .collect()
    };
    let curve = AnalyticCurve::new(Metric::euclidean(n), profile.interval, eval)
        .named(format!("general_helix(theta={theta}, profile={})", profile.name));
    Ok(if profile.has_derivatives() {
        curve.with_derivatives(deriv)
    } else {
        curve
    })
}

/// `alpha(s) = (c s, a cos(omega s), a sin(omega s))` in Minkowski 3-space,
/// unit-speed timelike when `c^2 - a^2 omega^2 = 1`.
pub fn timelike_helix_l3(c: f64, a: f64, omega: f64) -> Result<AnalyticCurve> {
    if a == 0.0 || omega == 0.0 || !(a.is_finite() && omega.is_finite() && c.is_finite()) {
        return Err(bad(format!("need a != 0 and omega != 0, got a={a}, omega={omega}")));
    }
    let q = c * c - a * a * omega * omega;
    if (q - 1.0).abs() > TAU_PARAMETERS {
        return Err(bad(format!("c^2 - a^2 omega^2 must equal 1, got {q}")));
    }
    let eval = move |s: f64| {
        let (sin, cos) = (omega * s).sin_cos();
        vec![c * s, a * cos, a * sin]
    };
    let deriv = move |s: f64, k: usize| {
        let (sin, cos) = (omega * s).sin_cos();
        let w = omega.powi(k as i32);
        let (x, y) = match k % 4 {
            0 => (cos, sin),
            1 => (-sin, cos),
            2 => (-cos, -sin),
            _ => (sin, -cos),
        };
        let t = match k {
            0 => c * s,
            1 => c,
            _ => 0.0,
        };
        vec![t, a * w * x, a * w * y]
    };
    Ok(AnalyticCurve::new(Metric::lorentzian(3), DEFAULT_INTERVAL, eval)
        .with_derivatives(deriv)
        .named(format!("timelike_helix_l3(c={c}, a={a}, omega={omega})")))
}

/// Certificate of `timelike_helix_l3(c, a, omega)`: `G_3 = a omega / c`.
pub fn timelike_helix_certificate(c: f64, a: f64, omega: f64) -> Certificate {
    Certificate {
        generator: "timelike_helix_l3".into(),
        expected_c: Some((a * omega / c).powi(2)),
        theta: None,
        axis: Some(vec![1.0, 0.0, 0.0]),
        is_helix: Some(true),
    }
}

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Clone)]
enum Source {
    Analytic(Vec<Arc<ScalarFn>>),
    Sampled(Vec<CubicSpline>),
}

/// Prescribed curvatures `k_1..k_{n-1}`, as closed forms or samples.
#[derive(Clone)]
pub struct CurvatureProfile {
    pub metric: Metric,
    source: Source,
    pub name: String,
}

impl fmt::Debug for CurvatureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurvatureProfile")
            .field("metric", &self.metric)
            .field("name", &self.name)
            .finish()
    }
}

impl CurvatureProfile {
    pub fn analytic(metric: Metric, kappas: Vec<Arc<ScalarFn>>) -> Result<Self> {
        if kappas.len() + 1 != metric.dim {
            return Err(Error::DimensionMismatch {
                expected: metric.dim - 1,
                found: kappas.len(),
            });
        }
        Ok(Self {
            metric,
            source: Source::Analytic(kappas),
            name: "analytic".into(),
        })
    }

    /// All curvatures constant (a W-curve).
    pub fn constant(metric: Metric, kappas: &[f64]) -> Result<Self> {
        let fs: Vec<Arc<ScalarFn>> = kappas
            .iter()
            .map(|&k| Arc::new(move |_: f64| k) as Arc<ScalarFn>)
            .collect();
        Ok(Self::analytic(metric, fs)?.named(format!("constant{kappas:?}")))
    }

    /// Curvatures sampled on `s_j = s0 + j h`, interpolated by cubic spline.
    pub fn sampled(metric: Metric, s0: f64, h: f64, values: &[Vec<f64>]) -> Result<Self> {
        if values.len() + 1 != metric.dim {
            return Err(Error::DimensionMismatch {
                expected: metric.dim - 1,
                found: values.len(),
            });
        }
        if !(h > 0.0) || values.iter().any(|v| v.len() < 4 || v.len() != values[0].len()) {
            return Err(bad("sampled curvatures need h > 0 and at least 4 equal-length rows"));
        }
        let grid: Vec<f64> = (0..values[0].len()).map(|j| s0 + j as f64 * h).collect();
        Ok(Self {
            metric,
            source: Source::Sampled(values.iter().map(|v| CubicSpline::new(&grid, v)).collect()),
            name: "sampled".into(),
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.metric.dim
    }

    /// `k_i(s)`, 1-based `i`.
    pub fn kappa(&self, i: usize, s: f64) -> f64 {
        match &self.source {
            Source::Analytic(fs) => fs[i - 1](s),
            Source::Sampled(sp) => sp[i - 1].eval(s),
        }
    }

    fn kappas(&self, s: f64) -> Vec<f64> {
        (1..self.dim()).map(|i| self.kappa(i, s)).collect()
    }
}

/// Position and frame of the integrated Frenet system.
#[derive(Clone)]
struct State {
    x: Vec<f64>,
    v: Vec<Vec<f64>>,
}

impl State {
    fn axpy(&self, w: f64, d: &State) -> State {
        let x = self.x.iter().zip(&d.x).map(|(a, b)| a + w * b).collect();
        let v = self
            .v
            .iter()
            .zip(&d.v)
            .map(|(r, dr)| r.iter().zip(dr).map(|(a, b)| a + w * b).collect())
            .collect();
        State { x, v }
    }
}

fn rhs(metric: &Metric, k: &[f64], st: &State) -> State {
    let n = metric.dim;
    let mut dv = vec![vec![0.0; n]; n];
    for i in 0..n - 1 {
        let up = k[i];
        let down = -k[i] * metric.sign(i) * metric.sign(i + 1);
        for c in 0..n {
            dv[i][c] += up * st.v[i + 1][c];
            dv[i + 1][c] += down * st.v[i][c];
        }
    }
    State {
        x: st.v[0].clone(),
        v: dv,
    }
}

fn frame_defect(metric: &Metric, v: &[Vec<f64>]) -> f64 {
    let n = v.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let target = if i == j { metric.sign(i) } else { 0.0 };
            worst = worst.max((metric.dot(&v[i], &v[j]) - target).abs());
        }
    }
    worst
}

/// Metric Gram–Schmidt in frame order.
fn reorthonormalize(metric: &Metric, v: &mut [Vec<f64>]) {
    for i in 0..v.len() {
        for j in 0..i {
            let c = metric.dot(&v[i], &v[j]) * metric.sign(j);
            let vj = v[j].clone();
            v[i].iter_mut().zip(&vj).for_each(|(a, b)| *a -= c * b);
        }
        let norm = metric.norm(&v[i]);
        v[i].iter_mut().for_each(|a| *a /= norm);
    }
}

/// Curve, frames and exact curvatures on a uniform grid.
#[derive(Debug, Clone)]
pub struct IntegratedCurve {
    pub samples: CurveSamples,
    /// `frames[i][node]`.
    pub frames: Vec<Vec<Vec<f64>>>,
    /// Prescribed `k_i` at the nodes, `[i][node]`.
    pub curvatures: Vec<Vec<f64>>,
    /// Largest per-step orthonormality loss before correction.
    pub max_drift: f64,
}

impl IntegratedCurve {
    /// Frame data from the integrated frames and the prescribed curvatures,
    /// bypassing numerical differentiation of the curve.
    pub fn frenet_data(&self, differentiator: Differentiator) -> Result<FrenetData> {
        FrenetData::from_parts(
            self.samples.metric,
            self.samples.h,
            self.samples.grid(),
            self.frames.clone(),
            self.curvatures.clone(),
            differentiator,
        )
    }
}

/// Integrates `alpha' = V_1`, `V' = M(s) V` with classical RK4 at step `h`,
/// restoring metric orthonormality after every step.
pub fn integrate_frenet(
    profile: &CurvatureProfile,
    interval: (f64, f64),
    h: f64,
    initial_frame: Option<Vec<Vec<f64>>>,
) -> Result<IntegratedCurve> {
    let metric = profile.metric;
    let n = metric.dim;
    let (a, b) = interval;
    if !(h > 0.0 && b > a && h.is_finite() && a.is_finite() && b.is_finite()) {
        return Err(bad(format!("need h > 0 and a nonempty interval, got h={h}, [{a}, {b}]")));
    }
    let frame = match initial_frame {
        Some(f) => {
            if f.len() != n || f.iter().any(|r| r.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: f.len(),
                });
            }
            let d = frame_defect(&metric, &f);
            if d > 1e-10 {
                return Err(bad(format!("initial frame is not orthonormal (defect {d:e})")));
            }
            f
        }
        None => (0..n)
            .map(|i| (0..n).map(|c| if c == i { 1.0 } else { 0.0 }).collect())
            .collect(),
    };
    let steps = ((b - a) / h).round() as usize;
    let signs: Vec<f64> = profile.kappas(a).iter().map(|k| k.signum()).collect();
    let check = |s: f64| -> Result<Vec<f64>> {
        let k = profile.kappas(s);
        for (i, (v, sg)) in k.iter().zip(&signs).enumerate() {
            if !(v.abs() > TAU_PROFILE_ZERO) || v.signum() != *sg {
                return Err(Error::BadProfile { index: i + 1, at: s });
            }
        }
        Ok(k)
    };

    let mut st = State {
        x: vec![0.0; n],
        v: frame,
    };
    let mut points = Vec::with_capacity(steps + 1);
    let mut frames = vec![Vec::with_capacity(steps + 1); n];
    let mut curvatures = vec![Vec::with_capacity(steps + 1); n - 1];
    let mut max_drift: f64 = 0.0;
    let mut k0 = check(a)?;
    for j in 0..=steps {
        let s = a + j as f64 * h;
        points.push(st.x.clone());
        for i in 0..n {
            frames[i].push(st.v[i].clone());
        }
        for i in 0..n - 1 {
            curvatures[i].push(k0[i]);
        }
        if j == steps {
            break;
        }
        let km = check(s + 0.5 * h)?;
        let k1 = check(s + h)?;
        let d1 = rhs(&metric, &k0, &st);
        let d2 = rhs(&metric, &km, &st.axpy(0.5 * h, &d1));
        let d3 = rhs(&metric, &km, &st.axpy(0.5 * h, &d2));
        let d4 = rhs(&metric, &k1, &st.axpy(h, &d3));
        st = st
            .axpy(h / 6.0, &d1)
            .axpy(h / 3.0, &d2)
            .axpy(h / 3.0, &d3)
            .axpy(h / 6.0, &d4);
        let drift = frame_defect(&metric, &st.v);
        if drift > TAU_DRIFT {
            return Err(Error::FrameDriftExceeded {
                at: s + h,
                defect: drift,
            });
        }
        max_drift = max_drift.max(drift);
        reorthonormalize(&metric, &mut st.v);
        k0 = k1;
    }
    let samples = CurveSamples::new(metric, a, h, points)?
        .with_provenance(format!("curve_from_curvatures({})", profile.name));
    Ok(IntegratedCurve {
        samples,
        frames,
        curvatures,
        max_drift,
    })
}

/// Curve with prescribed curvatures (fundamental theorem of curves).
pub fn curve_from_curvatures(
    profile: &CurvatureProfile,
    interval: (f64, f64),
    h: f64,
    initial_frame: Option<Vec<Vec<f64>>>,
) -> Result<CurveSamples> {
    integrate_frenet(profile, interval, h, initial_frame).map(|c| c.samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbMode {
    /// A single smooth bump.
    Bump,
    /// Three oscillations under the same envelope.
    Sinusoid,
}

/// Smooth bump `exp(1 - 1/(1 - x^2))` on `(-1, 1)`, peak 1.
fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

/// Adds `amplitude * profile(s) * N(s)` on the middle third of the curve,
/// with `N` the principal normal (or, on nearly straight curves, a fixed
/// direction with the tangent removed), then restores unit speed.
///
/// Fails with `NotRegular` when the tangential component of the perturbed
/// velocity reaches zero, i.e. the displacement folds the curve back.
pub fn perturb_curve(curve: &CurveSamples, amplitude: f64, mode: PerturbMode) -> Result<CurveSamples> {
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return Err(bad(format!("amplitude must be non-negative, got {amplitude}")));
    }
    if amplitude == 0.0 {
        return Ok(curve.clone());
    }
    let metric = curve.metric;
    let n = curve.dim();
    let len = curve.len();
    let (lo, hi) = (len / 3, 2 * len / 3);
    if hi <= lo + 8 {
        return Err(Error::InsufficientSamples {
            found: len,
            required: 30,
        });
    }
    let d = Differentiator::new(curve.h, 1);
    let vel = d.derivative_vec(&curve.points);
    let acc = d.derivative_vec(&vel);
    let unit = |v: &[f64]| -> Vec<f64> {
        let norm = metric.norm(v);
        v.iter().map(|x| x / norm).collect()
    };
    let reject = |w: &[f64], t: &[f64]| -> Vec<f64> {
        let c = metric.dot(w, t) / metric.dot(t, t);
        w.iter().zip(t).map(|(a, b)| a - c * b).collect()
    };
    let curved = (lo..=hi).all(|j| metric.norm(&acc[j]) > 1e-6);
    let fixed = {
        // coordinate direction least aligned with the mid tangent
        let t = &vel[(lo + hi) / 2];
        let first = usize::from(metric.is_lorentzian());
        let c = (first..n)
            .min_by(|&i, &j| t[i].abs().total_cmp(&t[j].abs()))
            .unwrap();
        let mut e = vec![0.0; n];
        e[c] = 1.0;
        e
    };
    let width = (hi - lo) as f64;
    let envelope = |j: usize| -> f64 {
        let x = 2.0 * (j - lo) as f64 / width - 1.0;
        match mode {
            PerturbMode::Bump => bump(x),
            PerturbMode::Sinusoid => bump(x) * (3.0 * std::f64::consts::PI * (x + 1.0)).sin(),
        }
    };
    let mut points = curve.points.clone();
    for j in lo..=hi {
        let nrm = if curved {
            unit(&reject(&acc[j], &vel[j]))
        } else {
            unit(&reject(&fixed, &vel[j]))
        };
        let w = amplitude * envelope(j);
        for c in 0..n {
            points[j][c] += w * nrm[c];
        }
    }
    let new_vel = d.derivative_vec(&points);
    for j in lo..=hi {
        let t = unit(&vel[j]);
        let tangential = metric.dot(&new_vel[j], &t) * metric.sign(0);
        if tangential.is_finite() && tangential <= REGULARITY_THRESHOLD {
            return Err(Error::NotRegular {
                at: curve.s(j),
                speed: tangential,
            });
        }
    }
    let moved = CurveSamples::new(metric, curve.s0, curve.h, points)?;
    let mut out = moved.reparameterize_unit_speed(curve.h)?;
    let mode_name = match mode {
        PerturbMode::Bump => "bump",
        PerturbMode::Sinusoid => "sinusoid",
    };
    out.provenance = format!("perturb_curve({}, {mode_name}, {amplitude})", curve.provenance);
    out.certificate = Some(Certificate {
        generator: "perturb_curve".into(),
        is_helix: Some(false),
        ..Certificate::default()
    });
    Ok(out)
}

/// `sum amp * cos(freq s + phase)`, differentiated and integrated termwise.
#[derive(Debug, Clone)]
struct TrigSeries(Vec<(f64, f64, f64)>);

impl TrigSeries {
    /// k-th derivative; `k = 0` is the series itself.
    fn derivative(&self, s: f64, k: usize) -> f64 {
        self.0
            .iter()
            .map(|&(a, w, ph)| {
                if w == 0.0 {
                    if k == 0 {
                        a * ph.cos()
                    } else {
                        0.0
                    }
                } else {
                    a * w.powi(k as i32) * (w * s + ph + k as f64 * FRAC_PI_2).cos()
                }
            })
            .sum()
    }

    /// Antiderivative vanishing at `s = 0` up to a constant.
    fn integral(&self, s: f64) -> f64 {
        self.0
            .iter()
            .map(|&(a, w, ph)| {
                if w == 0.0 {
                    a * ph.cos() * s
                } else {
                    a / w * (w * s + ph - FRAC_PI_2).cos()
                }
            })
            .sum()
    }
}

/// Unit-speed curve in `E^3` whose tangent is the spherical spiral with
/// polar angle `phi0 + rate s` and azimuth `w s`.
///
/// Helices in `E^4` built on a profile by [`general_helix`] have a
/// nonvanishing third curvature only where the curvature of the profile's
/// tangent indicatrix is strictly monotone. Circular helices and other
/// periodic profiles fail this; the spiral satisfies it while the polar
/// angle stays inside `(0, pi/2)`.
pub fn spiral_tangent_curve_e3(phi0: f64, rate: f64, w: f64) -> Result<AnalyticCurve> {
    let ok = rate != 0.0 && w != 0.0 && (rate - w).abs() > 1e-9 && (rate + w).abs() > 1e-9;
    if !ok || !phi0.is_finite() {
        return Err(bad(format!(
            "need nonzero rate, w, rate - w and rate + w; got rate={rate}, w={w}"
        )));
    }
    let q = -FRAC_PI_2;
    let tangent = [
        TrigSeries(vec![(0.5, rate + w, phi0 + q), (0.5, rate - w, phi0 + q)]),
        TrigSeries(vec![(0.5, rate - w, phi0), (-0.5, rate + w, phi0)]),
        TrigSeries(vec![(1.0, rate, phi0)]),
    ];
    let deriv = move |s: f64, k: usize| -> Vec<f64> {
        tangent
            .iter()
            .map(|t| if k == 0 { t.integral(s) } else { t.derivative(s, k - 1) })
            .collect()
    };
    let eval = {
        let deriv = deriv.clone();
        move |s: f64| deriv(s, 0)
    };
    Ok(AnalyticCurve::new(Metric::euclidean(3), DEFAULT_INTERVAL, eval)
        .with_derivatives(deriv)
        .named(format!("spiral_tangent_curve_e3(phi0={phi0}, rate={rate}, w={w})")))
}

/// Unit-speed circle of the given radius in the plane.
pub fn circle_e2(radius: f64) -> Result<AnalyticCurve> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(bad(format!("radius must be positive, got {radius}")));
    }
    let w = 1.0 / radius;
    let deriv = move |s: f64, k: usize| -> Vec<f64> {
        let ph = k as f64 * FRAC_PI_2;
        let f = radius * w.powi(k as i32);
        vec![f * (w * s + ph).cos(), f * (w * s + ph).sin()]
    };
    let eval = move |s: f64| deriv(s, 0);
    Ok(AnalyticCurve::new(Metric::euclidean(2), DEFAULT_INTERVAL, eval)
        .with_derivatives(deriv)
        .named(format!("circle_e2(radius={radius})")))
}

/// Unit-speed curve on a flat torus in `E^4`,
/// `(r1 cos(w1 s), r1 sin(w1 s), r2 cos(w2 s), r2 sin(w2 s))` with
/// `r2` fixed by unit speed.
pub fn torus_curve_e4(r1: f64, w1: f64, w2: f64) -> Result<AnalyticCurve> {
    let rest = 1.0 - r1 * r1 * w1 * w1;
    if !(r1 > 0.0) || w1 == 0.0 || w2 == 0.0 || !(rest > 0.0) || (w1.abs() - w2.abs()).abs() < 1e-9 {
        return Err(bad(format!(
            "need r1 > 0, r1 |w1| < 1 and distinct nonzero |w1|, |w2|, got r1={r1}, w1={w1}, w2={w2}"
        )));
    }
    let r2 = rest.sqrt() / w2.abs();
    let deriv = move |s: f64, k: usize| -> Vec<f64> {
        let ph = k as f64 * FRAC_PI_2;
        let (f1, f2) = (r1 * w1.powi(k as i32), r2 * w2.powi(k as i32));
        vec![
            f1 * (w1 * s + ph).cos(),
            f1 * (w1 * s + ph).sin(),
            f2 * (w2 * s + ph).cos(),
            f2 * (w2 * s + ph).sin(),
        ]
    };
    let eval = move |s: f64| deriv(s, 0);
    Ok(AnalyticCurve::new(Metric::euclidean(4), DEFAULT_INTERVAL, eval)
        .with_derivatives(deriv)
        .named(format!("torus_curve_e4(r1={r1}, w1={w1}, w2={w2})")))
}

/// A generated curve with its expected verdict.
#[derive(Debug, Clone)]
pub struct BatteryCurve {
    pub name: String,
    pub samples: CurveSamples,
    pub is_helix: bool,
}

fn certified(curve: &AnalyticCurve, h: f64, certificate: Certificate) -> Result<CurveSamples> {
    let mut samples = curve.reparameterize_unit_speed(h)?;
    samples.certificate = Some(certificate);
    Ok(samples)
}

/// Certificate of a [`general_helix`] output: `C = tan^2(theta)`.
pub fn general_helix_certificate(axis: &[f64], theta: f64) -> Certificate {
    Certificate {
        generator: "general_helix".into(),
        expected_c: Some(theta.tan().powi(2)),
        theta: Some(theta),
        axis: Some(axis.to_vec()),
        is_helix: Some(true),
    }
}

/// Six reference helices: two in `E^3`, two in `E^4`, one in `E^5` and
/// one timelike helix in Minkowski 3-space, each on `[0, 20]`.
pub fn reference_helices(h: f64) -> Result<Vec<BatteryCurve>> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let e4 = [0.0, 0.0, 0.0, 1.0];
    let diag4 = [0.5, 0.5, 0.5, 0.5];
    let e5 = [0.0, 0.0, 0.0, 0.0, 1.0];
    let t4 = 0.8_f64.acos();
    let t4b = std::f64::consts::FRAC_PI_3;
    let t5 = 0.6_f64.acos();
    let c = std::f64::consts::SQRT_2;
    let out = vec![
        BatteryCurve {
            name: "e3_helix_0.6_0.8".into(),
            samples: certified(&circular_helix_e3(0.6, 0.8)?, h, circular_helix_certificate(0.6, 0.8))?,
            is_helix: true,
        },
        BatteryCurve {
            name: "e3_helix_symmetric".into(),
            samples: certified(&circular_helix_e3(r, r)?, h, circular_helix_certificate(r, r))?,
            is_helix: true,
        },
        BatteryCurve {
            name: "e4_general_helix_axis_e4".into(),
            samples: certified(
                &general_helix(&e4, t4, &spiral_tangent_curve_e3(0.4, 0.04, 1.0)?)?,
                h,
                general_helix_certificate(&e4, t4),
            )?,
            is_helix: true,
        },
        BatteryCurve {
            name: "e4_general_helix_axis_diagonal".into(),
            samples: certified(
                &general_helix(&diag4, t4b, &spiral_tangent_curve_e3(0.3, 0.05, -0.8)?)?,
                h,
                general_helix_certificate(&diag4, t4b),
            )?,
            is_helix: true,
        },
        BatteryCurve {
            name: "e5_general_helix_torus_profile".into(),
            samples: certified(
                &general_helix(&e5, t5, &torus_curve_e4(0.6, 1.0, 0.5)?)?,
                h,
                general_helix_certificate(&e5, t5),
            )?,
            is_helix: true,
        },
        BatteryCurve {
            name: "l3_timelike_helix".into(),
            samples: certified(&timelike_helix_l3(c, 1.0, 1.0)?, h, timelike_helix_certificate(c, 1.0, 1.0))?,
            is_helix: true,
        },
    ];
    Ok(out)
}

/// The reference helices followed by one perturbation of each, alternating
/// bump and sinusoid modes at the given amplitude.
pub fn reference_battery(h: f64, amplitude: f64) -> Result<Vec<BatteryCurve>> {
    let helices = reference_helices(h)?;
    let mut perturbed = Vec::with_capacity(helices.len());
    for (k, c) in helices.iter().enumerate() {
        let mode = if k % 2 == 0 {
            PerturbMode::Bump
        } else {
            PerturbMode::Sinusoid
        };
        perturbed.push(BatteryCurve {
            name: format!("{}_perturbed_{}", c.name, if k % 2 == 0 { "bump" } else { "sinusoid" }),
            samples: perturb_curve(&c.samples, amplitude, mode)?,
            is_helix: false,
        });
    }
    Ok(helices.into_iter().chain(perturbed).collect())
}

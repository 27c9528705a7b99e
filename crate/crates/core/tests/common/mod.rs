#![allow(dead_code)]

use std::sync::Arc;

use ndhelix::diff::Differentiator;
use ndhelix::generators::{integrate_frenet, CurvatureProfile};
use ndhelix::{frenet_apparatus, AnalyticCurve, CurveSamples, FrenetData, FrenetOptions, Metric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const H: f64 = 1e-3;

pub fn sample(curve: &AnalyticCurve) -> CurveSamples {
    curve.reparameterize_unit_speed(H).expect("reparameterization")
}

pub fn frenet(curve: &CurveSamples) -> FrenetData {
    frenet_apparatus(curve, &FrenetOptions::default()).expect("frenet apparatus")
}

pub fn frenet_of(curve: &AnalyticCurve) -> FrenetData {
    frenet(&sample(curve))
}

/// Frame data with exact curvatures and RK4 frames, differentiated with a
/// short stride (no roundoff from differentiating the curve itself).
pub fn exact_frenet(profile: &CurvatureProfile, interval: (f64, f64), stride: usize) -> FrenetData {
    integrate_frenet(profile, interval, H, None)
        .expect("integration")
        .frenet_data(Differentiator::new(H, stride))
        .expect("frame data")
}

/// `k_i(s) = c_i + a_i sin(w_i s + p_i)` with `c_i > 2 |a_i|`.
pub fn random_profile(n: usize, seed: u64) -> CurvatureProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kappas = (1..n)
        .map(|_| {
            let c: f64 = rng.random_range(0.6..1.4);
            let a: f64 = rng.random_range(0.05..0.3) * c;
            let w: f64 = rng.random_range(0.3..1.2);
            let p: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            Arc::new(move |s: f64| c + a * (w * s + p).sin()) as Arc<dyn Fn(f64) -> f64 + Send + Sync>
        })
        .collect();
    CurvatureProfile::analytic(Metric::euclidean(n), kappas)
        .unwrap()
        .named(format!("random(n={n}, seed={seed})"))
}

pub fn finite(v: &[f64]) -> impl Iterator<Item = f64> + '_ {
    v.iter().copied().filter(|x| x.is_finite())
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .filter(|d| d.is_finite())
        .fold(0.0, f64::max)
}

mod common;

use common::*;
use ndhelix::curve::TAU_SPEED_ANALYTIC;
use ndhelix::frenet::{connection_matrices, max_frenet_residual, TAU_FRAME};
use ndhelix::generators::{circular_helix_e3, general_helix, spiral_tangent_curve_e3, timelike_helix_l3};
use ndhelix::helix::{a_coefficients, g_from_a_expansion, g_functions, helix_indicator};
use ndhelix::{frenet_apparatus, AnalyticCurve, Execution, FrenetData, FrenetOptions, Metric};
use proptest::prelude::*;

fn skew_defect(fd: &FrenetData) -> f64 {
    let n = fd.dim();
    let mut worst: f64 = 0.0;
    for m in connection_matrices(fd).iter().filter(|m| m[0][0].is_finite()) {
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((m[i][j] + fd.epsilon(i) * m[j][i] * fd.epsilon(j)).abs());
            }
        }
    }
    worst
}

#[test]
fn timelike_frame_is_orthonormal_and_skew() {
    let fd = frenet_of(&timelike_helix_l3(2_f64.sqrt(), 1.0, 1.0).unwrap());
    assert!(fd.orthonormality_defect() < TAU_FRAME);
    assert!(skew_defect(&fd) < 1e-6);
    assert!(max_frenet_residual(&fd) < 1e-6);
}

#[test]
fn e4_helix_frame_is_orthonormal_and_skew() {
    let c = general_helix(&[0.0, 0.0, 0.0, 1.0], 0.8_f64.acos(), &spiral_tangent_curve_e3(0.4, 0.04, 1.0).unwrap()).unwrap();
    let fd = frenet_of(&c);
    assert!(fd.orthonormality_defect() < TAU_FRAME);
    assert!(skew_defect(&fd) < 1e-6);
}

/// A bent, non-unit-speed space curve `(t, a t^2, b t^3)` on a short interval.
fn twisted_cubic(a: f64, b: f64) -> AnalyticCurve {
    AnalyticCurve::new(Metric::euclidean(3), (0.0, 2.0), move |t| vec![t, a * t * t, b * t * t * t])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn frames_are_orthonormal_and_connection_skew(a in 0.3..0.95f64) {
        let b = (1.0 - a * a).sqrt();
        let c = circular_helix_e3(a, b).unwrap().reparameterize_on((0.0, 6.0), H).unwrap();
        let fd = frenet(&c);
        prop_assert!(fd.orthonormality_defect() < TAU_FRAME);
        prop_assert!(skew_defect(&fd) < 1e-6);
    }

    #[test]
    fn execution_modes_are_bit_identical(a in 0.3..0.95f64) {
        let b = (1.0 - a * a).sqrt();
        let c = circular_helix_e3(a, b).unwrap().reparameterize_on((0.0, 6.0), H).unwrap();
        let seq = frenet_apparatus(&c, &FrenetOptions { execution: Execution::Sequential, ..Default::default() }).unwrap();
        let par = frenet_apparatus(&c, &FrenetOptions { execution: Execution::Parallel, ..Default::default() }).unwrap();
        let again = frenet_apparatus(&c, &FrenetOptions::default()).unwrap();
        prop_assert_eq!(&seq.curvatures, &par.curvatures);
        prop_assert_eq!(&seq.frames, &par.frames);
        prop_assert_eq!(&par.curvatures, &again.curvatures);
    }

    #[test]
    fn reparameterization_is_idempotent(a in 0.2..1.0f64, b in 0.1..0.6f64) {
        let once = twisted_cubic(a, b).reparameterize_unit_speed(1e-2).unwrap();
        let twice = once.reparameterize_unit_speed(1e-2).unwrap();
        prop_assert_eq!(once.len(), twice.len());
        let err = once.points.iter().zip(&twice.points)
            .flat_map(|(p, q)| p.iter().zip(q).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        prop_assert!(err < 10.0 * TAU_SPEED_ANALYTIC, "{err:e}");
    }

    #[test]
    fn arc_length_matches_fine_quadrature(a in 0.2..1.0f64, b in 0.1..0.6f64) {
        let c = twisted_cubic(a, b);
        let s = c.reparameterize_unit_speed(1e-3).unwrap();
        // Composite Simpson on 20000 panels as the reference.
        let speed = |t: f64| (1.0 + (2.0 * a * t).powi(2) + (3.0 * b * t * t).powi(2)).sqrt();
        let m = 20_000;
        let dt = 2.0 / m as f64;
        let simpson: f64 = (0..m).map(|k| {
            let t0 = k as f64 * dt;
            dt / 6.0 * (speed(t0) + 4.0 * speed(t0 + dt / 2.0) + speed(t0 + dt))
        }).sum();
        prop_assert!(((s.length() - simpson) / simpson).abs() < 1e-6);
    }

    #[test]
    fn expansion_and_recursion_agree(n in 3usize..=7, seed in 0u64..10_000) {
        let fd = exact_frenet(&random_profile(n, seed), (0.0, 6.0), 5);
        let g = g_functions(&fd).unwrap();
        let e = g_from_a_expansion(&a_coefficients(&fd).unwrap(), &fd);
        for j in 3..=n {
            let scale = finite(g.g(j)).map(f64::abs).fold(1.0, f64::max);
            prop_assert!(max_abs_diff(e.g(j), g.g(j)) / scale < 1e-6);
        }
    }

    #[test]
    fn n3_indicator_is_squared_curvature_ratio(seed in 0u64..10_000) {
        let fd = exact_frenet(&random_profile(3, seed), (0.0, 6.0), 5);
        let c = helix_indicator(&g_functions(&fd).unwrap());
        for t in 0..fd.len() {
            let r = fd.curvatures[0][t] / fd.curvatures[1][t];
            prop_assert!((c[t] - r * r).abs() < 1e-6);
        }
    }
}

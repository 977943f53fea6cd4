mod common;

use common::planar_space;
use ghcert_core::correspondence::wrap_once;
use ghcert_core::region::{geomcalc_check, point_set_distortion, region_f};
use ghcert_core::{Correspondence, FiniteMetricSpace, Metric, QPoint};
use proptest::prelude::*;
use std::f64::consts::PI;

fn covering(extra: &[(usize, usize)], nx: usize, ny: usize) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = extra.iter().map(|&(i, j)| (i % nx, j % ny)).collect();
    pairs.extend((0..nx).map(|i| (i, i % ny)));
    pairs.extend((0..ny).map(|j| (j % nx, j)));
    pairs
}

fn naive_distortion(x: &FiniteMetricSpace, y: &FiniteMetricSpace, pairs: &[(usize, usize)]) -> f64 {
    let mut worst = 0.0f64;
    for &(a, b) in pairs {
        for &(c, d) in pairs {
            worst = worst.max((x.dist(a, c) - y.dist(b, d)).abs());
        }
    }
    worst
}

fn q_point(lambda: f64) -> impl Strategy<Value = QPoint> {
    (-lambda / 2.0..=lambda / 2.0, -PI..=PI).prop_map(|(t, phi)| QPoint::new(t, phi))
}

proptest! {
    #[test]
    fn distortion_sees_diameters(
        x in planar_space(1, 6),
        y in planar_space(1, 6),
        extra in proptest::collection::vec((0usize..6, 0usize..6), 0..10),
    ) {
        let pairs = covering(&extra, x.len(), y.len());
        let r = Correspondence::new(pairs.clone(), x.len(), y.len()).unwrap();
        let d = r.distortion(&x, &y).unwrap();
        prop_assert_eq!(d, naive_distortion(&x, &y, &pairs));
        prop_assert!(d >= (x.diameter() - y.diameter()).abs() - 1e-12);
    }

    #[test]
    fn adding_pairs_never_lowers_distortion(
        x in planar_space(1, 6),
        y in planar_space(1, 6),
        base in proptest::collection::vec((0usize..6, 0usize..6), 0..6),
        more in proptest::collection::vec((0usize..6, 0usize..6), 1..6),
    ) {
        let (nx, ny) = (x.len(), y.len());
        let r = Correspondence::new(covering(&base, nx, ny), nx, ny).unwrap();
        let wider: Vec<(usize, usize)> = more.iter().map(|&(i, j)| (i % nx, j % ny)).collect();
        let s = r.extended(&wider).unwrap();
        prop_assert!(s.distortion(&x, &y).unwrap() >= r.distortion(&x, &y).unwrap());
    }

    #[test]
    fn region_f_is_symmetric(p in q_point(10.0), q in q_point(10.0)) {
        prop_assert_eq!(region_f(p, q), region_f(q, p));
    }

    #[test]
    fn geomcalc_decides_pairwise_max(
        lambda in 0.1f64..10.0,
        seed_points in proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..=60),
    ) {
        let points: Vec<QPoint> = seed_points
            .iter()
            .map(|&(s, u)| QPoint::new(lambda * (s - 0.5), PI * (2.0 * u - 1.0)))
            .collect();
        let mut max = 0.0f64;
        for p in &points {
            for q in &points {
                max = max.max(region_f(*p, *q));
            }
        }
        prop_assert_eq!(point_set_distortion(&points), max);
        prop_assert!(geomcalc_check(&points, max));
        prop_assert!(geomcalc_check(&points, max + 1e-9));
        if max > 0.0 {
            prop_assert!(!geomcalc_check(&points, max - 1e-9));
        }
    }
}

// Continuous distortion of t -> 2 pi t / lambda for lambda <= 2 pi.
fn wrap_once_limit(lambda: f64) -> f64 {
    (PI - lambda / 2.0).abs().max(lambda)
}

#[test]
fn wrap_once_converges() {
    for lambda in [0.3, 1.0, PI / 2.0, 2.0, 2.0 * PI / 3.0, 4.0, 6.0] {
        let limit = wrap_once_limit(lambda);
        let mut errors = Vec::new();
        for k in [45, 90, 180, 360] {
            let d = wrap_once(lambda, k + 1, 2 * k).unwrap().distortion();
            errors.push((d - limit).abs());
        }
        let scale = 2.0 * PI / 45.0 + lambda / 45.0;
        for (level, pair) in errors.windows(2).enumerate() {
            // Either the error has halved (up to a factor 3) or it is already
            // within the rounding bound of the finer grid.
            let bound = scale / 2f64.powi(level as i32 + 1);
            assert!(pair[1] <= 3.0 * pair[0] / 2.0 || pair[1] <= bound, "lambda {lambda}: {errors:?}");
        }
        assert!(errors[3] <= scale / 8.0, "lambda {lambda}: {errors:?}");
    }
}

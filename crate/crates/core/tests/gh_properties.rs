mod common;

use common::{dyadic_space, permuted, planar_space};
use ghcert_core::bounds::{best_bounds, involution_lower, BoundKind, BoundOptions};
use ghcert_core::exact::{exhaustive_gh, gh_exact, verify_optimum, SearchOptions};
use ghcert_core::model::{antipodal_map, circle_space, segment_space};
use ghcert_core::{FiniteMetricSpace, LipschitzWitness, Metric};
use proptest::prelude::*;
use std::f64::consts::PI;

fn exact(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    gh_exact(x, y, &SearchOptions::default()).unwrap().value
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bounds_sandwich_the_exact_value(x in planar_space(1, 7), y in planar_space(1, 7)) {
        let opts = BoundOptions { exact: Some(SearchOptions::default()), ..BoundOptions::default() };
        let records = best_bounds(&x, &y, &opts).unwrap();
        let value = exact(&x, &y);
        for r in &records {
            match r.kind {
                BoundKind::Lower => prop_assert!(r.value <= value + 1e-12, "{:?}", r),
                BoundKind::Upper => prop_assert!(r.value >= value - 1e-12, "{:?}", r),
                BoundKind::Exact => prop_assert!((r.value - value).abs() <= 1e-12, "{:?}", r),
            }
        }
    }

    #[test]
    fn bounds_scale(x in dyadic_space(1, 6), y in dyadic_space(1, 6)) {
        let opts = BoundOptions::default();
        let base = best_bounds(&x, &y, &opts).unwrap();
        let scaled = best_bounds(&x.scale(2.0).unwrap(), &y.scale(2.0).unwrap(), &opts).unwrap();
        prop_assert_eq!(base.len(), scaled.len());
        for (a, b) in base.iter().zip(&scaled) {
            prop_assert_eq!(a.source.tag(), b.source.tag());
            prop_assert!((b.value - 2.0 * a.value).abs() <= 1e-9 * (1.0 + b.value));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn search_matches_enumeration(
        (x, y) in (1usize..=4).prop_flat_map(|nx| (dyadic_space(nx, nx), dyadic_space(1, 16 / nx))),
    ) {
        let opts = SearchOptions { max_points: 16, ..SearchOptions::default() };
        let sol = gh_exact(&x, &y, &opts).unwrap();
        let (value, _) = exhaustive_gh(&x, &y).unwrap();
        prop_assert_eq!(sol.value, value);
        prop_assert!(verify_optimum(&x, &y, sol.value, sol.correspondence.pairs()));
    }

    #[test]
    fn exact_distance_is_a_metric(x in planar_space(1, 5), y in planar_space(1, 5), z in planar_space(1, 5)) {
        let xy = exact(&x, &y);
        prop_assert_eq!(xy, exact(&y, &x));
        prop_assert!(xy <= exact(&x, &z) + exact(&z, &y) + 1e-12);
    }

    #[test]
    fn relabeling_is_free((x, perm) in (1usize..=6).prop_flat_map(|n| (planar_space(n, n), permutation(n)))) {
        prop_assume!(x.len() == perm.len());
        prop_assert_eq!(exact(&x, &permuted(&x, &perm)), 0.0);
    }

    #[test]
    fn exact_distance_scales(x in dyadic_space(1, 5), y in dyadic_space(1, 5)) {
        let scaled = exact(&x.scale(2.0).unwrap(), &y.scale(2.0).unwrap());
        prop_assert_eq!(scaled, 2.0 * exact(&x, &y));
        let halved = exact(&x.scale(0.5).unwrap(), &y.scale(0.5).unwrap());
        prop_assert_eq!(halved, 0.5 * exact(&x, &y));
    }
}

#[test]
fn homogeneity_agrees_with_round_bound() {
    let pairs = [(circle_space(6).unwrap(), segment_space(1.0, 4).unwrap()), (circle_space(4).unwrap(), circle_space(8).unwrap())];
    for (x, y) in pairs {
        assert!(x.is_round());
        let h = ghcert_core::bounds::homogeneity_lower(&x, &y, 2);
        let r = ghcert_core::bounds::round_lower(&x, &y).unwrap();
        assert!(h.value >= r.value - 1e-12);
        if !y.is_round() || y.diameter() <= x.diameter() {
            assert!((h.value - r.value).abs() <= 1e-12);
        }
    }
}

#[test]
fn involution_bound_on_small_circles() {
    for n in [4, 6] {
        let c = circle_space(n).unwrap();
        let alpha = antipodal_map(n).unwrap();
        for m in 2..=6 {
            for lambda in [0.5, 1.0, PI / 2.0, 2.0, PI, 4.0] {
                let s = segment_space(lambda, m).unwrap();
                let positions: Vec<f64> = (0..m).map(|k| s.dist(0, k)).collect();
                let w = LipschitzWitness::from_values(&s, positions).unwrap();
                let Ok(r) = involution_lower(&c, &alpha, &s, &w, 2.0 * PI / n as f64) else { continue };
                let grid_slack = lambda / (m - 1) as f64;
                assert!(r.value <= exact(&c, &s) + r.slack + grid_slack + 1e-12, "n {n} m {m} lambda {lambda}");
            }
        }
    }
}

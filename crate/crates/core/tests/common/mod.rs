#![allow(dead_code)]

use ghcert_core::FiniteMetricSpace;
use proptest::prelude::*;

/// Symmetric matrices with off-diagonal entries `k/4`, `k` in `4..=8`.
/// Every entry lies in `[1, 2]`, so the triangle inequality holds, and
/// every value is dyadic so scaling by powers of two is exact.
pub fn dyadic_space(min: usize, max: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    (min..=max).prop_flat_map(|n| {
        proptest::collection::vec(4u8..=8, n * n).prop_map(move |raw| {
            let mut m = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = raw[i * n + j] as f64 / 4.0;
                    m[i][j] = d;
                    m[j][i] = d;
                }
            }
            FiniteMetricSpace::from_matrix(&m).unwrap()
        })
    })
}

/// Points in the plane with the Euclidean metric.
pub fn planar_space(min: usize, max: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), min..=max).prop_filter_map(
        "coincident points",
        |pts| {
            let m: Vec<Vec<f64>> = pts
                .iter()
                .map(|&(x1, y1)| pts.iter().map(|&(x2, y2)| ((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt()).collect())
                .collect();
            FiniteMetricSpace::from_matrix(&m).ok()
        },
    )
}

pub fn permuted(space: &FiniteMetricSpace, perm: &[usize]) -> FiniteMetricSpace {
    let m = space.to_matrix();
    let p: Vec<Vec<f64>> = perm.iter().map(|&i| perm.iter().map(|&j| m[i][j]).collect()).collect();
    FiniteMetricSpace::from_matrix(&p).unwrap()
}

use ghcert_core::segment_circle::{regime_report, sweep_lambdas, Grids, RegimeReport};
use rayon::prelude::*;

/// The sweep with one task per `lambda`; rows come back in `lambda` order
/// whatever the thread count.
pub fn sweep_parallel(from: f64, to: f64, steps: usize, grids: &Grids) -> ghcert_core::Result<Vec<RegimeReport>> {
    sweep_lambdas(from, to, steps)?.into_par_iter().map(|l| regime_report(l, grids)).collect()
}

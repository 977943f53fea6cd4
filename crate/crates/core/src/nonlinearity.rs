//! Nonlinearity degree: the smallest worst-case gap `d(x, y) - |f(x) - f(y)|`
//! over 1-Lipschitz real functions `f`, computed exactly on small spaces and
//! bounded from above on large ones.
//!
//! Once the order of the values `f(x)` is fixed, every constraint becomes a
//! difference constraint `lo <= g_b - g_a <= hi`, and feasibility of a target
//! gap is a negative-cycle test. The exact solver bisects on the target gap
//! for each order and keeps the best order.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correspondence::Correspondence;
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, Involution, Metric};
use crate::model::LineGrid;

pub const DEFAULT_LIP_TOL: f64 = 1e-9;
pub const DEFAULT_OPT_TOL: f64 = 1e-9;
/// Largest space handled by [`c_exact`] by default.
pub const DEFAULT_EXACT_LIMIT: usize = 8;
/// Largest space on which [`c_heuristic`] runs its order search.
pub const ORDER_SEARCH_LIMIT: usize = 16;

/// Values of a 1-Lipschitz function together with its worst gap.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzWitness {
    values: Vec<f64>,
    objective: f64,
}

/// Worst gap `max d(i,j) - |v_i - v_j|` of `values` on `space`.
///
/// Fails with `NotLipschitz` on the first pair whose values differ by more
/// than `d(i,j) + tol_lip`.
pub fn objective(space: &FiniteMetricSpace, values: &[f64], tol_lip: f64) -> Result<f64> {
    if values.len() != space.len() {
        return Err(Error::WitnessSize { expected: space.len(), got: values.len() });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("witness values must be finite"));
    }
    let mut worst = 0.0f64;
    for i in 0..values.len() {
        let row = space.row(i);
        for j in (i + 1)..values.len() {
            let spread = (values[i] - values[j]).abs();
            if spread > row[j] + tol_lip {
                return Err(Error::NotLipschitz { i, j, excess: spread - row[j] });
            }
            worst = worst.max(row[j] - spread);
        }
    }
    Ok(worst)
}

impl LipschitzWitness {
    /// Shifts `values` so their minimum is zero and computes the objective.
    pub fn from_values(space: &FiniteMetricSpace, mut values: Vec<f64>) -> Result<Self> {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        for v in &mut values {
            *v -= min;
        }
        let objective = objective(space, &values, DEFAULT_LIP_TOL)?;
        Ok(LipschitzWitness { values, objective })
    }

    /// A witness as read from storage; nothing is checked until
    /// [`verify`](Self::verify).
    pub fn from_parts(values: Vec<f64>, objective: f64) -> Self {
        LipschitzWitness { values, objective }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    /// Recomputes the objective on `space` and returns it; fails if the
    /// function is not 1-Lipschitz or the stored objective is stale.
    pub fn verify(&self, space: &FiniteMetricSpace, tol_lip: f64) -> Result<f64> {
        let actual = objective(space, &self.values, tol_lip)?;
        if (actual - self.objective).abs() > 1e-9 * (1.0 + actual.abs()) {
            return Err(Error::StaleCertificate { claimed: self.objective, actual });
        }
        Ok(actual)
    }
}

/// Difference-constraint system for one order of the values.
struct OrderSystem<'a> {
    space: &'a FiniteMetricSpace,
    order: &'a [usize],
    work: Vec<f64>,
    eps: f64,
}

impl<'a> OrderSystem<'a> {
    fn new(space: &'a FiniteMetricSpace, order: &'a [usize]) -> Self {
        let n = order.len();
        OrderSystem { space, order, work: alloc::vec![0.0; n * n], eps: 1e-12 * (1.0 + space.diameter()) }
    }

    // Floyd-Warshall on the constraint graph for target gap `a`; leaves the
    // shortest-path matrix in `work` and reports whether no negative cycle
    // exists (up to rounding).
    fn feasible(&mut self, a: f64) -> bool {
        let n = self.order.len();
        let w = &mut self.work;
        for x in 0..n {
            w[x * n + x] = 0.0;
            for y in (x + 1)..n {
                let d = self.space.dist(self.order[x], self.order[y]);
                w[x * n + y] = d;
                w[y * n + x] = -(d - a).max(0.0);
            }
        }
        for k in 0..n {
            for i in 0..n {
                let wik = w[i * n + k];
                for j in 0..n {
                    let through = wik + w[k * n + j];
                    if through < w[i * n + j] {
                        w[i * n + j] = through;
                    }
                }
            }
            if (0..n).any(|i| w[i * n + i] < -self.eps) {
                return false;
            }
        }
        true
    }

    // Potentials from the last feasible run, mapped back to points.
    fn values(&self) -> Vec<f64> {
        let n = self.order.len();
        let mut values = alloc::vec![0.0; n];
        for (pos, &point) in self.order.iter().enumerate() {
            values[point] = (0..n).map(|src| self.work[src * n + pos]).fold(0.0, f64::min);
        }
        values
    }

    /// Smallest feasible gap in `[0, upper]` to within `tol`, with its
    /// values; `None` if even `upper` is infeasible.
    fn minimize(&mut self, upper: f64, tol: f64) -> Option<(f64, Vec<f64>)> {
        if self.feasible(0.0) {
            return Some((0.0, self.values()));
        }
        if !self.feasible(upper) {
            return None;
        }
        let (mut lo, mut hi) = (0.0, upper);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.feasible(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        self.feasible(hi);
        Some((hi, self.values()))
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn distance_witness(space: &FiniteMetricSpace, base: usize) -> LipschitzWitness {
    LipschitzWitness::from_values(space, space.row(base).to_vec())
        .expect("distance to a point is 1-Lipschitz")
}

fn constant_witness(space: &FiniteMetricSpace) -> LipschitzWitness {
    LipschitzWitness { values: alloc::vec![0.0; space.len()], objective: space.diameter() }
}

fn keep_better(best: &mut LipschitzWitness, candidate: LipschitzWitness) {
    if candidate.objective < best.objective {
        *best = candidate;
    }
}

/// Settings for [`c_exact`].
#[derive(Debug, Clone, Copy)]
pub struct ExactOptions {
    pub max_points: usize,
    pub tol_opt: f64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { max_points: DEFAULT_EXACT_LIMIT, tol_opt: DEFAULT_OPT_TOL }
    }
}

/// The nonlinearity degree of a small space, with a witness attaining it to
/// within `tol_opt`. The value is the witness objective.
pub fn c_exact(space: &FiniteMetricSpace, opts: ExactOptions) -> Result<LipschitzWitness> {
    let n = space.len();
    if n > opts.max_points {
        return Err(Error::TooLarge { len: n, limit: opts.max_points });
    }
    if n <= 2 {
        return Ok(distance_witness(space, 0));
    }
    let mut best = constant_witness(space);
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        // An order and its reverse give the same gaps.
        if order[0] < order[n - 1] {
            let upper = best.objective - opts.tol_opt;
            if upper >= 0.0 {
                let mut system = OrderSystem::new(space, &order);
                if let Some((_, values)) = system.minimize(upper, opts.tol_opt) {
                    if let Ok(w) = LipschitzWitness::from_values(space, values) {
                        keep_better(&mut best, w);
                    }
                }
            }
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(best)
}

// Best gap for one order, if it beats `bound` by more than `tol`.
fn order_value(space: &FiniteMetricSpace, order: &[usize], bound: f64, tol: f64) -> Option<LipschitzWitness> {
    let upper = bound - tol;
    if upper < 0.0 {
        return None;
    }
    let (_, values) = OrderSystem::new(space, order).minimize(upper, tol)?;
    LipschitzWitness::from_values(space, values).ok()
}

// First-improvement local search over orders with insertion moves.
fn improve_order(space: &FiniteMetricSpace, mut order: Vec<usize>, best: &mut LipschitzWitness) {
    let n = order.len();
    let tol = DEFAULT_OPT_TOL;
    let mut current = match order_value(space, &order, space.diameter() + 2.0 * tol, tol) {
        Some(w) => w,
        None => return,
    };
    'search: loop {
        for from in 0..n {
            for to in 0..n {
                if from == to {
                    continue;
                }
                let mut candidate = order.clone();
                let moved = candidate.remove(from);
                candidate.insert(to, moved);
                if let Some(w) = order_value(space, &candidate, current.objective, tol) {
                    order = candidate;
                    current = w;
                    continue 'search;
                }
            }
        }
        break;
    }
    keep_better(best, current);
}

/// An upper bound on the nonlinearity degree from multistart search.
///
/// Distance-to-a-basepoint functions are tried first (for subsets of the
/// line, an endpoint basepoint already gives zero). On spaces of at most
/// [`ORDER_SEARCH_LIMIT`] points, a local search over value orders is then
/// started from the best basepoint order and from `restarts` random orders.
/// The result is deterministic for a given `seed`.
pub fn c_heuristic(space: &FiniteMetricSpace, restarts: usize, seed: u64) -> LipschitzWitness {
    let n = space.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = constant_witness(space);
    if n <= 2 {
        return distance_witness(space, 0);
    }

    let ecc = space.eccentricities();
    let far = (0..n).max_by(|&a, &b| ecc[a].total_cmp(&ecc[b]).then(b.cmp(&a))).unwrap_or(0);
    let partner = (0..n)
        .max_by(|&a, &b| space.dist(far, a).total_cmp(&space.dist(far, b)).then(b.cmp(&a)))
        .unwrap_or(0);
    let mut bases = alloc::vec![far, partner];
    bases.extend((0..restarts).map(|_| rng.gen_range(0..n)));
    for &base in &bases {
        keep_better(&mut best, distance_witness(space, base));
    }
    if best.objective <= DEFAULT_OPT_TOL || n > ORDER_SEARCH_LIMIT {
        return best;
    }

    let mut seeded: Vec<usize> = (0..n).collect();
    let vals = best.values.clone();
    seeded.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    improve_order(space, seeded, &mut best);
    for _ in 0..restarts {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        improve_order(space, order, &mut best);
    }
    best
}

/// Lower bound on the nonlinearity degree from an antipodal involution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntipodalBound {
    pub value: f64,
    /// Set when no chain was supplied or the chain steps are too coarse for
    /// a positive bound; `value` is then 0.
    pub vacuous: bool,
}

/// For any 1-Lipschitz `f`, the function `g(x) = f(x) - f(alpha(x))` changes
/// sign along `chain`, which runs from some point to its image. At the sign
/// change both `|g|` values are at most half the step `d(x_k, x_{k+1}) +
/// d(alpha x_k, alpha x_{k+1})`, so the worst gap is at least `diam` minus
/// half the largest step. On the circle grid `C_n` with chain `0..=n/2` this
/// is `pi - 2pi/n`.
pub fn antipodal_lower_bound(
    space: &FiniteMetricSpace,
    alpha: &Involution,
    chain: Option<&[usize]>,
) -> Result<AntipodalBound> {
    alpha.check_antipodal(space, crate::metric::DEFAULT_METRIC_TOL)?;
    let Some(chain) = chain else {
        return Ok(AntipodalBound { value: 0.0, vacuous: true });
    };
    if chain.len() < 2 {
        return Err(Error::InvalidParameter("chain needs at least two points"));
    }
    if let Some(&bad) = chain.iter().find(|&&i| i >= space.len()) {
        return Err(Error::IndexOutOfRange { index: bad, len: space.len() });
    }
    if chain[chain.len() - 1] != alpha.image(chain[0]) {
        return Err(Error::InvalidParameter("chain must end at the image of its first point"));
    }
    let step = chain
        .windows(2)
        .map(|w| space.dist(w[0], w[1]) + space.dist(alpha.image(w[0]), alpha.image(w[1])))
        .fold(0.0, f64::max);
    let value = space.diameter() - step / 2.0;
    if value > 0.0 {
        Ok(AntipodalBound { value, vacuous: false })
    } else {
        Ok(AntipodalBound { value: 0.0, vacuous: true })
    }
}

/// The image of a space under a witness, as a subset of the line.
#[derive(Debug, Clone)]
pub struct LipschitzImage {
    pub image: FiniteMetricSpace,
    pub positions: Vec<f64>,
    /// Point `i` of the source goes to image point `map[i]`.
    pub map: Vec<usize>,
    pub correspondence: Correspondence,
}

/// The set `{f(x)}` with the line metric (equal values merged) and the graph
/// of `f` as a correspondence. Its distortion equals the witness objective.
pub fn lipschitz_image(space: &FiniteMetricSpace, witness: &LipschitzWitness) -> Result<LipschitzImage> {
    objective(space, &witness.values, DEFAULT_LIP_TOL)?;
    let mut positions = witness.values.clone();
    positions.sort_by(f64::total_cmp);
    positions.dedup();
    let map: Vec<usize> = witness
        .values
        .iter()
        .map(|v| positions.binary_search_by(|p| p.total_cmp(v)).expect("value is present"))
        .collect();
    let grid = LineGrid::new(positions.clone())?;
    let correspondence = Correspondence::graph(&map, positions.len())?;
    Ok(LipschitzImage { image: grid.to_space(), positions, map, correspondence })
}

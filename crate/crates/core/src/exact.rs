//! Exact Gromov-Hausdorff distance between small spaces by branch and bound
//! over correspondences, plus an exhaustive enumerator used as its oracle.
//!
//! Adding a pair to a correspondence never lowers its distortion, so some
//! optimum is inclusion-minimal. In a minimal correspondence every pair has
//! an endpoint of degree one, which means it is the graph of a map
//! `f: X -> Y` plus one extra pair for each point of `Y` outside the image
//! of `f`. The search enumerates exactly those relations.

use alloc::vec;
use alloc::vec::Vec;

use crate::correspondence::{is_correspondence, Correspondence};
use crate::error::{Error, Result};
use crate::metric::Metric;

pub const DEFAULT_MAX_POINTS: usize = 7;
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;
/// Largest `nX * nY` accepted by [`enumerate_correspondences`].
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub max_points: usize,
    pub node_budget: u64,
    /// A known upper bound on the distance, used to prune from the start.
    pub initial_upper: Option<f64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_points: DEFAULT_MAX_POINTS, node_budget: DEFAULT_NODE_BUDGET, initial_upper: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    Optimal,
    /// The node budget ran out; the value is the best found so far.
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GhSolution {
    /// Half the distortion of `correspondence`.
    pub value: f64,
    pub correspondence: Correspondence,
    pub status: SearchStatus,
    pub nodes: u64,
}

fn dense<M: Metric + ?Sized>(space: &M) -> Vec<f64> {
    let n = space.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = space.dist(i, j);
        }
    }
    d
}

struct Search {
    nx: usize,
    ny: usize,
    dx: Vec<f64>,
    dy: Vec<f64>,
    order: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    covered: Vec<usize>,
    best: f64,
    // Prune when the partial distortion exceeds this; equals `best` once an
    // incumbent exists, so ties are pruned too.
    strict_limit: bool,
    best_pairs: Option<Vec<(usize, usize)>>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search {
    fn cost(&self, x: usize, y: usize) -> f64 {
        let mut worst = 0.0f64;
        for &(x2, y2) in &self.pairs {
            let gap = (self.dx[x * self.nx + x2] - self.dy[y * self.ny + y2]).abs();
            if gap > worst {
                worst = gap;
            }
        }
        worst
    }

    fn pruned(&self, value: f64) -> bool {
        if self.strict_limit {
            value > self.best
        } else {
            value >= self.best
        }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
        }
        self.exhausted
    }

    fn accept(&mut self, value: f64) {
        self.best = value;
        self.strict_limit = false;
        self.best_pairs = Some(self.pairs.clone());
    }

    fn assign(&mut self, depth: usize, current: f64) {
        if self.tick() {
            return;
        }
        if depth == self.nx {
            let uncovered: Vec<usize> = (0..self.ny).filter(|&y| self.covered[y] == 0).collect();
            self.cover(&uncovered, 0, current);
            return;
        }
        // Each unassigned x must eventually take some partner.
        for &x in &self.order[depth + 1..] {
            let cheapest = (0..self.ny).map(|y| self.cost(x, y)).fold(f64::INFINITY, f64::min);
            if self.pruned(current.max(cheapest)) {
                return;
            }
        }
        let x = self.order[depth];
        let mut options: Vec<(f64, usize)> = (0..self.ny).map(|y| (current.max(self.cost(x, y)), y)).collect();
        options.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (value, y) in options {
            if self.pruned(value) {
                break;
            }
            self.pairs.push((x, y));
            self.covered[y] += 1;
            self.assign(depth + 1, value);
            self.covered[y] -= 1;
            self.pairs.pop();
            if self.exhausted {
                return;
            }
        }
    }

    fn cover(&mut self, uncovered: &[usize], k: usize, current: f64) {
        if k == uncovered.len() {
            // Every pair on the way here passed `pruned`.
            self.accept(current);
            return;
        }
        if self.tick() {
            return;
        }
        let y = uncovered[k];
        let mut options: Vec<(f64, usize)> = (0..self.nx).map(|x| (current.max(self.cost(x, y)), x)).collect();
        options.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (value, x) in options {
            if self.pruned(value) {
                break;
            }
            self.pairs.push((x, y));
            self.cover(uncovered, k + 1, value);
            self.pairs.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

fn search<X, Y>(x: &X, y: &Y, opts: &SearchOptions, limit: Option<f64>) -> Result<GhSolution>
where
    X: Metric + ?Sized,
    Y: Metric + ?Sized,
{
    let (nx, ny) = (x.len(), y.len());
    let dx = dense(x);
    let dy = dense(y);
    let ecc = |i: usize| dx[i * nx..(i + 1) * nx].iter().copied().fold(0.0, f64::max);
    let mut order: Vec<usize> = (0..nx).collect();
    order.sort_by(|&a, &b| ecc(b).total_cmp(&ecc(a)).then(a.cmp(&b)));

    let product = Correspondence::full_product(nx, ny)?;
    let product_distortion = product.distortion(x, y)?;
    let (best, strict_limit) = match limit {
        Some(l) if l < product_distortion => (l, true),
        _ => (product_distortion, false),
    };
    let mut s = Search {
        nx,
        ny,
        dx,
        dy,
        order,
        pairs: Vec::with_capacity(nx + ny),
        covered: vec![0; ny],
        best,
        strict_limit,
        best_pairs: None,
        nodes: 0,
        budget: opts.node_budget,
        exhausted: false,
    };
    s.assign(0, 0.0);
    let status = if s.exhausted { SearchStatus::Upper } else { SearchStatus::Optimal };
    let correspondence = match s.best_pairs.take() {
        Some(pairs) => Correspondence::new(pairs, nx, ny)?,
        None if s.strict_limit && !s.exhausted => {
            // The hint was below the optimum; nothing qualified.
            return Err(Error::InvalidParameter("initial upper bound is below the optimum"));
        }
        None => product,
    };
    let value = correspondence.distortion(x, y)? / 2.0;
    Ok(GhSolution { value, correspondence, status, nodes: s.nodes })
}

/// Half the minimum distortion over correspondences between `x` and `y`.
///
/// Returns status `Upper` with the best correspondence found when
/// `node_budget` runs out.
pub fn gh_exact<X, Y>(x: &X, y: &Y, opts: &SearchOptions) -> Result<GhSolution>
where
    X: Metric + ?Sized,
    Y: Metric + ?Sized,
{
    if opts.max_points == 0 {
        return Err(Error::InvalidParameter("max_points must be at least 1"));
    }
    for len in [x.len(), y.len()] {
        if len == 0 {
            return Err(Error::EmptyMatrix);
        }
        if len > opts.max_points {
            return Err(Error::TooLarge { len, limit: opts.max_points });
        }
    }
    if let Some(upper) = opts.initial_upper {
        match search(x, y, opts, Some(2.0 * upper)) {
            Err(Error::InvalidParameter(_)) => {}
            other => return other,
        }
    }
    search(x, y, opts, None)
}

/// Every relation between `0..nx` and `0..ny` that covers both sides, each
/// once, in increasing order of its bitmask over the row-major grid.
pub fn enumerate_correspondences(nx: usize, ny: usize) -> Result<Correspondences> {
    let cells = nx * ny;
    if cells > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { len: cells, limit: ENUMERATION_LIMIT });
    }
    if cells == 0 {
        return Err(Error::EmptyMatrix);
    }
    Ok(Correspondences { nx, ny, next: 1, end: 1u32 << cells })
}

#[derive(Debug, Clone)]
pub struct Correspondences {
    nx: usize,
    ny: usize,
    next: u32,
    end: u32,
}

impl Correspondences {
    fn covers(&self, mask: u32) -> bool {
        let (nx, ny) = (self.nx, self.ny);
        let row = (1u32 << ny) - 1;
        let rows_ok = (0..nx).all(|i| mask >> (i * ny) & row != 0);
        let mut cols = 0u32;
        for i in 0..nx {
            cols |= mask >> (i * ny) & row;
        }
        rows_ok && cols == row
    }
}

impl Iterator for Correspondences {
    type Item = Vec<(usize, usize)>;

    fn next(&mut self) -> Option<Self::Item> {
        while self.next < self.end {
            let mask = self.next;
            self.next += 1;
            if self.covers(mask) {
                let ny = self.ny;
                let pairs = (0..self.nx * ny)
                    .filter(|&b| mask >> b & 1 == 1)
                    .map(|b| (b / ny, b % ny))
                    .collect();
                return Some(pairs);
            }
        }
        None
    }
}

/// Half the minimum distortion found by trying every correspondence.
pub fn exhaustive_gh<X, Y>(x: &X, y: &Y) -> Result<(f64, Vec<(usize, usize)>)>
where
    X: Metric + ?Sized,
    Y: Metric + ?Sized,
{
    let mut best: Option<(f64, Vec<(usize, usize)>)> = None;
    for pairs in enumerate_correspondences(x.len(), y.len())? {
        let bound = best.as_ref().map_or(f64::INFINITY, |b| b.0);
        let mut worst = 0.0f64;
        'outer: for (a, &(x1, y1)) in pairs.iter().enumerate() {
            for &(x2, y2) in &pairs[a + 1..] {
                worst = worst.max((x.dist(x1, x2) - y.dist(y1, y2)).abs());
                if worst >= bound {
                    break 'outer;
                }
            }
        }
        if worst < bound {
            best = Some((worst, pairs));
        }
    }
    let (d, pairs) = best.expect("the full product is always enumerated");
    Ok((d / 2.0, pairs))
}

/// True iff `pairs` is a correspondence with `distortion / 2 == value` and,
/// when the product has at most [`ENUMERATION_LIMIT`] cells, no
/// correspondence does better.
pub fn verify_optimum<X, Y>(x: &X, y: &Y, value: f64, pairs: &[(usize, usize)]) -> bool
where
    X: Metric + ?Sized,
    Y: Metric + ?Sized,
{
    if !is_correspondence(pairs, x.len(), y.len()) {
        return false;
    }
    let Ok(r) = Correspondence::new(pairs.to_vec(), x.len(), y.len()) else {
        return false;
    };
    let Ok(d) = r.distortion(x, y) else {
        return false;
    };
    if d / 2.0 != value {
        return false;
    }
    if x.len() * y.len() <= ENUMERATION_LIMIT {
        match exhaustive_gh(x, y) {
            Ok((best, _)) => best >= value,
            Err(_) => false,
        }
    } else {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteMetricSpace;
    use crate::model::circle_space;

    fn two_points(d: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::from_matrix(&[vec![0.0, d], vec![d, 0.0]]).unwrap()
    }

    // Counts relations with every row and column nonempty by
    // inclusion-exclusion over empty columns.
    fn surjective_count(nx: usize, ny: usize) -> u64 {
        let binom = |n: usize, k: usize| -> i64 {
            (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
        };
        let mut total = 0i64;
        for k in 0..=ny {
            let rows = (1i64 << (ny - k)) - 1;
            let sign = if k % 2 == 0 { 1 } else { -1 };
            total += sign * binom(ny, k) * rows.pow(nx as u32);
        }
        total as u64
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_correspondences(1, 1).unwrap().count(), 1);
        assert_eq!(enumerate_correspondences(1, 2).unwrap().count(), 1);
        assert_eq!(enumerate_correspondences(2, 2).unwrap().count(), 7);
        for (nx, ny) in [(2, 3), (3, 3), (3, 4), (4, 4)] {
            assert_eq!(enumerate_correspondences(nx, ny).unwrap().count() as u64, surjective_count(nx, ny));
        }
        assert!(matches!(enumerate_correspondences(5, 5), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn small_examples() {
        let opts = SearchOptions::default();
        let a = two_points(1.0);
        let b = two_points(3.0);
        let sol = gh_exact(&a, &b, &opts).unwrap();
        assert_eq!(sol.value, 1.0);
        assert_eq!(exhaustive_gh(&a, &b).unwrap().0, 1.0);
        assert!(verify_optimum(&a, &b, sol.value, sol.correspondence.pairs()));

        let p = FiniteMetricSpace::single_point("p");
        let c = circle_space(6).unwrap();
        assert_eq!(gh_exact(&p, &c, &opts).unwrap().value, core::f64::consts::PI / 2.0);
        let same = gh_exact(&c, &c, &opts).unwrap();
        assert_eq!(same.value, 0.0);
        assert_eq!(same.status, SearchStatus::Optimal);
    }

    #[test]
    fn verify_rejects_tampering() {
        let a = two_points(1.0);
        let b = two_points(3.0);
        let sol = gh_exact(&a, &b, &SearchOptions::default()).unwrap();
        assert!(!verify_optimum(&a, &b, sol.value - 1e-3, sol.correspondence.pairs()));
        let missing: Vec<(usize, usize)> = sol.correspondence.pairs().iter().copied().filter(|&(_, j)| j != 1).collect();
        assert!(!verify_optimum(&a, &b, sol.value, &missing));
    }

    #[test]
    fn limits_and_hints() {
        let c = circle_space(8).unwrap();
        let tight = SearchOptions { max_points: 6, ..SearchOptions::default() };
        assert!(matches!(gh_exact(&c, &c, &tight), Err(Error::TooLarge { len: 8, limit: 6 })));
        let a = two_points(1.0);
        let b = two_points(3.0);
        for hint in [0.5, 1.0, 1.5, 10.0] {
            let opts = SearchOptions { initial_upper: Some(hint), ..SearchOptions::default() };
            assert_eq!(gh_exact(&a, &b, &opts).unwrap().value, 1.0);
        }
        let c6 = circle_space(6).unwrap();
        let p = FiniteMetricSpace::from_matrix(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap();
        let starved = SearchOptions { node_budget: 1, ..SearchOptions::default() };
        let sol = gh_exact(&c6, &p, &starved).unwrap();
        assert_eq!(sol.status, SearchStatus::Upper);
        assert!(sol.value >= gh_exact(&c6, &p, &SearchOptions::default()).unwrap().value);
    }
}

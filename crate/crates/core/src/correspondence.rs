//! Finite correspondences and their distortion, plus the sampled
//! segment-to-circle maps used as upper-bound certificates.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, Metric, PointSubset};
use crate::model::{CircleGrid, LineGrid};

/// A relation between `0..n_left` and `0..n_right` that is surjective on
/// both sides. Pairs are kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    n_left: usize,
    n_right: usize,
    pairs: Vec<(usize, usize)>,
}

/// True iff `pairs` covers every left index and every right index.
pub fn is_correspondence(pairs: &[(usize, usize)], n_left: usize, n_right: usize) -> bool {
    if n_left == 0 || n_right == 0 {
        return false;
    }
    let mut left = alloc::vec![false; n_left];
    let mut right = alloc::vec![false; n_right];
    for &(i, j) in pairs {
        if i >= n_left || j >= n_right {
            return false;
        }
        left[i] = true;
        right[j] = true;
    }
    left.into_iter().all(|b| b) && right.into_iter().all(|b| b)
}

impl Correspondence {
    pub fn new(mut pairs: Vec<(usize, usize)>, n_left: usize, n_right: usize) -> Result<Self> {
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= n_left || j >= n_right) {
            return Err(Error::InvalidCorrespondence(format!(
                "pair ({i}, {j}) out of range for {n_left} x {n_right}"
            )));
        }
        if !is_correspondence(&pairs, n_left, n_right) {
            return Err(Error::InvalidCorrespondence(format!(
                "pairs do not cover both sides of {n_left} x {n_right}"
            )));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Correspondence { n_left, n_right, pairs })
    }

    /// Every pair of the product.
    pub fn full_product(n_left: usize, n_right: usize) -> Result<Self> {
        let pairs = (0..n_left).flat_map(|i| (0..n_right).map(move |j| (i, j))).collect();
        Self::new(pairs, n_left, n_right)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| (i, i)).collect(), n, n)
    }

    /// The graph `{(i, map[i])}`; fails unless `map` is onto `0..n_right`.
    pub fn graph(map: &[usize], n_right: usize) -> Result<Self> {
        Self::new(map.iter().copied().enumerate().collect(), map.len(), n_right)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    /// Swaps the roles of the two sides.
    pub fn transpose(&self) -> Self {
        let mut pairs: Vec<(usize, usize)> = self.pairs.iter().map(|&(i, j)| (j, i)).collect();
        pairs.sort_unstable();
        Correspondence { n_left: self.n_right, n_right: self.n_left, pairs }
    }

    /// Adds pairs, keeping the relation canonical.
    pub fn extended(&self, extra: &[(usize, usize)]) -> Result<Self> {
        let mut pairs = self.pairs.clone();
        pairs.extend_from_slice(extra);
        Self::new(pairs, self.n_left, self.n_right)
    }

    /// `dis R`: the largest `|d_X(x1,x2) - d_Y(y1,y2)|` over pairs of pairs.
    pub fn distortion<X, Y>(&self, left: &X, right: &Y) -> Result<f64>
    where
        X: Metric + ?Sized,
        Y: Metric + ?Sized,
    {
        if left.len() != self.n_left || right.len() != self.n_right {
            return Err(Error::InvalidCorrespondence(format!(
                "relation is {} x {} but spaces have {} and {} points",
                self.n_left,
                self.n_right,
                left.len(),
                right.len()
            )));
        }
        let mut worst = 0.0f64;
        for (a, &(x1, y1)) in self.pairs.iter().enumerate() {
            for &(x2, y2) in &self.pairs[a + 1..] {
                let gap = (left.dist(x1, x2) - right.dist(y1, y2)).abs();
                if gap > worst {
                    worst = gap;
                }
            }
        }
        Ok(worst)
    }
}

/// A sampled map from a segment grid onto a circle grid, with the two
/// spaces it relates.
#[derive(Debug, Clone)]
pub struct SampledMap {
    pub segment: LineGrid,
    pub circle: CircleGrid,
    pub correspondence: Correspondence,
}

impl SampledMap {
    pub fn distortion(&self) -> f64 {
        self.correspondence
            .distortion(&self.segment, &self.circle)
            .expect("sizes agree by construction")
    }

    // Graph of `angle_of` on the segment grid, plus each circle point paired
    // with the grid point nearest to its chosen preimage.
    fn build(
        segment: LineGrid,
        circle: CircleGrid,
        angle_of: impl Fn(f64) -> f64,
        preimage_of: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let positions = segment.positions();
        let m = positions.len();
        let length = segment.length();
        let mut pairs: Vec<(usize, usize)> =
            positions.iter().enumerate().map(|(k, &t)| (k, circle.nearest(angle_of(t)))).collect();
        for j in 0..circle.points() {
            let t = preimage_of(circle.angle(j));
            let k = libm::round(t / length * (m - 1) as f64) as usize;
            pairs.push((k.min(m - 1), j));
        }
        let correspondence = Correspondence::new(pairs, m, circle.points())?;
        Ok(SampledMap { segment, circle, correspondence })
    }
}

fn check_grids(m: usize, n: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::GridTooCoarse("segment grid needs at least 2 points"));
    }
    if n < 3 {
        return Err(Error::GridTooCoarse("circle grid needs at least 3 points"));
    }
    Ok(())
}

/// Samples `t -> exp(2*pi*i*t/lambda)` on `[0, lambda]` with `m` segment and
/// `n` circle points.
pub fn wrap_once(lambda: f64, m: usize, n: usize) -> Result<SampledMap> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter("wrap_once needs lambda > 0"));
    }
    check_grids(m, n)?;
    SampledMap::build(
        LineGrid::uniform(lambda, m)?,
        CircleGrid::new(n)?,
        |t| 2.0 * PI * t / lambda,
        |phi| phi * lambda / (2.0 * PI),
    )
}

pub const WRAP_TRIPLE_MIN: f64 = 2.0 * PI / 3.0;
pub const WRAP_TRIPLE_MAX: f64 = 7.0 * PI / 6.0;

/// Samples `t -> exp(3*i*t)` on `[0, lambda]` for `2pi/3 <= lambda <= 7pi/6`.
pub fn wrap_triple(lambda: f64, m: usize, n: usize) -> Result<SampledMap> {
    let slack = 1e-12;
    if !(lambda >= WRAP_TRIPLE_MIN - slack && lambda <= WRAP_TRIPLE_MAX + slack) {
        return Err(Error::LambdaOutOfRange { lambda, min: WRAP_TRIPLE_MIN, max: WRAP_TRIPLE_MAX });
    }
    check_grids(m, n)?;
    SampledMap::build(
        LineGrid::uniform(lambda, m)?,
        CircleGrid::new(n)?,
        |t| 3.0 * t,
        // Every angle in [0, 2pi) has a preimage in [0, 2pi/3].
        |phi| (phi / 3.0).min(lambda),
    )
}

/// Two subsets of one ambient space, realized as standalone spaces, with the
/// nearest-point relation between them.
#[derive(Debug, Clone)]
pub struct NearestPointPairing {
    pub left: FiniteMetricSpace,
    pub right: FiniteMetricSpace,
    pub correspondence: Correspondence,
    pub hausdorff: f64,
}

/// Pairs every point of `a` with a nearest point of `b` and vice versa.
///
/// Each pair is at ambient distance at most `d_H(A, B)`, so the distortion
/// is at most `2 d_H(A, B)`. Indices in the result are positions within
/// `a.indices()` and `b.indices()`.
pub fn nearest_point_correspondence(
    a: &PointSubset<'_>,
    b: &PointSubset<'_>,
) -> Result<NearestPointPairing> {
    let hausdorff = a.hausdorff_distance(b)?;
    let space = a.space();
    let position = |subset: &PointSubset<'_>, point: usize| {
        subset.indices().binary_search(&point).expect("nearest point is a member")
    };
    let mut pairs = Vec::with_capacity(a.indices().len() + b.indices().len());
    for (ia, &pa) in a.indices().iter().enumerate() {
        pairs.push((ia, position(b, b.nearest_to(pa)?)));
    }
    for (ib, &pb) in b.indices().iter().enumerate() {
        pairs.push((position(a, a.nearest_to(pb)?), ib));
    }
    let correspondence = Correspondence::new(pairs, a.indices().len(), b.indices().len())?;
    Ok(NearestPointPairing {
        left: space.subspace(a.indices())?,
        right: space.subspace(b.indices())?,
        correspondence,
        hausdorff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{circle_space, segment_space};
    use alloc::vec;

    #[test]
    fn correspondence_predicate() {
        assert!(!is_correspondence(&[], 2, 2));
        assert!(is_correspondence(&[(0, 1), (1, 0), (2, 1)], 3, 2));
        assert!(!is_correspondence(&[(0, 0), (1, 0), (2, 0)], 3, 2));
        assert!(Correspondence::new(vec![(0, 5)], 1, 1).is_err());
    }

    #[test]
    fn identity_and_product() {
        let c = circle_space(6).unwrap();
        assert_eq!(Correspondence::identity(6).unwrap().distortion(&c, &c).unwrap(), 0.0);
        let point = FiniteMetricSpace::single_point("p");
        let full = Correspondence::full_product(1, 6).unwrap();
        assert_eq!(full.distortion(&point, &c).unwrap(), PI);
        let mismatch = Correspondence::identity(5).unwrap();
        assert!(mismatch.distortion(&c, &c).is_err());
    }

    #[test]
    fn nearest_point_on_segment() {
        let s = segment_space(3.0, 4).unwrap();
        let a = PointSubset::new(&s, vec![0]).unwrap();
        let b = PointSubset::new(&s, vec![0, 3]).unwrap();
        let pairing = nearest_point_correspondence(&a, &b).unwrap();
        assert_eq!(pairing.hausdorff, 3.0);
        let d = pairing.correspondence.distortion(&pairing.left, &pairing.right).unwrap();
        assert_eq!(d, 3.0);
        let same = nearest_point_correspondence(&b, &b).unwrap();
        assert_eq!(same.correspondence.distortion(&same.left, &same.right).unwrap(), 0.0);
    }

    #[test]
    fn wrap_maps_are_correspondences_for_any_grid() {
        for (m, n) in [(2, 3), (5, 40), (40, 5), (721, 720)] {
            let w = wrap_once(1.0, m, n).unwrap();
            assert_eq!(w.correspondence.n_left(), m);
            assert_eq!(w.correspondence.n_right(), n);
        }
        assert!(matches!(wrap_once(1.0, 1, 10), Err(Error::GridTooCoarse(_))));
        assert!(wrap_triple(PI, 100, 90).is_ok());
        assert!(matches!(wrap_triple(PI / 2.0, 100, 90), Err(Error::LambdaOutOfRange { .. })));
    }
}

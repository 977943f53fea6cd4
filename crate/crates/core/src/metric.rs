//! Finite metric spaces and the elementary quantities computed on them:
//! diameter, eccentricity, point-to-set and Hausdorff distances, separated
//! subsets, homogeneity and roundness.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Absolute tolerance used when validating metric axioms.
pub const DEFAULT_METRIC_TOL: f64 = 1e-9;

/// Anything that can report pairwise distances between indexed points.
pub trait Metric {
    fn len(&self) -> usize;

    fn dist(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A validated finite metric space stored as a dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    n: usize,
}

impl Metric for FiniteMetricSpace {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }
}

impl FiniteMetricSpace {
    /// Checks the metric axioms on `matrix` and builds a space from it.
    ///
    /// The first violated axiom is reported, in the order: shape, finiteness,
    /// zero diagonal, nonnegativity, symmetry, positivity off the diagonal,
    /// triangle inequality. Entries that are symmetric only up to `tol` are
    /// replaced by the upper-triangle value so the stored matrix is exactly
    /// symmetric.
    pub fn validate(matrix: &[Vec<f64>], labels: Vec<String>, tol: f64) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), expected: n });
            }
        }
        if labels.len() != n {
            return Err(Error::LabelCount { expected: n, got: labels.len() });
        }
        for (i, r) in matrix.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteDistance { i, j });
                }
            }
        }
        for (i, r) in matrix.iter().enumerate() {
            if r[i].abs() > tol {
                return Err(Error::NonzeroDiagonal { i, value: r[i] });
            }
        }
        for (i, r) in matrix.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v < 0.0 {
                    return Err(Error::NegativeDistance { i, j, value: v });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (forward, backward) = (matrix[i][j], matrix[j][i]);
                if (forward - backward).abs() > tol {
                    return Err(Error::AsymmetricMatrix { i, j, forward, backward });
                }
            }
        }
        let mut dist = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = matrix[i][j];
                if v <= 0.0 {
                    return Err(Error::CoincidentPoints { i, j });
                }
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        let space = FiniteMetricSpace { labels, dist, n };
        space.check_triangle(tol)?;
        Ok(space)
    }

    /// Same as [`validate`](Self::validate) with labels `"0"`, `"1"`, ...
    pub fn from_matrix(matrix: &[Vec<f64>]) -> Result<Self> {
        let labels = (0..matrix.len()).map(|i| format!("{i}")).collect();
        Self::validate(matrix, labels, DEFAULT_METRIC_TOL)
    }

    /// Builds a space from a distance function the caller knows to be a metric.
    ///
    /// Only symmetry and the zero diagonal are enforced; the triangle
    /// inequality is not rechecked. Used by the model-space constructors whose
    /// metrics hold by construction.
    pub(crate) fn from_fn(labels: Vec<String>, mut d: impl FnMut(usize, usize) -> f64) -> Self {
        let n = labels.len();
        let mut dist = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = d(i, j);
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        FiniteMetricSpace { labels, dist, n }
    }

    pub fn single_point(label: impl Into<String>) -> Self {
        FiniteMetricSpace { labels: alloc::vec![label.into()], dist: alloc::vec![0.0], n: 1 }
    }

    fn check_triangle(&self, tol: f64) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            let ri = &self.dist[i * n..(i + 1) * n];
            for j in 0..n {
                let dij = ri[j];
                let rj = &self.dist[j * n..(j + 1) * n];
                for k in (i + 1)..n {
                    if ri[k] > dij + rj[k] + tol {
                        return Err(Error::TriangleViolation { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, len: self.n })
        }
    }

    /// Matrix equality within `tol`; labels are ignored.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.n == other.n && self.dist.iter().zip(&other.dist).all(|(a, b)| (a - b).abs() <= tol)
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Largest distance from a point to its nearest neighbour; the grid
    /// spacing when the space samples a connected one. Zero for one point.
    pub fn mesh(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (0..self.n)
            .map(|i| {
                let row = self.row(i);
                (0..self.n).filter(|&j| j != i).map(|j| row[j]).fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    pub fn eccentricity(&self, i: usize) -> Result<f64> {
        self.check_index(i)?;
        Ok(self.row(i).iter().copied().fold(0.0, f64::max))
    }

    pub fn eccentricities(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().copied().fold(0.0, f64::max)).collect()
    }

    pub fn min_eccentricity(&self) -> f64 {
        self.eccentricities().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// The induced subspace on `indices`, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySubset);
        }
        for &i in indices {
            self.check_index(i)?;
        }
        for (a, &i) in indices.iter().enumerate() {
            if indices[..a].contains(&i) {
                return Err(Error::InvalidParameter("subspace indices must be distinct"));
            }
        }
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        Ok(Self::from_fn(labels, |a, b| self.dist(indices[a], indices[b])))
    }

    /// Multiplies every distance by `factor`; a zero factor collapses the
    /// space to a single point.
    pub fn scale(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::NegativeScale(factor));
        }
        if factor == 0.0 {
            return Ok(Self::single_point(self.labels[0].clone()));
        }
        Ok(FiniteMetricSpace {
            labels: self.labels.clone(),
            dist: self.dist.iter().map(|d| d * factor).collect(),
            n: self.n,
        })
    }

    /// True iff every distinct pair in `subset` is at distance at least `b`.
    pub fn is_separated(&self, subset: &[usize], b: f64) -> bool {
        subset.iter().enumerate().all(|(a, &i)| {
            subset[a + 1..].iter().all(|&j| i == j || self.dist(i, j) >= b)
        })
    }

    /// True iff every point lies in some `b`-separated subset of `n` points.
    pub fn is_homogeneous(&self, b: f64, n: usize) -> bool {
        if n <= 1 {
            return true;
        }
        if n > self.n {
            return false;
        }
        if n == 2 {
            return b <= self.min_eccentricity();
        }
        let ecc = self.eccentricities();
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &c| ecc[c].total_cmp(&ecc[a]).then(a.cmp(&c)));
        (0..self.n).all(|x| {
            let candidates: Vec<usize> =
                order.iter().copied().filter(|&y| y != x && self.dist(x, y) >= b).collect();
            self.extend_separated(&candidates, n - 1, b)
        })
    }

    // Depth-first search for `need` mutually `b`-separated points among
    // `candidates`, all of which are already compatible with the chosen set.
    fn extend_separated(&self, candidates: &[usize], need: usize, b: f64) -> bool {
        if need == 0 {
            return true;
        }
        for (pos, &y) in candidates.iter().enumerate() {
            if candidates.len() - pos < need {
                return false;
            }
            let rest: Vec<usize> =
                candidates[pos + 1..].iter().copied().filter(|&z| self.dist(y, z) >= b).collect();
            if self.extend_separated(&rest, need - 1, b) {
                return true;
            }
        }
        false
    }

    /// The largest `b` for which the space is `(b, n)`-homogeneous.
    ///
    /// On a finite space the admissible thresholds form the interval
    /// `(0, b*]`, so both the strict and the non-strict reading of the
    /// definition are decided by comparing against `b*`. Returns `None` when
    /// the space has fewer than `n` points (never homogeneous).
    pub fn homogeneity_threshold(&self, n: usize) -> Option<f64> {
        if n < 2 || n > self.n {
            return None;
        }
        if n == 2 {
            return Some(self.min_eccentricity());
        }
        let mut values: Vec<f64> = (0..self.n)
            .flat_map(|i| ((i + 1)..self.n).map(move |j| (i, j)))
            .map(|(i, j)| self.dist(i, j))
            .collect();
        values.sort_by(|a, b| b.total_cmp(a));
        values.dedup();
        values.into_iter().find(|&b| self.is_homogeneous(b, n))
    }

    /// Finite criterion for roundness: every point has a diametral partner.
    pub fn is_round(&self) -> bool {
        self.min_eccentricity() >= self.diameter() - DEFAULT_METRIC_TOL
    }
}

/// A nonempty set of points of one space.
#[derive(Debug, Clone)]
pub struct PointSubset<'a> {
    space: &'a FiniteMetricSpace,
    indices: Vec<usize>,
}

impl<'a> PointSubset<'a> {
    /// Sorts and deduplicates `indices`; rejects empty or out-of-range input.
    pub fn new(space: &'a FiniteMetricSpace, mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySubset);
        }
        indices.sort_unstable();
        indices.dedup();
        if let Some(&last) = indices.last() {
            space.check_index(last)?;
        }
        Ok(PointSubset { space, indices })
    }

    pub fn all(space: &'a FiniteMetricSpace) -> Self {
        PointSubset { space, indices: (0..space.len()).collect() }
    }

    pub fn space(&self) -> &'a FiniteMetricSpace {
        self.space
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// `|xA|`: distance from point `i` of the ambient space to this subset.
    pub fn distance_from(&self, i: usize) -> Result<f64> {
        self.space.check_index(i)?;
        Ok(self.indices.iter().map(|&a| self.space.dist(i, a)).fold(f64::INFINITY, f64::min))
    }

    /// Nearest member of the subset to `i`, lowest index on ties.
    pub fn nearest_to(&self, i: usize) -> Result<usize> {
        self.space.check_index(i)?;
        let mut best = self.indices[0];
        for &a in &self.indices[1..] {
            if self.space.dist(i, a) < self.space.dist(i, best) {
                best = a;
            }
        }
        Ok(best)
    }

    fn same_space(&self, other: &PointSubset<'_>) -> bool {
        core::ptr::eq(self.space, other.space) || self.space == other.space
    }

    pub fn hausdorff_distance(&self, other: &PointSubset<'_>) -> Result<f64> {
        if !self.same_space(other) {
            return Err(Error::SpacesDiffer);
        }
        let one_way = |from: &PointSubset<'_>, to: &PointSubset<'_>| {
            from.indices.iter().map(|&a| to.distance_from(a).unwrap_or(0.0)).fold(0.0, f64::max)
        };
        Ok(one_way(self, other).max(one_way(other, self)))
    }

    pub fn is_separated(&self, b: f64) -> bool {
        self.space.is_separated(&self.indices, b)
    }
}

/// A point involution, validated against a space when used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Involution(Vec<usize>);

impl Involution {
    /// Accepts `map` only if it is an involution on `0..map.len()`.
    pub fn new(map: Vec<usize>) -> Result<Self> {
        for (i, &j) in map.iter().enumerate() {
            if j >= map.len() || map[j] != i {
                return Err(Error::NotAntipodalInvolution("map is not an involution"));
            }
        }
        Ok(Involution(map))
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Checks that every point is sent to a point at diametral distance.
    pub fn check_antipodal(&self, space: &FiniteMetricSpace, tol: f64) -> Result<()> {
        if self.0.len() != space.len() {
            return Err(Error::NotAntipodalInvolution("size differs from the space"));
        }
        let diameter = space.diameter();
        if self.0.iter().enumerate().any(|(i, &j)| (space.dist(i, j) - diameter).abs() > tol) {
            return Err(Error::NotAntipodalInvolution("a point is not sent to a diametral partner"));
        }
        Ok(())
    }

    /// Finds the antipodal involution when every point has exactly one
    /// diametral partner.
    pub fn detect(space: &FiniteMetricSpace, tol: f64) -> Option<Self> {
        let diameter = space.diameter();
        if space.len() < 2 || diameter <= 0.0 {
            return None;
        }
        let mut map = Vec::with_capacity(space.len());
        for i in 0..space.len() {
            let mut partners = (0..space.len()).filter(|&j| (space.dist(i, j) - diameter).abs() <= tol);
            let first = partners.next()?;
            if partners.next().is_some() {
                return None;
            }
            map.push(first);
        }
        Self::new(map).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    #[test]
    fn mesh_of_grids() {
        assert_eq!(FiniteMetricSpace::single_point("p").mesh(), 0.0);
        let c = crate::model::circle_space(12).unwrap();
        assert!((c.mesh() - PI / 6.0).abs() < 1e-12);
        let s = FiniteMetricSpace::from_matrix(&[vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 2.0], vec![3.0, 2.0, 0.0]]).unwrap();
        assert_eq!(s.mesh(), 2.0);
    }

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    fn four_circle() -> FiniteMetricSpace {
        let h = PI / 2.0;
        let m = vec![
            vec![0.0, h, PI, h],
            vec![h, 0.0, h, PI],
            vec![PI, h, 0.0, h],
            vec![h, PI, h, 0.0],
        ];
        FiniteMetricSpace::validate(&m, labels(4), DEFAULT_METRIC_TOL).unwrap()
    }

    fn line(points: &[f64]) -> FiniteMetricSpace {
        let m: Vec<Vec<f64>> =
            points.iter().map(|a| points.iter().map(|b| (a - b).abs()).collect()).collect();
        FiniteMetricSpace::from_matrix(&m).unwrap()
    }

    #[test]
    fn single_point_matrix_is_valid() {
        let s = FiniteMetricSpace::from_matrix(&[vec![0.0]]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.diameter(), 0.0);
    }

    #[test]
    fn triangle_violation_names_the_triple() {
        let m = vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]];
        assert_eq!(
            FiniteMetricSpace::from_matrix(&m),
            Err(Error::TriangleViolation { i: 0, j: 1, k: 2 })
        );
    }

    #[test]
    fn axiom_errors() {
        let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(matches!(FiniteMetricSpace::from_matrix(&asym), Err(Error::AsymmetricMatrix { .. })));
        let diag = vec![vec![0.5, 1.0], vec![1.0, 0.0]];
        assert!(matches!(FiniteMetricSpace::from_matrix(&diag), Err(Error::NonzeroDiagonal { i: 0, .. })));
        let neg = vec![vec![0.0, -1.0], vec![-1.0, 0.0]];
        assert!(matches!(FiniteMetricSpace::from_matrix(&neg), Err(Error::NegativeDistance { .. })));
        let zero = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert_eq!(FiniteMetricSpace::from_matrix(&zero), Err(Error::CoincidentPoints { i: 0, j: 1 }));
        let ragged = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(matches!(FiniteMetricSpace::from_matrix(&ragged), Err(Error::NotSquare { row: 1, .. })));
        assert_eq!(FiniteMetricSpace::from_matrix(&[]), Err(Error::EmptyMatrix));
    }

    #[test]
    fn four_point_circle_is_valid_and_round() {
        let c = four_circle();
        assert_eq!(c.diameter(), PI);
        for i in 0..4 {
            assert_eq!(c.eccentricity(i).unwrap(), PI);
        }
        assert!(c.is_round());
        assert!(c.is_homogeneous(PI, 2));
        assert_eq!(c.eccentricity(4), Err(Error::IndexOutOfRange { index: 4, len: 4 }));
    }

    #[test]
    fn segment_eccentricities() {
        let s = line(&[0.0, 0.5, 1.0]);
        assert_eq!(s.eccentricity(1).unwrap(), 0.5);
        assert_eq!(s.min_eccentricity(), 0.5);
        assert!(s.is_homogeneous(0.5, 2));
        assert!(!s.is_homogeneous(0.6, 2));
        assert!(!s.is_round());
        assert!(line(&[0.0, 2.0]).is_round());
    }

    #[test]
    fn point_set_and_hausdorff() {
        let s = line(&[0.0, 1.0, 2.0]);
        let a = PointSubset::new(&s, vec![0]).unwrap();
        let b = PointSubset::new(&s, vec![0, 2]).unwrap();
        assert_eq!(a.distance_from(0).unwrap(), 0.0);
        assert_eq!(PointSubset::new(&s, vec![2]).unwrap().distance_from(0).unwrap(), 2.0);
        assert_eq!(a.hausdorff_distance(&b).unwrap(), 2.0);
        assert_eq!(b.hausdorff_distance(&b).unwrap(), 0.0);
        assert!(matches!(PointSubset::new(&s, vec![]), Err(Error::EmptySubset)));

        let c = four_circle();
        let sub = PointSubset::new(&c, vec![1, 2]).unwrap();
        assert_eq!(sub.distance_from(0).unwrap(), PI / 2.0);
        let other = PointSubset::all(&c);
        assert_eq!(sub.hausdorff_distance(&other.clone()).unwrap(), PI / 2.0);
        assert!(matches!(a.hausdorff_distance(&other), Err(Error::SpacesDiffer)));
    }

    #[test]
    fn separated_sets() {
        let s = line(&[0.0, 1.0, 2.0]);
        assert!(s.is_separated(&[1], 100.0));
        assert!(!s.is_separated(&[0, 2], 2.0 + 1e-9));
        assert!(s.is_separated(&[0, 2], 2.0));
        assert!(four_circle().is_separated(&[0, 2], PI));
    }

    #[test]
    fn homogeneity_with_three_points() {
        // On the 4-cycle no three points are pairwise pi apart, but every
        // point sits in a pi/2-separated triple.
        let c = four_circle();
        assert!(c.is_homogeneous(PI / 2.0, 3));
        assert!(!c.is_homogeneous(PI / 2.0 + 1e-9, 3));
        assert_eq!(c.homogeneity_threshold(3), Some(PI / 2.0));
        assert_eq!(c.homogeneity_threshold(5), None);
        // On [0, 1, 2, 3] the point 1 needs a triple like {1, 3, ...}.
        let s = line(&[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(s.homogeneity_threshold(3), Some(1.0));
    }

    #[test]
    fn scaling() {
        let c = four_circle();
        assert_eq!(c.scale(1.0).unwrap(), c);
        assert_eq!(c.scale(0.0).unwrap().len(), 1);
        assert_eq!(c.scale(2.0).unwrap().diameter(), 2.0 * PI);
        assert_eq!(c.scale(-1.0), Err(Error::NegativeScale(-1.0)));
    }

    #[test]
    fn involutions() {
        let c = four_circle();
        let alpha = Involution::detect(&c, 1e-12).unwrap();
        assert_eq!(alpha.as_slice(), &[2, 3, 0, 1]);
        alpha.check_antipodal(&c, 1e-12).unwrap();
        assert!(Involution::new(vec![1, 2, 0]).is_err());
        let swap = Involution::new(vec![1, 0, 3, 2]).unwrap();
        assert!(swap.check_antipodal(&c, 1e-12).is_err());
    }
}

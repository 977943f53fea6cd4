//! Correspondences between a segment `[-lambda/2, lambda/2]` and the unit
//! circle drawn as subsets of the rectangle `Q = [-lambda/2, lambda/2] x
//! [-pi, pi]`, and the region test that decides their distortion.
//!
//! A point `(t, phi)` of `Q` relates segment coordinate `t` with the circle
//! point at angle `phi`. For two such points the discrepancy is
//! `region_f`; a set has distortion at most `a` exactly when every point lies
//! in the region `{f <= a}` centred at every other point.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Axis, Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// A point of the parameter rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QPoint {
    pub t: f64,
    pub phi: f64,
}

impl QPoint {
    pub const fn new(t: f64, phi: f64) -> Self {
        QPoint { t, phi }
    }

    /// Reflection through the origin.
    pub fn mirrored(self) -> Self {
        QPoint { t: -self.t, phi: -self.phi }
    }

    fn lerp(self, other: Self, s: f64) -> Self {
        QPoint { t: self.t + (other.t - self.t) * s, phi: self.phi + (other.phi - self.phi) * s }
    }
}

/// Canonical angle representative in `(-pi, pi]`.
pub fn wrap_angle(phi: f64) -> f64 {
    if phi > -PI && phi <= PI {
        return phi;
    }
    let r = phi - TWO_PI * libm::floor(phi / TWO_PI);
    // r in [0, 2pi)
    if r > PI {
        r - TWO_PI
    } else {
        r
    }
}

/// Discrepancy between the segment distance and the circle distance of two
/// related points:
///
/// `||t - t0| - |dphi||` if `|dphi| <= pi`, else `||t - t0| - 2pi + |dphi||`,
/// with `dphi` the difference of the canonical angle representatives.
pub fn region_f(center: QPoint, p: QPoint) -> f64 {
    let dt = (p.t - center.t).abs();
    let dphi = (wrap_angle(p.phi) - wrap_angle(center.phi)).abs();
    let along_circle = if dphi <= PI { dphi } else { TWO_PI - dphi };
    (dt - along_circle).abs()
}

/// The region `D_a(t0, phi0)`: all points within discrepancy `a` of `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionParams {
    pub a: f64,
    pub center: QPoint,
}

impl RegionParams {
    pub fn new(a: f64, center: QPoint) -> Result<Self> {
        if !(a >= 0.0) {
            return Err(Error::InvalidParameter("region threshold must be nonnegative"));
        }
        Ok(RegionParams { a, center })
    }

    pub fn contains(&self, p: QPoint) -> bool {
        region_f(self.center, p) <= self.a
    }
}

pub fn region_contains(params: &RegionParams, p: QPoint) -> bool {
    params.contains(p)
}

/// True iff each point of `points` lies in `D_a` centred at every point,
/// i.e. the relation has distortion at most `a`.
pub fn geomcalc_check(points: &[QPoint], a: f64) -> bool {
    // Regions with a negative threshold are empty, even of their centre.
    if a < 0.0 {
        return points.is_empty();
    }
    points.iter().enumerate().all(|(i, &center)| {
        let region = RegionParams { a, center };
        points[i + 1..].iter().all(|&p| region.contains(p))
    })
}

/// Largest `region_f` over all pairs: the distortion of a finite relation.
pub fn point_set_distortion(points: &[QPoint]) -> f64 {
    let mut worst = 0.0f64;
    for (i, &p) in points.iter().enumerate() {
        for &q in &points[i + 1..] {
            let v = region_f(p, q);
            if v > worst {
                worst = v;
            }
        }
    }
    worst
}

/// A straight piece of a piecewise-linear correspondence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: QPoint,
    pub end: QPoint,
}

impl Segment {
    pub const fn new(start: QPoint, end: QPoint) -> Self {
        Segment { start, end }
    }

    pub fn length(&self) -> f64 {
        libm::hypot(self.end.t - self.start.t, self.end.phi - self.start.phi)
    }

    pub fn mirrored(&self) -> Self {
        Segment { start: self.start.mirrored(), end: self.end.mirrored() }
    }

    /// The part of the segment with `|t| <= half_width`, if any.
    pub fn clip_t(&self, half_width: f64) -> Option<Self> {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let dt = self.end.t - self.start.t;
        for sign in [1.0, -1.0] {
            let a = sign * self.start.t;
            let b = sign * dt;
            if b == 0.0 {
                if a > half_width {
                    return None;
                }
            } else if b > 0.0 {
                hi = hi.min((half_width - a) / b);
            } else {
                lo = lo.max((half_width - a) / b);
            }
        }
        if lo > hi {
            return None;
        }
        let mut clipped =
            Segment { start: self.start.lerp(self.end, lo), end: self.start.lerp(self.end, hi) };
        // Land exactly on the boundary rather than a rounding error past it.
        for p in [&mut clipped.start, &mut clipped.end] {
            p.t = p.t.clamp(-half_width, half_width);
        }
        Some(clipped)
    }
}

/// A union of segments in `Q` for a segment of length `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct PLCorrespondence {
    lambda: f64,
    segments: Vec<Segment>,
}

const Q_TOL: f64 = 1e-12;

/// Samples of a [`PLCorrespondence`] and the resulting distortion estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct PlDistortion {
    /// Largest `region_f` over sampled pairs.
    pub value: f64,
    /// Bound on how far the continuous supremum can exceed `value`.
    pub error_bound: f64,
    pub samples: usize,
}

impl PLCorrespondence {
    /// Checks that every endpoint lies in `Q`; coverage is checked by
    /// [`sample`](Self::sample).
    pub fn new(lambda: f64, segments: Vec<Segment>) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter("PL correspondence needs lambda > 0"));
        }
        if segments.is_empty() {
            return Err(Error::InvalidParameter("PL correspondence needs at least one segment"));
        }
        let half = lambda / 2.0;
        for s in &segments {
            for p in [s.start, s.end] {
                let inside = p.t.is_finite()
                    && p.phi.is_finite()
                    && p.t.abs() <= half + Q_TOL
                    && p.phi.abs() <= PI + Q_TOL;
                if !inside {
                    return Err(Error::OutsideRectangle { t: p.t, phi: p.phi, lambda });
                }
            }
        }
        Ok(PLCorrespondence { lambda, segments })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Restricts to `|t| <= lambda/2` for a shorter segment.
    pub fn clipped(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= self.lambda) {
            return Err(Error::InvalidParameter("clipping needs 0 < lambda <= current lambda"));
        }
        let half = lambda / 2.0;
        Self::new(lambda, self.segments.iter().filter_map(|s| s.clip_t(half)).collect())
    }

    /// Drops segment `index`.
    pub fn without(&self, index: usize) -> Result<Self> {
        let mut segments = self.segments.clone();
        if index >= segments.len() {
            return Err(Error::InvalidParameter("segment index out of range"));
        }
        segments.remove(index);
        Self::new(self.lambda, segments)
    }

    /// Points along every segment at spacing at most `step`, endpoints
    /// included; fails if a projection leaves a gap wider than `step`.
    ///
    /// Each segment is cut into a power-of-two number of equal pieces, so
    /// the samples for `step / 2` contain those for `step`.
    pub fn sample(&self, step: f64) -> Result<Vec<QPoint>> {
        let points = self.sample_unchecked(step)?;
        self.check_coverage(&points, step)?;
        Ok(points)
    }

    fn sample_unchecked(&self, step: f64) -> Result<Vec<QPoint>> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidStep(step));
        }
        let mut points = Vec::new();
        for s in &self.segments {
            let pieces = libm::ceil(s.length() / step).max(1.0) as usize;
            let pieces = pieces.next_power_of_two();
            points.extend((0..=pieces).map(|k| s.start.lerp(s.end, k as f64 / pieces as f64)));
        }
        Ok(points)
    }

    fn check_coverage(&self, points: &[QPoint], step: f64) -> Result<()> {
        let tol = step + Q_TOL;
        let half = self.lambda / 2.0;
        let mut ts: Vec<f64> = points.iter().map(|p| p.t).collect();
        ts.sort_by(f64::total_cmp);
        let mut prev = -half;
        for &t in ts.iter().chain(core::iter::once(&half)) {
            if t - prev > tol {
                return Err(Error::CoverageGap { axis: Axis::T, at: prev, width: t - prev });
            }
            prev = prev.max(t);
        }
        let mut phis: Vec<f64> = points.iter().map(|p| wrap_angle(p.phi)).collect();
        phis.sort_by(f64::total_cmp);
        for w in phis.windows(2) {
            if w[1] - w[0] > tol {
                return Err(Error::CoverageGap { axis: Axis::Phi, at: w[0], width: w[1] - w[0] });
            }
        }
        let wrap = phis[0] + TWO_PI - phis[phis.len() - 1];
        if wrap > tol {
            return Err(Error::CoverageGap { axis: Axis::Phi, at: phis[phis.len() - 1], width: wrap });
        }
        Ok(())
    }

    /// Sampled distortion with its error bound `4 * step`.
    pub fn distortion(&self, step: f64) -> Result<PlDistortion> {
        let points = self.sample(step)?;
        Ok(PlDistortion {
            value: point_set_distortion(&points),
            error_bound: 4.0 * step,
            samples: points.len(),
        })
    }

    /// Whether the sampled relation passes the region test at `a`.
    pub fn check(&self, a: f64, step: f64) -> Result<bool> {
        Ok(geomcalc_check(&self.sample(step)?, a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn region_f_examples() {
        let o = QPoint::new(0.0, 0.0);
        assert_eq!(region_f(o, o), 0.0);
        assert_eq!(region_f(o, QPoint::new(0.7, 0.0)), 0.7);
        assert_eq!(region_f(o, QPoint::new(0.0, PI)), PI);
        // pi and -pi are the same circle point.
        assert_eq!(region_f(QPoint::new(0.0, PI), QPoint::new(0.0, -PI)), 0.0);
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0);
    }

    #[test]
    fn region_membership() {
        let o = QPoint::new(0.0, 0.0);
        let a = 0.5;
        let r = RegionParams::new(a, o).unwrap();
        assert!(r.contains(o));
        assert!(!r.contains(QPoint::new(a + 1e-9, 0.0)));
        for t in [-3.0, -1.0, 0.3, 2.5] {
            assert!(region_contains(&r, QPoint::new(t, t)));
        }
        assert!(RegionParams::new(-1.0, o).is_err());
    }

    #[test]
    fn geomcalc_examples() {
        assert!(geomcalc_check(&[QPoint::new(0.3, 1.0)], 0.0));
        let pair = [QPoint::new(0.0, 0.0), QPoint::new(0.0, PI)];
        assert!(geomcalc_check(&pair, PI));
        assert!(!geomcalc_check(&pair, PI - 1e-9));
    }

    #[test]
    fn diagonal_covers_both_axes() {
        let lambda = 2.0 * PI;
        let diag = Segment::new(QPoint::new(-PI, -PI), QPoint::new(PI, PI));
        let pl = PLCorrespondence::new(lambda, vec![diag]).unwrap();
        let step = 0.01;
        let samples = pl.sample(step).unwrap();
        assert!(samples.len() as f64 >= diag.length() / step);
        let flat = Segment::new(QPoint::new(-PI, 0.0), QPoint::new(PI, 0.0));
        let flat = PLCorrespondence::new(lambda, vec![flat]).unwrap();
        assert!(matches!(flat.sample(step), Err(Error::CoverageGap { axis: Axis::Phi, .. })));
    }

    #[test]
    fn endpoints_must_lie_in_rectangle() {
        let s = Segment::new(QPoint::new(0.0, 0.0), QPoint::new(2.0, 0.0));
        assert!(matches!(PLCorrespondence::new(3.0, vec![s]), Err(Error::OutsideRectangle { .. })));
    }

    #[test]
    fn clipping() {
        let s = Segment::new(QPoint::new(-2.0, -1.0), QPoint::new(2.0, 1.0));
        let c = s.clip_t(1.0).unwrap();
        assert_eq!(c.start, QPoint::new(-1.0, -0.5));
        assert_eq!(c.end, QPoint::new(1.0, 0.5));
        let far = Segment::new(QPoint::new(1.5, 0.0), QPoint::new(2.0, 1.0));
        assert!(far.clip_t(1.0).is_none());
        let vertical = Segment::new(QPoint::new(0.5, -1.0), QPoint::new(0.5, 1.0));
        assert_eq!(vertical.clip_t(1.0), Some(vertical));
    }
}

//! Distance between a segment of length `lambda` and the unit circle with
//! its intrinsic metric: the closed form, a certificate for each range of
//! `lambda`, matching lower bounds, and the sweep over `lambda`.
//!
//! Ranges, by breakpoint:
//!
//! | regime | lambda               | upper certificate                       |
//! |--------|----------------------|-----------------------------------------|
//! | A      | `[0, 2pi/3]`         | wrap the segment once                   |
//! | B1     | `(2pi/3, 7pi/6]`     | wrap three times                        |
//! | B2     | `(7pi/6, 5pi/3)`     | the `5pi/3` PL relation, clipped        |
//! | C1     | `[5pi/3, 2pi)`       | anchored PL relation                    |
//! | C2     | `[2pi, inf)`         | nearest points on a circle with whiskers |

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::bounds::{diam_diff_lower, involution_lower, round_lower, BoundKind, BoundRecord, BoundSource};
use crate::correspondence::{nearest_point_correspondence, wrap_once, wrap_triple, Correspondence, SampledMap};
use crate::error::{Error, Result};
use crate::model::{antipodal_map, circle_space, whisker_graph, CircleGrid, LineGrid};
use crate::nonlinearity::LipschitzWitness;
use crate::region::{PLCorrespondence, QPoint, Segment};

pub const BREAK_AB: f64 = 2.0 * PI / 3.0;
pub const BREAK_B: f64 = 7.0 * PI / 6.0;
pub const BREAK_BC: f64 = 5.0 * PI / 3.0;
pub const BREAK_C: f64 = 2.0 * PI;

/// `pi/2 - lambda/4` up to `2pi/3`, then `pi/3` up to `5pi/3`, then
/// `(lambda - pi)/2`.
pub fn gh_formula(lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::NegativeLambda(lambda));
    }
    Ok(if lambda <= BREAK_AB {
        PI / 2.0 - lambda / 4.0
    } else if lambda <= BREAK_BC {
        PI / 3.0
    } else {
        (lambda - PI) / 2.0
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Regime {
    A,
    B1,
    B2,
    C1,
    C2,
}

impl Regime {
    pub fn of(lambda: f64) -> Result<Regime> {
        if !(lambda >= 0.0) {
            return Err(Error::NegativeLambda(lambda));
        }
        Ok(if lambda <= BREAK_AB {
            Regime::A
        } else if lambda <= BREAK_B {
            Regime::B1
        } else if lambda < BREAK_BC {
            Regime::B2
        } else if lambda < BREAK_C {
            Regime::C1
        } else {
            Regime::C2
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::A => "A",
            Regime::B1 => "B1",
            Regime::B2 => "B2",
            Regime::C1 => "C1",
            Regime::C2 => "C2",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Discretization used by certificates and bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grids {
    /// Points on the circle; must be even.
    pub n_circle: usize,
    /// Intervals on the segment grid, which has `m_grid + 1` points.
    pub m_grid: usize,
    /// Sampling step for piecewise-linear relations.
    pub pl_step: f64,
    /// Edges per whisker; `None` matches the whisker spacing to the circle.
    pub n_whisker: Option<usize>,
}

impl Default for Grids {
    fn default() -> Self {
        Grids { n_circle: 720, m_grid: 720, pl_step: PI / 720.0, n_whisker: None }
    }
}

impl Grids {
    pub fn validate(&self) -> Result<()> {
        if self.n_circle < 4 {
            return Err(Error::TooFewPoints { min: 4, got: self.n_circle });
        }
        if self.n_circle % 2 != 0 {
            return Err(Error::OddOrder(self.n_circle));
        }
        if self.m_grid < 1 {
            return Err(Error::GridTooCoarse("segment grid needs at least one interval"));
        }
        if !(self.pl_step.is_finite() && self.pl_step > 0.0) {
            return Err(Error::InvalidStep(self.pl_step));
        }
        if self.n_whisker == Some(0) {
            return Err(Error::TooFewPoints { min: 1, got: 0 });
        }
        Ok(())
    }

    pub fn circle_step(&self) -> f64 {
        2.0 * PI / self.n_circle as f64
    }

    fn whisker_edges(&self, lambda: f64) -> usize {
        self.n_whisker.unwrap_or_else(|| {
            let whisker = (lambda - PI) / 2.0;
            (libm::ceil(whisker / self.circle_step() - 1e-9) as usize).max(1)
        })
    }

    /// Allowed gap between a construction's measured half-distortion and the
    /// closed form.
    pub fn upper_slack(&self, regime: Regime, lambda: f64) -> f64 {
        match regime {
            Regime::A | Regime::B1 => self.circle_step() + lambda / self.m_grid as f64,
            Regime::B2 | Regime::C1 => 2.0 * self.pl_step,
            Regime::C2 => {
                let piece = (lambda - PI) / 2.0 / self.whisker_edges(lambda) as f64;
                2.0 * self.circle_step().max(piece)
            }
        }
    }
}

/// The relation realized by a certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum Construction {
    /// A correspondence between a point grid on the segment and the circle
    /// grid with `circle_points` points.
    Finite { positions: Vec<f64>, circle_points: usize, correspondence: Correspondence },
    /// A union of segments in the parameter rectangle, sampled at `step`.
    Pl { relation: PLCorrespondence, step: f64 },
}

/// How a piecewise-linear certificate was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CertificatePath {
    /// Built directly from a closed-form map or a Hausdorff pair.
    Direct,
    /// The anchored relation with connectors meeting the diagonal at
    /// `(attach, attach)`; `attach = pi/2` is the anchor point itself.
    Anchored { attach: f64 },
    /// The anchored relation failed and the connector attachment was chosen
    /// by search among `tried` candidates.
    Searched { attach: f64, tried: usize },
    /// The `5pi/3` relation restricted to the shorter segment.
    Clipped { attach: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentCircleCertificate {
    pub lambda: f64,
    pub regime: Regime,
    pub construction: Construction,
    /// Distortion of the construction as measured.
    pub measured: f64,
    pub path: CertificatePath,
    /// Allowed gap between `measured / 2` and the closed form.
    pub slack: f64,
    /// Hausdorff distance between the circle and the whisker path, for C2.
    pub hausdorff: Option<f64>,
}

impl SegmentCircleCertificate {
    pub fn half_distortion(&self) -> f64 {
        self.measured / 2.0
    }
}

fn finite_from_map(map: SampledMap) -> Construction {
    Construction::Finite {
        positions: map.segment.positions().to_vec(),
        circle_points: map.circle.points(),
        correspondence: map.correspondence,
    }
}

/// Recomputes the distortion of a construction from its data alone.
pub fn replay(construction: &Construction) -> Result<f64> {
    match construction {
        Construction::Finite { positions, circle_points, correspondence } => {
            let segment = LineGrid::new(positions.clone())?;
            let circle = CircleGrid::new(*circle_points)?;
            correspondence.distortion(&segment, &circle)
        }
        Construction::Pl { relation, step } => Ok(relation.distortion(*step)?.value),
    }
}

/// The relation for `lambda` in `[5pi/3, 3pi]`: the diagonal through the
/// origin out to `C = ((lambda+pi)/4, (lambda+pi)/4)`, the anti-diagonal from
/// `A = (lambda/2 - pi/2, pi)` through `C` to `D = (lambda/2, pi/2)`, the
/// connector from `A` to `(attach, attach)` on the diagonal, and the
/// reflections of all of these through the origin.
pub fn anchored_relation(lambda: f64, attach: Option<f64>) -> Result<PLCorrespondence> {
    if !(lambda >= BREAK_BC - 1e-12 && lambda <= 3.0 * PI + 1e-12) {
        return Err(Error::LambdaOutOfRange { lambda, min: BREAK_BC, max: 3.0 * PI });
    }
    let a = QPoint::new(lambda / 2.0 - PI / 2.0, PI);
    let c = QPoint::new((lambda + PI) / 4.0, (lambda + PI) / 4.0);
    let d = QPoint::new(lambda / 2.0, PI / 2.0);
    let mut segments = vec![Segment::new(c.mirrored(), c), Segment::new(a, d)];
    if let Some(s) = attach {
        segments.push(Segment::new(a, QPoint::new(s, s)));
    }
    let mirrored: Vec<Segment> = segments[1..].iter().map(Segment::mirrored).collect();
    segments.extend(mirrored);
    PLCorrespondence::new(lambda, segments)
}

/// The anchored attachment point `B = (pi/2, pi/2)`.
pub const ANCHOR_ATTACH: f64 = PI / 2.0;

/// Number of attachment points tried by [`search_attachment`].
pub const ATTACH_CANDIDATES: usize = 33;

/// Chooses the connector attachment along the diagonal that minimizes the
/// sampled distortion of `relation_for(attach)`, scanning `[0, (lambda+pi)/4]`.
/// Candidates that fail coverage are skipped.
pub fn search_attachment(
    lambda: f64,
    step: f64,
    relation_for: impl Fn(f64) -> Result<PLCorrespondence>,
) -> Result<(f64, PLCorrespondence, f64)> {
    let top = (lambda + PI) / 4.0;
    let mut best: Option<(f64, PLCorrespondence, f64)> = None;
    for k in 0..ATTACH_CANDIDATES {
        let attach = top * k as f64 / (ATTACH_CANDIDATES - 1) as f64;
        let relation = relation_for(attach)?;
        let Ok(d) = relation.distortion(step) else { continue };
        if best.as_ref().map_or(true, |b| d.value < b.2) {
            best = Some((attach, relation, d.value));
        }
    }
    best.ok_or(Error::GridTooCoarse("no attachment covers both axes"))
}

fn pl_certificate(
    lambda: f64,
    regime: Regime,
    grids: &Grids,
    target: f64,
    relation_for: impl Fn(f64) -> Result<PLCorrespondence>,
    anchored_path: fn(f64) -> CertificatePath,
) -> Result<SegmentCircleCertificate> {
    let slack = grids.upper_slack(regime, lambda);
    let limit = target + 2.0 * slack;
    let anchored = relation_for(ANCHOR_ATTACH)?;
    let (relation, measured, path) = match anchored.distortion(grids.pl_step) {
        Ok(d) if d.value <= limit => (anchored, d.value, anchored_path(ANCHOR_ATTACH)),
        _ => {
            let (attach, relation, value) = search_attachment(lambda, grids.pl_step, relation_for)?;
            (relation, value, CertificatePath::Searched { attach, tried: ATTACH_CANDIDATES })
        }
    };
    if measured > limit {
        return Err(Error::CertificateFailed { measured, target });
    }
    Ok(SegmentCircleCertificate {
        lambda,
        regime,
        construction: Construction::Pl { relation, step: grids.pl_step },
        measured,
        path,
        slack,
        hausdorff: None,
    })
}

/// An upper-bound certificate for `lambda`, chosen by regime.
///
/// Fails with `CertificateFailed` if the measured distortion exceeds twice
/// the closed form plus twice the regime slack.
pub fn certificate(lambda: f64, grids: &Grids) -> Result<SegmentCircleCertificate> {
    grids.validate()?;
    let formula = gh_formula(lambda)?;
    let target = 2.0 * formula;
    let regime = Regime::of(lambda)?;
    let slack = grids.upper_slack(regime, lambda);
    let finite = |construction: Construction, hausdorff: Option<f64>| -> Result<SegmentCircleCertificate> {
        let measured = replay(&construction)?;
        if measured > target + 2.0 * slack {
            return Err(Error::CertificateFailed { measured, target });
        }
        Ok(SegmentCircleCertificate {
            lambda,
            regime,
            construction,
            measured,
            path: CertificatePath::Direct,
            slack,
            hausdorff,
        })
    };
    match regime {
        Regime::A if lambda == 0.0 => {
            let correspondence = Correspondence::full_product(1, grids.n_circle)?;
            finite(Construction::Finite { positions: vec![0.0], circle_points: grids.n_circle, correspondence }, None)
        }
        Regime::A => finite(finite_from_map(wrap_once(lambda, grids.m_grid + 1, grids.n_circle)?), None),
        Regime::B1 => finite(finite_from_map(wrap_triple(lambda, grids.m_grid + 1, grids.n_circle)?), None),
        Regime::B2 => pl_certificate(
            lambda,
            regime,
            grids,
            target,
            |attach| anchored_relation(BREAK_BC, Some(attach))?.clipped(lambda),
            |attach| CertificatePath::Clipped { attach },
        ),
        Regime::C1 => pl_certificate(
            lambda,
            regime,
            grids,
            target,
            |attach| anchored_relation(lambda, Some(attach)),
            |attach| CertificatePath::Anchored { attach },
        ),
        Regime::C2 => {
            let w = whisker_graph(lambda, grids.n_circle, grids.whisker_edges(lambda))?;
            let pairing = nearest_point_correspondence(&w.z_subset(), &w.y_subset())?;
            // Re-index the whisker path by arc length and the circle vertices by angle.
            let z_sorted = w.z_subset().indices().to_vec();
            let z_rank: Vec<usize> = z_sorted
                .iter()
                .map(|v| w.z.iter().position(|u| u == v).expect("z member"))
                .collect();
            let y_sorted = w.y_subset().indices().to_vec();
            let pairs = pairing
                .correspondence
                .pairs()
                .iter()
                .map(|&(iz, iy)| (z_rank[iz], y_sorted[iy]))
                .collect();
            let correspondence = Correspondence::new(pairs, w.z.len(), grids.n_circle)?;
            finite(
                Construction::Finite { positions: w.z_positions.clone(), circle_points: grids.n_circle, correspondence },
                Some(pairing.hausdorff),
            )
        }
    }
}

/// The best of the round, involution and diameter bounds on the grids.
///
/// The involution bound uses the coordinate function on the segment grid as
/// its nonlinearity witness and carries slack `2pi / n_circle`.
pub fn lower_bound(lambda: f64, grids: &Grids) -> Result<BoundRecord> {
    grids.validate()?;
    if !(lambda >= 0.0) {
        return Err(Error::NegativeLambda(lambda));
    }
    let circle = circle_space(grids.n_circle)?;
    let segment_grid = LineGrid::uniform(lambda, grids.m_grid + 1)?;
    let segment = segment_grid.to_space();
    let mut candidates = vec![round_lower(&circle, &segment)?, diam_diff_lower(&circle, &segment)];
    let witness = LipschitzWitness::from_values(&segment, segment_grid.positions().to_vec())?;
    let alpha = antipodal_map(grids.n_circle)?;
    match involution_lower(&circle, &alpha, &segment, &witness, grids.circle_step()) {
        Ok(r) => candidates.push(r),
        Err(Error::CExceedsDiameter { .. }) => {}
        Err(e) => return Err(e),
    }
    let best = candidates
        .into_iter()
        .reduce(|best, r| if r.value - r.slack > best.value - best.slack { r } else { best })
        .expect("at least two candidates");
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub lambda: f64,
    pub formula: f64,
    pub lower: BoundRecord,
    pub upper: BoundRecord,
    pub regime: Regime,
    /// Largest of the lower and upper slacks.
    pub slack: f64,
    pub path: CertificatePath,
}

impl RegimeReport {
    /// `lower - slack <= formula <= upper + slack`.
    pub fn consistent(&self) -> bool {
        self.lower.value - self.slack <= self.formula && self.formula <= self.upper.value + self.slack
    }
}

pub fn regime_report(lambda: f64, grids: &Grids) -> Result<RegimeReport> {
    let formula = gh_formula(lambda)?;
    let cert = certificate(lambda, grids)?;
    let lower = lower_bound(lambda, grids)?;
    let mut upper = BoundRecord::new(
        BoundKind::Upper,
        cert.half_distortion(),
        BoundSource::Construction { name: cert.regime.name() },
    );
    upper.slack = cert.slack;
    Ok(RegimeReport {
        lambda,
        formula,
        slack: lower.slack.max(upper.slack),
        lower,
        upper,
        regime: cert.regime,
        path: cert.path,
    })
}

/// `steps` evenly spaced values from `from` to `to` inclusive.
pub fn sweep_lambdas(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if !(from >= 0.0) {
        return Err(Error::NegativeLambda(from));
    }
    if !(to >= from && to.is_finite()) {
        return Err(Error::InvalidParameter("sweep needs from <= to"));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("sweep needs at least one step"));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|k| if k == steps - 1 { to } else { from + (to - from) * (k as f64 / last) }).collect())
}

pub fn sweep(from: f64, to: f64, steps: usize, grids: &Grids) -> Result<Vec<RegimeReport>> {
    sweep_lambdas(from, to, steps)?.into_iter().map(|l| regime_report(l, grids)).collect()
}

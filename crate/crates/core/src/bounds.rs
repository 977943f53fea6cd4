//! Lower and upper bounds on the Gromov-Hausdorff distance, each returned as
//! a [`BoundRecord`] that names the rule it came from and, for upper bounds,
//! carries a certificate that can be replayed.

use alloc::vec::Vec;

use crate::correspondence::Correspondence;
use crate::error::{Error, Result};
use crate::exact::{gh_exact, SearchOptions, SearchStatus};
use crate::metric::{FiniteMetricSpace, Involution, Metric, DEFAULT_METRIC_TOL};
use crate::nonlinearity::{
    c_exact, c_heuristic, lipschitz_image, ExactOptions, LipschitzWitness, DEFAULT_LIP_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundKind {
    Lower,
    Exact,
    Upper,
}

/// Which rule produced a bound, with the parameters it used.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundSource {
    /// One side is a single point: the distance is half the other diameter.
    SinglePoint,
    /// Half the difference of diameters.
    DiameterDifference,
    /// Half the larger diameter, witnessed by the full product.
    MaxDiameter,
    /// `(b, n)`-homogeneity of one side against its failure on the other.
    Homogeneity { n: usize, b: f64, a: f64, swapped: bool },
    /// Roundness of one side against the other's minimum eccentricity.
    Round { a: f64, swapped: bool },
    /// Antipodal involution on one side and a nonlinearity bound `c` on the other.
    Involution { c: f64, swapped: bool },
    /// Distance from a space to its image on the line under a witness.
    LipschitzImage { c: f64 },
    /// Branch-and-bound optimum.
    BranchAndBound,
    /// Measured distortion of a named segment-circle construction.
    Construction { name: &'static str },
}

impl BoundSource {
    pub fn tag(&self) -> &'static str {
        match self {
            BoundSource::SinglePoint => "single_point",
            BoundSource::DiameterDifference => "diam_diff",
            BoundSource::MaxDiameter => "max_diam",
            BoundSource::Homogeneity { .. } => "homogeneity",
            BoundSource::Round { .. } => "round",
            BoundSource::Involution { .. } => "involution",
            BoundSource::LipschitzImage { .. } => "lipschitz_image",
            BoundSource::BranchAndBound => "exact",
            BoundSource::Construction { name } => name,
        }
    }
}

/// Replayable evidence for a bound.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Relation between the two spaces of the record; `distortion / 2`
    /// replays the value.
    Correspondence(Correspondence),
    /// A witness for the nonlinearity degree used by the bound.
    Witness(LipschitzWitness),
    /// Image of the first space on the line and the graph correspondence.
    LineImage { positions: Vec<f64>, correspondence: Correspondence },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRecord {
    pub kind: BoundKind,
    pub value: f64,
    pub source: BoundSource,
    pub certificate: Option<Certificate>,
    /// The underlying formula was negative; `value` is 0.
    pub vacuous: bool,
    /// The rule is proved for connected spaces and is applied to a
    /// discretization; `slack` bounds the discretization error.
    pub continuous_hypothesis: bool,
    pub slack: f64,
}

impl BoundRecord {
    pub(crate) fn new(kind: BoundKind, raw: f64, source: BoundSource) -> Self {
        let vacuous = raw < 0.0;
        BoundRecord {
            kind,
            value: if vacuous { 0.0 } else { raw },
            source,
            certificate: None,
            vacuous,
            continuous_hypothesis: false,
            slack: 0.0,
        }
    }

    fn with_certificate(mut self, certificate: Certificate) -> Self {
        self.certificate = Some(certificate);
        self
    }
}

/// Exact distance when either space is a single point.
pub fn single_point_rule(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<BoundRecord> {
    let other = if x.len() == 1 {
        y
    } else if y.len() == 1 {
        x
    } else {
        return Err(Error::NotSinglePoint);
    };
    Ok(BoundRecord::new(BoundKind::Exact, other.diameter() / 2.0, BoundSource::SinglePoint)
        .with_certificate(Certificate::Correspondence(Correspondence::full_product(x.len(), y.len())?)))
}

pub fn diam_diff_lower(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> BoundRecord {
    BoundRecord::new(
        BoundKind::Lower,
        (x.diameter() - y.diameter()).abs() / 2.0,
        BoundSource::DiameterDifference,
    )
}

pub fn max_diam_upper(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> BoundRecord {
    let product = Correspondence::full_product(x.len(), y.len()).expect("spaces are nonempty");
    BoundRecord::new(BoundKind::Upper, x.diameter().max(y.diameter()) / 2.0, BoundSource::MaxDiameter)
        .with_certificate(Certificate::Correspondence(product))
}

fn homogeneity_one_way(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    n: usize,
    swapped: bool,
) -> Option<BoundRecord> {
    let b = x.homogeneity_threshold(n)?;
    // Y fails (a, n)-homogeneity for every a above its threshold; a space
    // with fewer than n points fails for every a > 0.
    let a = y.homogeneity_threshold(n).unwrap_or(0.0);
    Some(BoundRecord::new(
        BoundKind::Lower,
        (b - a) / 2.0,
        BoundSource::Homogeneity { n, b, a, swapped },
    ))
}

/// Best bound from `(b, n)`-homogeneity of `x` against `y` and of `y`
/// against `x`.
pub fn homogeneity_lower(x: &FiniteMetricSpace, y: &FiniteMetricSpace, n: usize) -> BoundRecord {
    let forward = homogeneity_one_way(x, y, n, false);
    let backward = homogeneity_one_way(y, x, n, true);
    let best = match (forward, backward) {
        (Some(f), Some(b)) => {
            if b.value > f.value {
                b
            } else {
                f
            }
        }
        (Some(r), None) | (None, Some(r)) => r,
        (None, None) => BoundRecord::new(
            BoundKind::Lower,
            -1.0,
            BoundSource::Homogeneity { n, b: 0.0, a: 0.0, swapped: false },
        ),
    };
    best
}

/// Bound for a round `x`: half of `diam X` minus the minimum eccentricity of `y`.
pub fn round_lower(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<BoundRecord> {
    if !x.is_round() {
        return Err(Error::NotRound);
    }
    let a = y.min_eccentricity();
    Ok(BoundRecord::new(
        BoundKind::Lower,
        (x.diameter() - a) / 2.0,
        BoundSource::Round { a, swapped: false },
    ))
}

/// `(diam X - c(Y)) / 3` for `x` with an antipodal involution and `c(Y)`
/// bounded by a verified witness on `y`.
///
/// The rule holds for connected `X`; on a discretization it is
/// flagged `continuous_hypothesis` with `slack = x_step`, the grid spacing
/// supplied by the caller.
pub fn involution_lower(
    x: &FiniteMetricSpace,
    alpha: &Involution,
    y: &FiniteMetricSpace,
    c_witness: &LipschitzWitness,
    x_step: f64,
) -> Result<BoundRecord> {
    alpha.check_antipodal(x, DEFAULT_METRIC_TOL)?;
    let c = c_witness.verify(y, DEFAULT_LIP_TOL)?;
    involution_lower_value(x.diameter(), c, x_step)
        .map(|r| r.with_certificate(Certificate::Witness(c_witness.clone())))
}

/// The bare formula behind [`involution_lower`], for a trusted `c`.
pub fn involution_lower_value(diameter: f64, c: f64, x_step: f64) -> Result<BoundRecord> {
    if !(c >= 0.0) {
        return Err(Error::InvalidParameter("nonlinearity bound must be nonnegative"));
    }
    if c >= diameter {
        return Err(Error::CExceedsDiameter { c, diameter });
    }
    let mut record = BoundRecord::new(
        BoundKind::Lower,
        (diameter - c) / 3.0,
        BoundSource::Involution { c, swapped: false },
    );
    record.continuous_hypothesis = true;
    record.slack = x_step;
    Ok(record)
}

/// Upper bound on the distance from `x` to a subset of the line: half the
/// best available nonlinearity bound, certified by the graph of the witness.
pub fn lipschitz_image_upper(x: &FiniteMetricSpace) -> Result<BoundRecord> {
    let witness = match c_exact(x, ExactOptions::default()) {
        Ok(w) => w,
        Err(Error::TooLarge { .. }) => c_heuristic(x, 4, 0),
        Err(e) => return Err(e),
    };
    let image = lipschitz_image(x, &witness)?;
    let distortion = image.correspondence.distortion(x, &image.image)?;
    Ok(BoundRecord::new(
        BoundKind::Upper,
        distortion / 2.0,
        BoundSource::LipschitzImage { c: witness.objective() },
    )
    .with_certificate(Certificate::LineImage {
        positions: image.positions,
        correspondence: image.correspondence,
    }))
}

/// Options for [`best_bounds`].
#[derive(Debug, Clone, Default)]
pub struct BoundOptions {
    /// Antipodal involution on `x`, or on `y` when `involution_on_y` is set.
    pub involution: Option<Involution>,
    pub involution_on_y: bool,
    /// Witness for the nonlinearity degree of the other side; computed by
    /// search when absent.
    pub c_witness: Option<LipschitzWitness>,
    /// Grid spacing reported as slack on the involution bound.
    pub involution_slack: f64,
    /// Also run the exact solver when both spaces are small enough.
    pub exact: Option<SearchOptions>,
    /// Extra homogeneity orders beyond `n = 2`.
    pub homogeneity_orders: Vec<usize>,
}

fn swapped(mut r: BoundRecord) -> BoundRecord {
    match &mut r.source {
        BoundSource::Round { swapped, .. } | BoundSource::Involution { swapped, .. } => *swapped = true,
        _ => {}
    }
    r
}

/// Runs every applicable rule and returns the records sorted by kind, then
/// by descending value for lower bounds and ascending value otherwise.
///
/// Fails with `InconsistentBounds` if some lower bound exceeds some upper
/// bound beyond their combined slack, which would indicate a bug.
pub fn best_bounds(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    options: &BoundOptions,
) -> Result<Vec<BoundRecord>> {
    let mut records = Vec::new();
    if let Ok(r) = single_point_rule(x, y) {
        records.push(r);
    }
    records.push(diam_diff_lower(x, y));
    records.push(max_diam_upper(x, y));
    records.push(homogeneity_lower(x, y, 2));
    for &n in &options.homogeneity_orders {
        if n > 2 {
            records.push(homogeneity_lower(x, y, n));
        }
    }
    if let Ok(r) = round_lower(x, y) {
        records.push(r);
    }
    if let Ok(r) = round_lower(y, x) {
        records.push(swapped(r));
    }
    if let Some(alpha) = &options.involution {
        let (with_alpha, other) = if options.involution_on_y { (y, x) } else { (x, y) };
        let witness = match &options.c_witness {
            Some(w) => w.clone(),
            None => c_heuristic(other, 4, 0),
        };
        match involution_lower(with_alpha, alpha, other, &witness, options.involution_slack) {
            Ok(r) => records.push(if options.involution_on_y { swapped(r) } else { r }),
            Err(Error::CExceedsDiameter { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if let Some(search) = &options.exact {
        if x.len() <= search.max_points && y.len() <= search.max_points {
            let solution = gh_exact(x, y, search)?;
            let kind = match solution.status {
                SearchStatus::Optimal => BoundKind::Exact,
                SearchStatus::Upper => BoundKind::Upper,
            };
            records.push(
                BoundRecord::new(kind, solution.value, BoundSource::BranchAndBound)
                    .with_certificate(Certificate::Correspondence(solution.correspondence)),
            );
        }
    }

    let lower = records
        .iter()
        .filter(|r| r.kind != BoundKind::Upper)
        .map(|r| r.value - r.slack)
        .fold(0.0, f64::max);
    let upper = records
        .iter()
        .filter(|r| r.kind != BoundKind::Lower)
        .map(|r| r.value + r.slack)
        .fold(f64::INFINITY, f64::min);
    if lower > upper + 1e-9 * (1.0 + upper) {
        return Err(Error::InconsistentBounds { lower, upper });
    }

    records.sort_by(|a, b| {
        a.kind.cmp(&b.kind).then_with(|| match a.kind {
            BoundKind::Lower => b.value.total_cmp(&a.value),
            _ => a.value.total_cmp(&b.value),
        })
        .then_with(|| a.source.tag().cmp(b.source.tag()))
    });
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{antipodal_map, circle_space, segment_space};
    use alloc::vec;
    use core::f64::consts::PI;

    fn two_points(d: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::from_matrix(&[vec![0.0, d], vec![d, 0.0]]).unwrap()
    }

    #[test]
    fn single_point_examples() {
        let p = FiniteMetricSpace::single_point("p");
        assert_eq!(single_point_rule(&p, &p).unwrap().value, 0.0);
        assert_eq!(single_point_rule(&p, &circle_space(8).unwrap()).unwrap().value, PI / 2.0);
        assert_eq!(single_point_rule(&p, &segment_space(3.0, 7).unwrap()).unwrap().value, 1.5);
        assert_eq!(single_point_rule(&two_points(1.0), &two_points(2.0)), Err(Error::NotSinglePoint));
    }

    #[test]
    fn diameter_rules() {
        let c = circle_space(8).unwrap();
        assert_eq!(diam_diff_lower(&c, &c).value, 0.0);
        let s = segment_space(2.0 * PI, 9).unwrap();
        assert!((diam_diff_lower(&s, &c).value - PI / 2.0).abs() < 1e-15);
        let s3 = segment_space(3.0 * PI, 9).unwrap();
        assert!((diam_diff_lower(&s3, &c).value - PI).abs() < 1e-15);
        let p = FiniteMetricSpace::single_point("p");
        assert_eq!(max_diam_upper(&p, &p).value, 0.0);
        let sp = segment_space(PI, 9).unwrap();
        let up = max_diam_upper(&c, &sp);
        assert_eq!(up.value, PI / 2.0);
        let Some(Certificate::Correspondence(r)) = &up.certificate else { panic!() };
        assert!(r.distortion(&c, &sp).unwrap() <= 2.0 * up.value);
    }

    #[test]
    fn homogeneity_examples() {
        let c = circle_space(8).unwrap();
        assert_eq!(homogeneity_lower(&c, &c, 2).value, 0.0);
        let lambda = 1.0;
        let s = segment_space(lambda, 11).unwrap();
        assert!((homogeneity_lower(&c, &s, 2).value - (PI / 2.0 - lambda / 4.0)).abs() < 1e-15);
        assert_eq!(homogeneity_lower(&two_points(2.0), &two_points(1.0), 2).value, 0.5);
    }

    #[test]
    fn round_examples() {
        let c = circle_space(8).unwrap();
        assert_eq!(round_lower(&c, &c).unwrap().value, 0.0);
        let s = segment_space(2.0 * PI / 3.0, 11).unwrap();
        assert!((round_lower(&c, &s).unwrap().value - PI / 3.0).abs() < 1e-15);
        let p = FiniteMetricSpace::single_point("p");
        assert_eq!(round_lower(&c, &p).unwrap().value, PI / 2.0);
        assert_eq!(round_lower(&s, &c), Err(Error::NotRound));
    }

    #[test]
    fn involution_examples() {
        let c = circle_space(8).unwrap();
        let alpha = antipodal_map(8).unwrap();
        let s = segment_space(2.0, 11).unwrap();
        let w = LipschitzWitness::from_values(&s, s.row(0).to_vec()).unwrap();
        let r = involution_lower(&c, &alpha, &s, &w, 2.0 * PI / 8.0).unwrap();
        assert!((r.value - PI / 3.0).abs() < 1e-15);
        assert!(r.continuous_hypothesis);

        let eps = 0.3;
        let y = two_points(PI - eps);
        let flat = LipschitzWitness::from_values(&y, vec![0.0, 0.0]).unwrap();
        let r = involution_lower(&c, &alpha, &y, &flat, 0.0).unwrap();
        assert!((r.value - eps / 3.0).abs() < 1e-12);

        // A witness claiming c = 0 on the circle itself does not replay.
        let stale = LipschitzWitness::from_parts(vec![0.0; 8], 0.0);
        assert!(matches!(
            involution_lower(&c, &alpha, &c, &stale, 0.0),
            Err(Error::StaleCertificate { .. })
        ));
        let wide = two_points(4.0);
        let w = LipschitzWitness::from_values(&wide, vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            involution_lower(&c, &alpha, &wide, &w, 0.0),
            Err(Error::CExceedsDiameter { .. })
        ));
    }

    #[test]
    fn lipschitz_image_examples() {
        let s = segment_space(2.5, 6).unwrap();
        assert!(lipschitz_image_upper(&s).unwrap().value <= 1e-9);
        let c = circle_space(6).unwrap();
        let r = lipschitz_image_upper(&c).unwrap();
        assert!(r.value <= PI / 2.0 + 1e-9);
        let Some(Certificate::LineImage { positions, correspondence }) = &r.certificate else {
            panic!()
        };
        let line = crate::model::LineGrid::new(positions.clone()).unwrap();
        let replay = correspondence.distortion(&c, &line).unwrap() / 2.0;
        assert!((replay - r.value).abs() <= 1e-12);
    }

    #[test]
    fn best_bounds_examples() {
        let p = FiniteMetricSpace::single_point("p");
        let all = best_bounds(&p, &p, &BoundOptions::default()).unwrap();
        assert!(all.iter().all(|r| r.value == 0.0));

        let c = circle_space(8).unwrap();
        let opts = BoundOptions {
            involution: Some(antipodal_map(8).unwrap()),
            involution_slack: 2.0 * PI / 8.0,
            ..BoundOptions::default()
        };
        let s = segment_space(PI, 9).unwrap();
        let best = best_bounds(&c, &s, &opts).unwrap();
        let lower = best.iter().filter(|r| r.kind == BoundKind::Lower).map(|r| r.value).fold(0.0, f64::max);
        assert!(lower >= PI / 3.0 - 1e-9);

        let s = segment_space(0.1, 9).unwrap();
        let best = best_bounds(&c, &s, &opts).unwrap();
        let lower = best.iter().filter(|r| r.kind == BoundKind::Lower).map(|r| r.value).fold(0.0, f64::max);
        assert!((lower - (PI / 2.0 - 0.025)).abs() < 1e-12);
    }
}

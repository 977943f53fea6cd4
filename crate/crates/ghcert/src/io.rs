//! File formats: spaces (JSON or CSV), graphs, correspondences, PL
//! relations, witnesses, exact results, bound records, certificates and the
//! sweep table.
//!
//! Every float written is first rounded to 12 significant digits, so that
//! loading an artifact and writing it again reproduces the same bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use ghcert_core::bounds::{BoundKind, BoundRecord, BoundSource};
use ghcert_core::exact::{GhSolution, SearchStatus};
use ghcert_core::metric::DEFAULT_METRIC_TOL;
use ghcert_core::segment_circle::{
    gh_formula, replay, CertificatePath, Construction, Regime, RegimeReport, SegmentCircleCertificate,
};
use ghcert_core::{
    Correspondence, FiniteMetricSpace, LipschitzWitness, MetricGraph, PLCorrespondence, QPoint, Segment,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: {message}")]
    Shape { path: String, message: String },
    #[error(transparent)]
    Invalid(#[from] ghcert_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

/// `x` rounded to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn sig12_all(xs: &[f64]) -> Vec<f64> {
    xs.iter().copied().map(sig12).collect()
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json { path: path.display().to_string(), source })
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| FormatError::Io { path: p.display().to_string(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|source| FormatError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifacts serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
}

impl SpaceFile {
    pub fn from_space(space: &FiniteMetricSpace) -> Self {
        SpaceFile {
            labels: space.labels().to_vec(),
            dist: space.to_matrix().iter().map(|row| sig12_all(row)).collect(),
        }
    }

    pub fn into_space(self) -> Result<FiniteMetricSpace> {
        Ok(FiniteMetricSpace::validate(&self.dist, self.labels, DEFAULT_METRIC_TOL)?)
    }
}

pub fn space_to_json(space: &FiniteMetricSpace) -> String {
    pretty(&SpaceFile::from_space(space))
}

/// Header row of labels, then one row of distances per point.
pub fn space_to_csv(space: &FiniteMetricSpace) -> String {
    let file = SpaceFile::from_space(space);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&file.labels).expect("in-memory write");
    for row in &file.dist {
        w.write_record(row.iter().map(|v| v.to_string())).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn space_from_csv(text: &str, path: &Path) -> Result<FiniteMetricSpace> {
    let name = path.display().to_string();
    let mut r = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let labels: Vec<String> = r
        .headers()
        .map_err(|source| FormatError::Csv { path: name.clone(), source })?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut dist = Vec::new();
    for (k, record) in r.records().enumerate() {
        let record = record.map_err(|source| FormatError::Csv { path: name.clone(), source })?;
        let row = record
            .iter()
            .map(|cell| {
                cell.parse::<f64>().map_err(|e| FormatError::Shape {
                    path: name.clone(),
                    message: format!("row {}: {cell:?}: {e}", k + 1),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        dist.push(row);
    }
    SpaceFile { labels, dist }.into_space()
}

/// Loads a space; files ending in `.csv` are read as CSV, anything else as JSON.
pub fn read_space(path: &Path) -> Result<FiniteMetricSpace> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        space_from_csv(&read_text(path)?, path)
    } else {
        parse_json::<SpaceFile>(path)?.into_space()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

pub fn read_graph(path: &Path) -> Result<MetricGraph> {
    let g: GraphFile = parse_json(path)?;
    Ok(MetricGraph::new(g.vertices, g.edges)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceFile {
    pub pairs: Vec<(usize, usize)>,
}

pub fn read_pairs(path: &Path) -> Result<Vec<(usize, usize)>> {
    Ok(parse_json::<CorrespondenceFile>(path)?.pairs)
}

pub fn correspondence_to_json(r: &Correspondence) -> String {
    pretty(&CorrespondenceFile { pairs: r.pairs().to_vec() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlFile {
    pub lambda: f64,
    pub segments: Vec<[[f64; 2]; 2]>,
}

impl PlFile {
    pub fn from_relation(relation: &PLCorrespondence) -> Self {
        PlFile {
            lambda: sig12(relation.lambda()),
            segments: relation
                .segments()
                .iter()
                .map(|s| [[sig12(s.start.t), sig12(s.start.phi)], [sig12(s.end.t), sig12(s.end.phi)]])
                .collect(),
        }
    }

    pub fn into_relation(self) -> Result<PLCorrespondence> {
        let segments = self
            .segments
            .iter()
            .map(|[a, b]| Segment::new(QPoint::new(a[0], a[1]), QPoint::new(b[0], b[1])))
            .collect();
        Ok(PLCorrespondence::new(self.lambda, segments)?)
    }
}

pub fn read_pl(path: &Path) -> Result<PLCorrespondence> {
    parse_json::<PlFile>(path)?.into_relation()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub values: Vec<f64>,
    pub objective: f64,
}

impl WitnessFile {
    pub fn from_witness(w: &LipschitzWitness) -> Self {
        WitnessFile { values: sig12_all(w.values()), objective: sig12(w.objective()) }
    }
}

pub fn witness_to_json(w: &LipschitzWitness) -> String {
    pretty(&WitnessFile::from_witness(w))
}

/// Loads a witness without checking it; callers verify it against a space.
pub fn read_witness(path: &Path) -> Result<LipschitzWitness> {
    let w: WitnessFile = parse_json(path)?;
    Ok(LipschitzWitness::from_parts(w.values, w.objective))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactFile {
    pub value: f64,
    pub pairs: Vec<(usize, usize)>,
    pub status: String,
}

pub fn exact_to_json(solution: &GhSolution) -> String {
    let status = match solution.status {
        SearchStatus::Optimal => "optimal",
        SearchStatus::Upper => "upper",
    };
    pretty(&ExactFile {
        value: sig12(solution.value),
        pairs: solution.correspondence.pairs().to_vec(),
        status: status.into(),
    })
}

fn kind_name(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::Lower => "lower",
        BoundKind::Exact => "exact",
        BoundKind::Upper => "upper",
    }
}

fn source_params(source: &BoundSource) -> Value {
    match *source {
        BoundSource::Homogeneity { n, b, a, swapped } => json!({ "n": n, "b": sig12(b), "a": sig12(a), "swapped": swapped }),
        BoundSource::Round { a, swapped } => json!({ "a": sig12(a), "swapped": swapped }),
        BoundSource::Involution { c, swapped } => json!({ "c": sig12(c), "swapped": swapped }),
        BoundSource::LipschitzImage { c } => json!({ "c": sig12(c) }),
        _ => json!({}),
    }
}

/// One compact JSON object per record.
pub fn bound_record_json(record: &BoundRecord) -> String {
    json!({
        "kind": kind_name(record.kind),
        "source": record.source.tag(),
        "value": sig12(record.value),
        "vacuous": record.vacuous,
        "continuous_hypothesis": record.continuous_hypothesis,
        "slack": sig12(record.slack),
        "params": source_params(&record.source),
        "certified": record.certificate.is_some(),
    })
    .to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathFile {
    Direct,
    Anchored { attach: f64 },
    Searched { attach: f64, tried: usize },
    Clipped { attach: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstructionFile {
    Finite { positions: Vec<f64>, circle_points: usize, pairs: Vec<(usize, usize)> },
    Pl { step: f64, lambda: f64, segments: Vec<[[f64; 2]; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub lambda: f64,
    pub regime: String,
    pub formula: f64,
    /// Distortion of the construction as measured when it was built.
    pub measured: f64,
    pub half_distortion: f64,
    pub slack: f64,
    pub path: PathFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hausdorff: Option<f64>,
    pub construction: ConstructionFile,
}

impl CertificateFile {
    pub fn from_certificate(cert: &SegmentCircleCertificate) -> Self {
        let path = match cert.path {
            CertificatePath::Direct => PathFile::Direct,
            CertificatePath::Anchored { attach } => PathFile::Anchored { attach: sig12(attach) },
            CertificatePath::Searched { attach, tried } => PathFile::Searched { attach: sig12(attach), tried },
            CertificatePath::Clipped { attach } => PathFile::Clipped { attach: sig12(attach) },
        };
        let construction = match &cert.construction {
            Construction::Finite { positions, circle_points, correspondence } => ConstructionFile::Finite {
                positions: sig12_all(positions),
                circle_points: *circle_points,
                pairs: correspondence.pairs().to_vec(),
            },
            Construction::Pl { relation, step } => {
                let pl = PlFile::from_relation(relation);
                ConstructionFile::Pl { step: sig12(*step), lambda: pl.lambda, segments: pl.segments }
            }
        };
        CertificateFile {
            lambda: sig12(cert.lambda),
            regime: cert.regime.name().into(),
            formula: sig12(gh_formula(cert.lambda).expect("certificates have lambda >= 0")),
            measured: sig12(cert.measured),
            half_distortion: sig12(cert.half_distortion()),
            slack: sig12(cert.slack),
            path,
            hausdorff: cert.hausdorff.map(sig12),
            construction,
        }
    }

    pub fn to_json(&self) -> String {
        pretty(self)
    }

    pub fn construction(&self) -> Result<Construction> {
        Ok(match &self.construction {
            ConstructionFile::Finite { positions, circle_points, pairs } => Construction::Finite {
                positions: positions.clone(),
                circle_points: *circle_points,
                correspondence: Correspondence::new(pairs.clone(), positions.len(), *circle_points)?,
            },
            ConstructionFile::Pl { step, lambda, segments } => Construction::Pl {
                relation: PlFile { lambda: *lambda, segments: segments.clone() }.into_relation()?,
                step: *step,
            },
        })
    }

    /// Replays the construction and checks it against the closed form.
    pub fn check(&self) -> Result<CertificateCheck> {
        let construction = self.construction()?;
        if let Construction::Finite { positions, .. } = &construction {
            let span = positions.last().copied().unwrap_or(0.0) - positions.first().copied().unwrap_or(0.0);
            if (span - self.lambda).abs() > 1e-9 * (1.0 + self.lambda) {
                return Err(FormatError::Shape {
                    path: "certificate".into(),
                    message: format!("positions span {span}, not lambda {}", self.lambda),
                });
            }
        }
        if let Construction::Pl { relation, .. } = &construction {
            if relation.lambda() != self.lambda {
                return Err(FormatError::Shape {
                    path: "certificate".into(),
                    message: "construction lambda differs from certificate lambda".into(),
                });
            }
        }
        let replayed = replay(&construction)?;
        let formula = gh_formula(self.lambda)?;
        Ok(CertificateCheck {
            replayed,
            formula,
            within_slack: replayed / 2.0 <= formula + self.slack,
            matches_recorded: (sig12(replayed) - self.measured).abs() <= 1e-9 * (1.0 + self.measured),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateCheck {
    pub replayed: f64,
    pub formula: f64,
    pub within_slack: bool,
    pub matches_recorded: bool,
}

impl CertificateCheck {
    pub fn passed(&self) -> bool {
        self.within_slack && self.matches_recorded
    }
}

pub fn read_certificate(path: &Path) -> Result<CertificateFile> {
    parse_json(path)
}

pub const SWEEP_HEADER: [&str; 6] = ["lambda", "formula", "lower", "upper", "regime", "slack"];

pub fn sweep_to_csv(reports: &[RegimeReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER).expect("in-memory write");
    for r in reports {
        w.write_record([
            sig12(r.lambda).to_string(),
            sig12(r.formula).to_string(),
            sig12(r.lower.value).to_string(),
            sig12(r.upper.value).to_string(),
            r.regime.name().to_string(),
            sig12(r.slack).to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// One parsed row of a sweep table.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub formula: f64,
    pub lower: f64,
    pub upper: f64,
    pub regime: String,
    pub slack: f64,
}

impl SweepRow {
    pub fn consistent(&self) -> bool {
        self.lower - self.slack <= self.formula && self.formula <= self.upper + self.slack
    }

    pub fn regime(&self) -> Option<Regime> {
        [Regime::A, Regime::B1, Regime::B2, Regime::C1, Regime::C2].into_iter().find(|r| r.name() == self.regime)
    }
}

pub fn sweep_from_csv(text: &str) -> std::result::Result<Vec<SweepRow>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ghcert_core::model::{circle_space, segment_space};

    #[test]
    fn rounding() {
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(0.1), 0.1);
        assert_eq!(sig12(std::f64::consts::PI).to_string(), "3.14159265359");
        assert_eq!(sig12(sig12(1.0 / 3.0)), sig12(1.0 / 3.0));
    }

    #[test]
    fn space_formats_agree() {
        let c = circle_space(6).unwrap();
        let json: SpaceFile = serde_json::from_str(&space_to_json(&c)).unwrap();
        let from_json = json.into_space().unwrap();
        let from_csv = space_from_csv(&space_to_csv(&c), Path::new("c.csv")).unwrap();
        assert_eq!(from_json, from_csv);
        assert_eq!(space_to_json(&from_json), space_to_json(&c));
        assert!(space_to_csv(&c).starts_with("c0,c1,c2,c3,c4,c5\n"));
    }

    #[test]
    fn bad_csv_cell_is_reported() {
        let err = space_from_csv("a,b\n0,x\n1,0\n", Path::new("s.csv")).unwrap_err();
        assert!(err.to_string().contains("row 1"));
    }

    #[test]
    fn records_render() {
        let s = segment_space(1.0, 3).unwrap();
        let c = circle_space(4).unwrap();
        let r = ghcert_core::bounds::round_lower(&c, &s).unwrap();
        let line = bound_record_json(&r);
        let v: Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["kind"], "lower");
        assert_eq!(v["source"], "round");
        assert!(!line.contains('\n'));
    }
}

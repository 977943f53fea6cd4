use alloc::string::String;

/// Errors raised by the metric, correspondence, and certificate routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("distance matrix is empty")]
    EmptyMatrix,
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("non-finite distance at ({i}, {j})")]
    NonFiniteDistance { i: usize, j: usize },
    #[error("nonzero diagonal entry at {i}: {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("negative distance at ({i}, {j}): {value}")]
    NegativeDistance { i: usize, j: usize, value: f64 },
    #[error("asymmetric matrix: d({i},{j}) = {forward} but d({j},{i}) = {backward}")]
    AsymmetricMatrix { i: usize, j: usize, forward: f64, backward: f64 },
    #[error("distinct points {i} and {j} are at distance zero")]
    CoincidentPoints { i: usize, j: usize },
    #[error("triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("point index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("point subset is empty")]
    EmptySubset,
    #[error("subsets belong to different spaces")]
    SpacesDiffer,
    #[error("scale factor must be finite and nonnegative, got {0}")]
    NegativeScale(f64),
    #[error("length must be finite and nonnegative, got {0}")]
    NegativeLength(f64),
    #[error("need at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("antipodal map needs an even number of points, got {0}")]
    OddOrder(usize),
    #[error("whisker construction needs lambda >= 2*pi, got {0}")]
    LambdaTooSmall(f64),
    #[error("lambda {lambda} outside [{min}, {max}]")]
    LambdaOutOfRange { lambda: f64, min: f64, max: f64 },
    #[error("lambda must be finite and nonnegative, got {0}")]
    NegativeLambda(f64),
    #[error("invalid edge {index}: {reason}")]
    InvalidEdge { index: usize, reason: &'static str },
    #[error("graph is disconnected: vertex {0} unreachable from vertex 0")]
    DisconnectedGraph(usize),
    #[error("invalid correspondence: {0}")]
    InvalidCorrespondence(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(&'static str),
    #[error("point ({t}, {phi}) lies outside the parameter rectangle for lambda = {lambda}")]
    OutsideRectangle { t: f64, phi: f64, lambda: f64 },
    #[error("{axis} projection leaves a gap of width {width} near {at}")]
    CoverageGap { axis: Axis, at: f64, width: f64 },
    #[error("sampling step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("function is not 1-Lipschitz on ({i}, {j}): excess {excess}")]
    NotLipschitz { i: usize, j: usize, excess: f64 },
    #[error("witness has {got} values, space has {expected} points")]
    WitnessSize { expected: usize, got: usize },
    #[error("witness claims objective {claimed}, recomputed {actual}")]
    StaleCertificate { claimed: f64, actual: f64 },
    #[error("space with {len} points exceeds the limit of {limit}")]
    TooLarge { len: usize, limit: usize },
    #[error("map is not an antipodal involution: {0}")]
    NotAntipodalInvolution(&'static str),
    #[error("space is not round")]
    NotRound,
    #[error("neither space is a single point")]
    NotSinglePoint,
    #[error("nonlinearity bound {c} is not below the diameter {diameter}")]
    CExceedsDiameter { c: f64, diameter: f64 },
    #[error("inconsistent bounds: lower {lower} exceeds upper {upper}")]
    InconsistentBounds { lower: f64, upper: f64 },
    #[error("certificate failed: measured distortion {measured} exceeds target {target}")]
    CertificateFailed { measured: f64, target: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// Coordinate axis of the parameter rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    T,
    Phi,
}

impl core::fmt::Display for Axis {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Axis::T => f.write_str("t"),
            Axis::Phi => f.write_str("phi"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

//! Gromov-Hausdorff distances between finite metric spaces: exact values on
//! small spaces, lower and upper bounds with replayable certificates, the
//! nonlinearity degree, and the segment-circle distance.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod bounds;
pub mod correspondence;
pub mod error;
pub mod exact;
pub mod metric;
pub mod model;
pub mod nonlinearity;
pub mod region;
pub mod segment_circle;

pub use bounds::{best_bounds, BoundKind, BoundOptions, BoundRecord, BoundSource, Certificate};
pub use correspondence::{Correspondence, SampledMap};
pub use error::{Axis, Error, Result};
pub use exact::{gh_exact, GhSolution, SearchOptions, SearchStatus};
pub use metric::{FiniteMetricSpace, Involution, Metric, PointSubset};
pub use model::{CircleGrid, LineGrid, MetricGraph, WhiskerGraph};
pub use nonlinearity::LipschitzWitness;
pub use region::{PLCorrespondence, QPoint, Segment};
pub use segment_circle::{Grids, Regime, RegimeReport, SegmentCircleCertificate};

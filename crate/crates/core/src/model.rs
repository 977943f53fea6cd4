//! Concrete spaces: discretized segments, discretized circles with the
//! intrinsic metric, metric graphs, and the circle-with-whiskers graph.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, Involution, Metric, PointSubset};

/// Points on the real line with the absolute-difference metric.
#[derive(Debug, Clone, PartialEq)]
pub struct LineGrid {
    positions: Vec<f64>,
}

impl LineGrid {
    /// Positions must be finite and strictly increasing.
    pub fn new(positions: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::EmptySubset);
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("line positions must be finite"));
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("line positions must be strictly increasing"));
        }
        Ok(LineGrid { positions })
    }

    /// Uniform grid of `points` points on `[0, length]`.
    pub fn uniform(length: f64, points: usize) -> Result<Self> {
        if !(length.is_finite() && length >= 0.0) {
            return Err(Error::NegativeLength(length));
        }
        if points == 0 {
            return Err(Error::TooFewPoints { min: 1, got: 0 });
        }
        if length == 0.0 {
            return Ok(LineGrid { positions: alloc::vec![0.0] });
        }
        if points < 2 {
            return Err(Error::TooFewPoints { min: 2, got: points });
        }
        let last = (points - 1) as f64;
        Ok(LineGrid { positions: (0..points).map(|k| length * (k as f64 / last)).collect() })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn length(&self) -> f64 {
        self.positions[self.positions.len() - 1] - self.positions[0]
    }

    /// Largest gap between neighbouring points.
    pub fn max_gap(&self) -> f64 {
        self.positions.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn to_space(&self) -> FiniteMetricSpace {
        let labels = (0..self.positions.len()).map(|k| format!("t{k}")).collect();
        FiniteMetricSpace::from_fn(labels, |i, j| (self.positions[i] - self.positions[j]).abs())
    }
}

impl Metric for LineGrid {
    fn len(&self) -> usize {
        self.positions.len()
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        (self.positions[i] - self.positions[j]).abs()
    }
}

/// `n` equally spaced points on the unit circle with arc-length distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleGrid {
    n: usize,
}

impl CircleGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewPoints { min: 3, got: n });
        }
        Ok(CircleGrid { n })
    }

    pub fn points(&self) -> usize {
        self.n
    }

    /// Angle of point `k` in `[0, 2*pi)`.
    pub fn angle(&self, k: usize) -> f64 {
        2.0 * PI * (k as f64 / self.n as f64)
    }

    pub fn step(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Index of the grid point nearest to `angle` (any real, taken mod 2*pi).
    pub fn nearest(&self, angle: f64) -> usize {
        let turns = angle / (2.0 * PI);
        let frac = turns - libm::floor(turns);
        (libm::round(frac * self.n as f64) as usize) % self.n
    }

    pub fn to_space(&self) -> FiniteMetricSpace {
        let labels = (0..self.n).map(|k| format!("c{k}")).collect();
        FiniteMetricSpace::from_fn(labels, |i, j| self.dist(i, j))
    }
}

impl Metric for CircleGrid {
    fn len(&self) -> usize {
        self.n
    }

    // The ratio is formed first so antipodal pairs come out as exactly pi.
    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        let k = i.abs_diff(j);
        let steps = k.min(self.n - k);
        PI * ((2 * steps) as f64 / self.n as f64)
    }
}

/// Uniform grid of `m` points on the segment `[0, length]`.
pub fn segment_space(length: f64, m: usize) -> Result<FiniteMetricSpace> {
    Ok(LineGrid::uniform(length, m)?.to_space())
}

/// `n` equally spaced points of the unit circle with the intrinsic metric.
pub fn circle_space(n: usize) -> Result<FiniteMetricSpace> {
    Ok(CircleGrid::new(n)?.to_space())
}

/// The antipodal map `k -> k + n/2 mod n` on an even circle grid.
pub fn antipodal_map(n: usize) -> Result<Involution> {
    if n % 2 != 0 {
        return Err(Error::OddOrder(n));
    }
    Involution::new((0..n).map(|k| (k + n / 2) % n).collect())
}

/// The chain `0, 1, ..., n/2` joining point 0 to its antipode along
/// neighbouring grid points.
pub fn circle_antipodal_chain(n: usize) -> Result<Vec<usize>> {
    if n % 2 != 0 {
        return Err(Error::OddOrder(n));
    }
    Ok((0..=n / 2).collect())
}

/// Undirected graph with positive edge lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: usize,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(Clone, Copy, PartialEq)]
struct Frontier {
    dist: f64,
    vertex: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    // Reversed so the max-heap pops the nearest vertex first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then(other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl MetricGraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::TooFewPoints { min: 1, got: 0 });
        }
        for (index, &(u, v, len)) in edges.iter().enumerate() {
            if u >= vertices || v >= vertices {
                return Err(Error::InvalidEdge { index, reason: "endpoint out of range" });
            }
            if u == v {
                return Err(Error::InvalidEdge { index, reason: "self-loop" });
            }
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::InvalidEdge { index, reason: "length must be positive" });
            }
        }
        Ok(MetricGraph { vertices, edges })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = alloc::vec![Vec::new(); self.vertices];
        for &(u, v, len) in &self.edges {
            adj[u].push((v, len));
            adj[v].push((u, len));
        }
        adj
    }

    /// Shortest-path distances from `source` (Dijkstra).
    pub fn distances_from(&self, source: usize) -> Vec<f64> {
        self.dijkstra(&self.adjacency(), source)
    }

    fn dijkstra(&self, adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
        let mut dist = alloc::vec![f64::INFINITY; self.vertices];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Frontier { dist: 0.0, vertex: source });
        while let Some(Frontier { dist: d, vertex }) = heap.pop() {
            if d > dist[vertex] {
                continue;
            }
            for &(next, len) in &adj[vertex] {
                let candidate = d + len;
                if candidate < dist[next] {
                    dist[next] = candidate;
                    heap.push(Frontier { dist: candidate, vertex: next });
                }
            }
        }
        dist
    }

    /// All-pairs shortest-path metric, labelled `"v0"`, `"v1"`, ...
    pub fn shortest_path_metric(&self) -> Result<FiniteMetricSpace> {
        let labels = (0..self.vertices).map(|k| format!("v{k}")).collect();
        self.shortest_path_metric_labelled(labels)
    }

    fn shortest_path_metric_labelled(&self, labels: Vec<String>) -> Result<FiniteMetricSpace> {
        let adj = self.adjacency();
        let rows: Vec<Vec<f64>> = (0..self.vertices).map(|s| self.dijkstra(&adj, s)).collect();
        if let Some(v) = rows[0].iter().position(|d| d.is_infinite()) {
            return Err(Error::DisconnectedGraph(v));
        }
        // Dijkstra sums edges in path order, so d(i,j) and d(j,i) may differ
        // in the last bit; keep the smaller one.
        Ok(FiniteMetricSpace::from_fn(labels, |i, j| rows[i][j].min(rows[j][i])))
    }
}

/// The unit circle with two antipodal whiskers of length `(lambda - pi)/2`.
///
/// `y` indexes the circle vertices and `z` the left whisker, the lower
/// semicircle and the right whisker, ordered by arc length from the left tip.
#[derive(Debug, Clone)]
pub struct WhiskerGraph {
    pub lambda: f64,
    pub graph: MetricGraph,
    pub space: FiniteMetricSpace,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
    /// Arc-length coordinate of each `z` vertex along the path it spans.
    pub z_positions: Vec<f64>,
    pub circle_points: usize,
}

impl WhiskerGraph {
    pub fn y_subset(&self) -> PointSubset<'_> {
        PointSubset::new(&self.space, self.y.clone()).expect("circle vertices are nonempty")
    }

    pub fn z_subset(&self) -> PointSubset<'_> {
        PointSubset::new(&self.space, self.z.clone()).expect("whisker path is nonempty")
    }

    pub fn whisker_length(&self) -> f64 {
        (self.lambda - PI) / 2.0
    }

    /// Largest gap between consecutive points of the whisker path.
    pub fn z_max_gap(&self) -> f64 {
        self.z_positions.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// Builds the whisker graph for `lambda >= 2*pi` with `n_circle` circle
/// vertices (even) and `n_whisker` edges on each whisker.
///
/// The right whisker hangs from the circle vertex at angle 0, the left one
/// from the vertex at angle pi.
pub fn whisker_graph(lambda: f64, n_circle: usize, n_whisker: usize) -> Result<WhiskerGraph> {
    if !(lambda.is_finite() && lambda >= 2.0 * PI) {
        return Err(Error::LambdaTooSmall(lambda));
    }
    if n_circle % 2 != 0 {
        return Err(Error::OddOrder(n_circle));
    }
    if n_circle < 4 {
        return Err(Error::TooFewPoints { min: 4, got: n_circle });
    }
    if n_whisker == 0 {
        return Err(Error::TooFewPoints { min: 1, got: 0 });
    }
    let whisker = (lambda - PI) / 2.0;
    let circle = CircleGrid::new(n_circle)?;
    let arc = circle.step();
    let half = n_circle / 2;

    let mut labels: Vec<String> = (0..n_circle).map(|k| format!("c{k}")).collect();
    let mut edges: Vec<(usize, usize, f64)> =
        (0..n_circle).map(|k| (k, (k + 1) % n_circle, arc)).collect();
    let piece = whisker / n_whisker as f64;
    let left_start = n_circle;
    let right_start = n_circle + n_whisker;
    for (start, attach, side) in [(left_start, half, 'L'), (right_start, 0, 'R')] {
        let mut prev = attach;
        for j in 0..n_whisker {
            let v = start + j;
            labels.push(format!("w{side}{}", j + 1));
            edges.push((prev, v, piece));
            prev = v;
        }
    }
    let graph = MetricGraph::new(n_circle + 2 * n_whisker, edges)?;
    let space = graph.shortest_path_metric_labelled(labels)?;

    let mut z = Vec::with_capacity(half + 1 + 2 * n_whisker);
    let mut z_positions = Vec::with_capacity(z.capacity());
    // Left whisker, tip first.
    for j in (0..n_whisker).rev() {
        z.push(left_start + j);
        z_positions.push(whisker * (1.0 - (j + 1) as f64 / n_whisker as f64));
    }
    // Lower semicircle from angle pi round to angle 2*pi.
    for s in 0..=half {
        z.push((half + s) % n_circle);
        z_positions.push(whisker + PI * (s as f64 / half as f64));
    }
    for j in 0..n_whisker {
        z.push(right_start + j);
        z_positions.push(whisker + PI + whisker * ((j + 1) as f64 / n_whisker as f64));
    }

    Ok(WhiskerGraph {
        lambda,
        graph,
        space,
        y: (0..n_circle).collect(),
        z,
        z_positions,
        circle_points: n_circle,
    })
}

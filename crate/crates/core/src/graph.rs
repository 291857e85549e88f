//! Weighted directed graphs, their associated undirected graphs, and the
//! weight metric that turns a weighted graph into a finite extended metric
//! space.
//!
//! The associated-graph construction splits every directed edge `(a, b)` with
//! a label vertex `v_ab`, so that edge direction survives as graph structure
//! while the result is an ordinary simple weighted graph. Distances are then
//! shortest paths with edge length `1/weight`: heavier edges mean closer
//! vertices.

use thiserror::Error;

/// Slack for the triangle-inequality check on finite triples. Shortest-path
/// sums accumulated along different paths can disagree by a few ulps.
pub const TRIANGLE_SLACK: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("adjacency matrix is not square: row {row} has {found} entries, expected {expected}")]
    NonSquareMatrix {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("label count {labels} does not match matrix size {size}")]
    LabelCountMismatch { labels: usize, size: usize },
    #[error("negative adjacency entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("edge ({source}, {target}) weight {weight} is not positive and finite")]
    InvalidWeight {
        source: usize,
        target: usize,
        weight: f64,
    },
    #[error("duplicate directed edge ({source}, {target})")]
    DuplicateEdge { source: usize, target: usize },
    #[error("edge endpoint {index} out of range for {vertices} vertices")]
    EndpointOutOfRange { index: usize, vertices: usize },
    #[error("loop edge at vertex {vertex} is not allowed in an undirected graph")]
    LoopEdge { vertex: usize },
    #[error("duplicate undirected edge {{{a}, {b}}}")]
    DuplicateUndirectedEdge { a: usize, b: usize },
}

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("distance matrix is not square: row {row} has {found} entries, expected {expected}")]
    NonSquareMatrix {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("label count {labels} does not match matrix size {size}")]
    LabelCountMismatch { labels: usize, size: usize },
    #[error("diagonal entry at {index} is {value}, expected 0")]
    NonzeroDiagonal { index: usize, value: f64 },
    #[error("asymmetric distances at ({i}, {j}): {forward} vs {backward}")]
    Asymmetric {
        i: usize,
        j: usize,
        forward: f64,
        backward: f64,
    },
    #[error("invalid distance {value} at ({i}, {j}): distances must be nonnegative reals or +inf")]
    InvalidDistance { i: usize, j: usize, value: f64 },
    #[error("triangle inequality violated: d({i},{k}) = {direct} > d({i},{j}) + d({j},{k}) = {via}")]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        direct: f64,
        via: f64,
    },
}

/// A directed edge with a positive weight. Loops (`source == target`) are
/// permitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedEdge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// A weighted directed graph. At most one edge per ordered vertex pair.
#[derive(Debug, Clone)]
pub struct WeightedDigraph {
    labels: Vec<String>,
    edges: Vec<DirectedEdge>,
}

impl WeightedDigraph {
    /// Builds a digraph from an explicit edge list, validating weights,
    /// endpoints, and uniqueness of ordered pairs.
    pub fn new(labels: Vec<String>, edges: Vec<DirectedEdge>) -> Result<Self, GraphError> {
        let n = labels.len();
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(GraphError::InvalidWeight {
                    source: e.source,
                    target: e.target,
                    weight: e.weight,
                });
            }
            for idx in [e.source, e.target] {
                if idx >= n {
                    return Err(GraphError::EndpointOutOfRange {
                        index: idx,
                        vertices: n,
                    });
                }
            }
            if !seen.insert((e.source, e.target)) {
                return Err(GraphError::DuplicateEdge {
                    source: e.source,
                    target: e.target,
                });
            }
        }
        Ok(Self { labels, edges })
    }

    /// Reads a digraph off a square adjacency matrix: entry `A[i][j] > 0`
    /// becomes the edge `(i, j)` with weight `A[i][j]`; zero entries produce
    /// no edge.
    pub fn from_adjacency(labels: Vec<String>, matrix: &[Vec<f64>]) -> Result<Self, GraphError> {
        let n = matrix.len();
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(GraphError::NonSquareMatrix {
                    row,
                    found: r.len(),
                    expected: n,
                });
            }
        }
        if labels.len() != n {
            return Err(GraphError::LabelCountMismatch {
                labels: labels.len(),
                size: n,
            });
        }
        let mut edges = Vec::new();
        for (i, row) in matrix.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                if a < 0.0 || a.is_nan() {
                    return Err(GraphError::NegativeEntry {
                        row: i,
                        col: j,
                        value: a,
                    });
                }
                if a > 0.0 {
                    if !a.is_finite() {
                        return Err(GraphError::InvalidWeight {
                            source: i,
                            target: j,
                            weight: a,
                        });
                    }
                    edges.push(DirectedEdge {
                        source: i,
                        target: j,
                        weight: a,
                    });
                }
            }
        }
        Ok(Self { labels, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> &[DirectedEdge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// The associated undirected graph: every directed edge `(a, b)` gains a
    /// label vertex `v_ab`. A non-loop edge of weight `w` splits into
    /// `{a, v_ab}` and `{v_ab, b}`, each of weight `w/2`; a loop `(a, a)`
    /// becomes the single edge `{a, v_aa}` with the original weight. If the
    /// edge weights form a probability distribution, so do the result's.
    pub fn associated_undirected(&self) -> WeightedUndirectedGraph {
        let n = self.labels.len();
        let mut labels = self.labels.clone();
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            let mid = n + k;
            labels.push(format!(
                "{}->{}",
                self.labels[e.source], self.labels[e.target]
            ));
            if e.source == e.target {
                edges.push(UndirectedEdge::new(e.source, mid, e.weight));
            } else {
                edges.push(UndirectedEdge::new(e.source, mid, e.weight / 2.0));
                edges.push(UndirectedEdge::new(mid, e.target, e.weight / 2.0));
            }
        }
        WeightedUndirectedGraph { labels, edges }
    }
}

/// An undirected edge `{a, b}` with `a < b` and a positive weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UndirectedEdge {
    a: usize,
    b: usize,
    weight: f64,
}

impl UndirectedEdge {
    fn new(u: usize, v: usize, weight: f64) -> Self {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        Self { a, b, weight }
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// A simple weighted undirected graph: no loops, no parallel edges.
#[derive(Debug, Clone)]
pub struct WeightedUndirectedGraph {
    labels: Vec<String>,
    edges: Vec<UndirectedEdge>,
}

impl WeightedUndirectedGraph {
    pub fn new(
        labels: Vec<String>,
        edges: Vec<(usize, usize, f64)>,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for &(u, v, w) in &edges {
            if u == v {
                return Err(GraphError::LoopEdge { vertex: u });
            }
            for idx in [u, v] {
                if idx >= n {
                    return Err(GraphError::EndpointOutOfRange {
                        index: idx,
                        vertices: n,
                    });
                }
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(GraphError::InvalidWeight {
                    source: u,
                    target: v,
                    weight: w,
                });
            }
            let e = UndirectedEdge::new(u, v, w);
            if !seen.insert((e.a, e.b)) {
                return Err(GraphError::DuplicateUndirectedEdge { a: e.a, b: e.b });
            }
            out.push(e);
        }
        Ok(Self { labels, edges: out })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> &[UndirectedEdge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// The weight metric: `d(u, v)` is the minimum over paths of the sum of
    /// inverse edge weights, `0` on the diagonal, and `+inf` when no path
    /// exists. Computed by Floyd-Warshall; graphs here stay small enough that
    /// cubic all-pairs is ample.
    pub fn weight_metric(&self) -> FiniteMetricSpace {
        let n = self.labels.len();
        let mut dist = vec![f64::INFINITY; n * n];
        for i in 0..n {
            dist[i * n + i] = 0.0;
        }
        for e in &self.edges {
            let len = 1.0 / e.weight;
            if len < dist[e.a * n + e.b] {
                dist[e.a * n + e.b] = len;
                dist[e.b * n + e.a] = len;
            }
        }
        let mut krow = vec![0.0; n];
        for k in 0..n {
            krow.copy_from_slice(&dist[k * n..k * n + n]);
            for i in 0..n {
                let dik = dist[i * n + k];
                if !dik.is_finite() {
                    continue;
                }
                let irow = &mut dist[i * n..i * n + n];
                for (j, &dkj) in krow.iter().enumerate() {
                    let alt = dik + dkj;
                    if alt < irow[j] {
                        irow[j] = alt;
                    }
                }
            }
        }
        FiniteMetricSpace {
            labels: self.labels.clone(),
            dist,
        }
    }
}

/// A finite point set with a symmetric, zero-diagonal extended distance
/// matrix. Entries are nonnegative finite reals or `f64::INFINITY`; infinity
/// is the IEEE value, never a large-magnitude sentinel.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    /// Row-major `n x n`.
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Validates all invariants: square shape, zero diagonal, symmetry,
    /// nonnegative non-NaN entries, and the triangle inequality on every
    /// triple whose three distances are finite (with [`TRIANGLE_SLACK`]).
    pub fn new(labels: Vec<String>, matrix: &[Vec<f64>]) -> Result<Self, MetricError> {
        let n = matrix.len();
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NonSquareMatrix {
                    row,
                    found: r.len(),
                    expected: n,
                });
            }
        }
        if labels.len() != n {
            return Err(MetricError::LabelCountMismatch {
                labels: labels.len(),
                size: n,
            });
        }
        for i in 0..n {
            if matrix[i][i] != 0.0 {
                return Err(MetricError::NonzeroDiagonal {
                    index: i,
                    value: matrix[i][i],
                });
            }
            for j in 0..n {
                let d = matrix[i][j];
                if d.is_nan() || d < 0.0 {
                    return Err(MetricError::InvalidDistance { i, j, value: d });
                }
                if matrix[j][i] != d {
                    return Err(MetricError::Asymmetric {
                        i,
                        j,
                        forward: d,
                        backward: matrix[j][i],
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = matrix[i][j];
                if !dij.is_finite() {
                    continue;
                }
                for k in 0..n {
                    let djk = matrix[j][k];
                    let dik = matrix[i][k];
                    if !djk.is_finite() || !dik.is_finite() {
                        continue;
                    }
                    if dik > dij + djk + TRIANGLE_SLACK {
                        return Err(MetricError::TriangleViolation {
                            i,
                            j,
                            k,
                            direct: dik,
                            via: dij + djk,
                        });
                    }
                }
            }
        }
        let mut dist = Vec::with_capacity(n * n);
        for r in matrix {
            dist.extend_from_slice(r);
        }
        Ok(Self { labels, dist })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Extended distance between points `i` and `j`; `f64::INFINITY` when the
    /// points are in different components.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.labels.len() + j]
    }

    /// Largest finite distance, or `None` if all off-diagonal distances are
    /// infinite (or the space has fewer than two points).
    pub fn max_finite_distance(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        let n = self.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.distance(i, j);
                if d.is_finite() {
                    best = Some(best.map_or(d, |b| b.max(d)));
                }
            }
        }
        best
    }
}

//! Vietoris-Rips filtrations over a finite extended metric space, truncated
//! at simplex dimension 2 (enough for homology in dimensions 0 and 1).
//!
//! A simplex enters at the maximum pairwise distance among its vertices;
//! pairs at infinite distance never span a simplex. The filtration is stored
//! as one flat list in a total order (value, then dimension, then vertex
//! order) in which every face precedes its cofaces, which makes outputs
//! byte-reproducible.

use crate::graph::FiniteMetricSpace;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FiltrationError {
    #[error("maximum simplex dimension must be 1 or 2, got {0}")]
    MaxDimOutOfRange(usize),
}

/// A simplex of dimension 0, 1, or 2, with strictly increasing vertex
/// indices. The derived ordering sorts by dimension first and then
/// lexicographically by vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Simplex {
    Vertex(usize),
    Edge(usize, usize),
    Triangle(usize, usize, usize),
}

impl Simplex {
    pub fn vertex(v: usize) -> Self {
        Simplex::Vertex(v)
    }

    /// Edge on two distinct vertices, normalized to increasing order.
    pub fn edge(u: usize, v: usize) -> Self {
        assert_ne!(u, v, "edge endpoints must be distinct");
        if u < v {
            Simplex::Edge(u, v)
        } else {
            Simplex::Edge(v, u)
        }
    }

    /// Triangle on three distinct vertices, normalized to increasing order.
    pub fn triangle(u: usize, v: usize, w: usize) -> Self {
        let mut t = [u, v, w];
        t.sort_unstable();
        assert!(t[0] < t[1] && t[1] < t[2], "triangle vertices must be distinct");
        Simplex::Triangle(t[0], t[1], t[2])
    }

    pub fn dim(&self) -> usize {
        match self {
            Simplex::Vertex(_) => 0,
            Simplex::Edge(..) => 1,
            Simplex::Triangle(..) => 2,
        }
    }

    pub fn vertices(&self) -> Vec<usize> {
        match *self {
            Simplex::Vertex(a) => vec![a],
            Simplex::Edge(a, b) => vec![a, b],
            Simplex::Triangle(a, b, c) => vec![a, b, c],
        }
    }

    /// Codimension-1 faces; empty for vertices.
    pub fn facets(&self) -> Vec<Simplex> {
        match *self {
            Simplex::Vertex(_) => vec![],
            Simplex::Edge(a, b) => vec![Simplex::Vertex(a), Simplex::Vertex(b)],
            Simplex::Triangle(a, b, c) => vec![
                Simplex::Edge(a, b),
                Simplex::Edge(a, c),
                Simplex::Edge(b, c),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiltrationEntry {
    pub simplex: Simplex,
    pub value: f64,
}

/// An ordered list of simplices with their filtration values.
#[derive(Debug, Clone)]
pub struct Filtration {
    entries: Vec<FiltrationEntry>,
}

impl Filtration {
    /// Wraps raw entries without validation; [`crate::persistence`] checks
    /// the face order before reducing. [`build_vr_filtration`] always
    /// produces valid entries.
    pub fn from_entries(entries: Vec<FiltrationEntry>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[FiltrationEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of simplices per dimension 0..=2.
    pub fn counts_by_dim(&self) -> [usize; 3] {
        let mut counts = [0usize; 3];
        for e in &self.entries {
            counts[e.simplex.dim()] += 1;
        }
        counts
    }
}

/// Builds the Vietoris-Rips filtration of `space` with simplices up to
/// `max_simplex_dim` (1 or 2). Every point appears as a vertex at value 0;
/// a pair at finite distance `d` appears as an edge at `d`; a triple with
/// all three pairwise distances finite appears as a triangle at the largest
/// of them. No simplex ever spans an infinite distance.
pub fn build_vr_filtration(
    space: &FiniteMetricSpace,
    max_simplex_dim: usize,
) -> Result<Filtration, FiltrationError> {
    if !(1..=2).contains(&max_simplex_dim) {
        return Err(FiltrationError::MaxDimOutOfRange(max_simplex_dim));
    }
    let n = space.len();
    let mut entries = Vec::new();
    for v in 0..n {
        entries.push(FiltrationEntry {
            simplex: Simplex::Vertex(v),
            value: 0.0,
        });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.distance(i, j);
            if d.is_finite() {
                entries.push(FiltrationEntry {
                    simplex: Simplex::Edge(i, j),
                    value: d,
                });
            }
        }
    }
    if max_simplex_dim == 2 {
        for i in 0..n {
            for j in (i + 1)..n {
                let dij = space.distance(i, j);
                if !dij.is_finite() {
                    continue;
                }
                for k in (j + 1)..n {
                    let dik = space.distance(i, k);
                    let djk = space.distance(j, k);
                    if dik.is_finite() && djk.is_finite() {
                        entries.push(FiltrationEntry {
                            simplex: Simplex::Triangle(i, j, k),
                            value: dij.max(dik).max(djk),
                        });
                    }
                }
            }
        }
    }
    entries.sort_unstable_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| a.simplex.cmp(&b.simplex))
    });
    Ok(Filtration { entries })
}

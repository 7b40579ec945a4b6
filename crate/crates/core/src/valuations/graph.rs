use serde::{Deserialize, Serialize};

use crate::bundle::{Bundle, MAX_ITEMS};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: Rational,
}

/// Undirected graph with nonnegative rational edge weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct WeightedGraph {
    vertices: usize,
    edges: Vec<Edge>,
}

#[derive(Deserialize)]
struct RawGraph {
    vertices: usize,
    edges: Vec<Edge>,
}

impl TryFrom<RawGraph> for WeightedGraph {
    type Error = Error;
    fn try_from(raw: RawGraph) -> Result<Self> {
        WeightedGraph::new(raw.vertices, raw.edges)
    }
}

impl WeightedGraph {
    pub fn new(vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        if vertices > MAX_ITEMS {
            return Err(Error::SizeCap { what: "graph vertices", actual: vertices as u128, limit: MAX_ITEMS as u128 });
        }
        for e in &edges {
            if e.u >= vertices || e.v >= vertices {
                return Err(Error::InvalidValuation(format!("edge ({}, {}) leaves 0..{vertices}", e.u, e.v)));
            }
            if e.u == e.v {
                return Err(Error::InvalidValuation(format!("self-loop at vertex {}", e.u)));
            }
            if e.weight.is_negative() {
                return Err(Error::InvalidValuation(format!("negative weight {} on ({}, {})", e.weight, e.u, e.v)));
            }
        }
        Ok(WeightedGraph { vertices, edges })
    }

    pub fn from_triples(vertices: usize, triples: &[(usize, usize, Rational)]) -> Result<Self> {
        let edges = triples.iter().map(|(u, v, w)| Edge { u: *u, v: *v, weight: w.clone() }).collect();
        Self::new(vertices, edges)
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> Rational {
        self.edges.iter().map(|e| &e.weight).sum()
    }

    /// Weight of edges with at least one endpoint in `side`.
    pub fn touching_weight(&self, side: Bundle) -> Rational {
        self.edges
            .iter()
            .filter(|e| side.contains(e.u) || side.contains(e.v))
            .map(|e| &e.weight)
            .sum()
    }

    /// Weight of edges crossing `(side, V - side)`.
    pub fn cut_weight(&self, side: Bundle) -> Rational {
        self.edges
            .iter()
            .filter(|e| side.contains(e.u) != side.contains(e.v))
            .map(|e| &e.weight)
            .sum()
    }

    /// True when no single vertex switch strictly increases the cut.
    pub fn is_locally_optimal_cut(&self, side: Bundle) -> bool {
        let base = self.cut_weight(side);
        (0..self.vertices).all(|x| {
            let flipped = if side.contains(x) { side.without(x) } else { side.with(x) };
            self.cut_weight(flipped) <= base
        })
    }
}

//! Edge weightings, induced vertex weights and the irregularity predicate.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{EdgeId, Graph, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightingError {
    #[error("weighting has {got} entries but the graph has {expected} edges")]
    LengthMismatch { expected: usize, got: usize },
    #[error("no weight given for edge {{{u}, {v}}}")]
    MissingEdge { u: Vertex, v: Vertex },
    #[error("edge {{{u}, {v}}} has weight 0; weights must be positive")]
    ZeroWeight { u: Vertex, v: Vertex },
    #[error("{{{u}, {v}}} is not an edge of the graph")]
    UnknownEdge { u: Vertex, v: Vertex },
    #[error("edge {{{u}, {v}}} weighted twice")]
    DuplicateEdge { u: Vertex, v: Vertex },
}

/// A positive weight on every edge, indexed by [`EdgeId`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeWeighting {
    weights: Vec<u64>,
    k: u64,
}

impl EdgeWeighting {
    pub fn new(g: &Graph, weights: Vec<u64>) -> Result<Self, WeightingError> {
        if weights.len() != g.m() {
            return Err(WeightingError::LengthMismatch {
                expected: g.m(),
                got: weights.len(),
            });
        }
        if let Some(e) = weights.iter().position(|&w| w == 0) {
            let (u, v) = g.edge(e);
            return Err(WeightingError::ZeroWeight { u, v });
        }
        let k = weights.iter().copied().max().unwrap_or(0);
        Ok(EdgeWeighting { weights, k })
    }

    /// Builds a weighting from `(u, v, w)` triples, which must cover every
    /// edge exactly once.
    pub fn from_triples<I>(g: &Graph, triples: I) -> Result<Self, WeightingError>
    where
        I: IntoIterator<Item = (Vertex, Vertex, u64)>,
    {
        let mut weights = vec![0u64; g.m()];
        let mut set = vec![false; g.m()];
        for (u, v, w) in triples {
            let e = g
                .edge_id(u, v)
                .ok_or(WeightingError::UnknownEdge { u, v })?;
            if set[e] {
                return Err(WeightingError::DuplicateEdge {
                    u: u.min(v),
                    v: u.max(v),
                });
            }
            set[e] = true;
            weights[e] = w;
        }
        if let Some(e) = set.iter().position(|&s| !s) {
            let (u, v) = g.edge(e);
            return Err(WeightingError::MissingEdge { u, v });
        }
        Self::new(g, weights)
    }

    /// Maximum assigned weight (0 for an edgeless graph).
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn get(&self, e: EdgeId) -> u64 {
        self.weights[e]
    }
}

/// The three construction layers and their sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightingLayers {
    pub f1: Vec<u64>,
    pub f2: Vec<u64>,
    pub f3: Vec<u64>,
}

impl WeightingLayers {
    pub fn f12(&self) -> Vec<u64> {
        self.f1.iter().zip(&self.f2).map(|(a, b)| a + b).collect()
    }

    pub fn total(&self) -> Vec<u64> {
        self.f1
            .iter()
            .zip(&self.f2)
            .zip(&self.f3)
            .map(|((a, b), c)| a + b + c)
            .collect()
    }
}

/// Sum of incident edge weights for every vertex.
pub fn vertex_weights(g: &Graph, w: &[u64]) -> Result<Vec<u64>, WeightingError> {
    if w.len() != g.m() {
        return Err(WeightingError::LengthMismatch {
            expected: g.m(),
            got: w.len(),
        });
    }
    let mut out = vec![0u64; g.n()];
    for (&(u, v), &x) in g.edges().iter().zip(w) {
        out[u] += x;
        out[v] += x;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Irregularity {
    Irregular,
    /// Two vertices `u < v` share `weight`; `v` is the first vertex (in index
    /// order) whose weight was already taken.
    Collision {
        u: Vertex,
        v: Vertex,
        weight: u64,
    },
}

impl Irregularity {
    pub fn is_irregular(&self) -> bool {
        matches!(self, Irregularity::Irregular)
    }
}

pub fn first_collision(vw: &[u64]) -> Irregularity {
    let mut seen: HashMap<u64, Vertex> = HashMap::with_capacity(vw.len());
    for (v, &x) in vw.iter().enumerate() {
        if let Some(&u) = seen.get(&x) {
            return Irregularity::Collision { u, v, weight: x };
        }
        seen.insert(x, v);
    }
    Irregularity::Irregular
}

pub fn is_irregular(g: &Graph, w: &[u64]) -> Result<Irregularity, WeightingError> {
    Ok(first_collision(&vertex_weights(g, w)?))
}

/// A graph admits an irregular weighting iff it has no component that is a
/// single edge and at most one isolated vertex.
pub fn finite_strength(g: &Graph) -> bool {
    let mut isolated = 0;
    for v in 0..g.n() {
        match g.degree(v) {
            0 => isolated += 1,
            1 => {
                let w = g.neighbors(v)[0];
                if g.degree(w) == 1 {
                    return false;
                }
            }
            _ => {}
        }
    }
    isolated <= 1
}

//! Leveling of B: raise each `v_k` to exactly `target(k)` by spreading its
//! deficit over its edges into S.

use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::params::ConstructionParams;
use crate::partition::VertexPartition;
use crate::weighting::vertex_weights;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Step2Error {
    #[error("target below current weight at vertex {v} (rank {rank}): weight {weight} > target {target}; scale too small")]
    NegativeSurplus {
        v: Vertex,
        rank: usize,
        weight: u64,
        target: u64,
    },
    #[error("vertex {v} of B has no neighbor in S")]
    NoSmallNeighbor { v: Vertex },
    #[error("cap exceeded at vertex {v}: per-edge increment {needed} > cap {cap}")]
    CapExceeded { v: Vertex, needed: u64, cap: u64 },
}

/// Splits `total` into `parts` near-equal pieces, larger pieces first.
pub fn split_evenly(total: u64, parts: usize) -> impl Iterator<Item = u64> {
    let base = total / parts as u64;
    let extra = (total % parts as u64) as usize;
    (0..parts).map(move |i| base + u64::from(i < extra))
}

pub fn step2_level_big(
    g: &Graph,
    p: &ConstructionParams,
    vp: &VertexPartition,
    f1: &[u64],
) -> Result<Vec<u64>, Step2Error> {
    let w1 = vertex_weights(g, f1).expect("f1 covers every edge");
    let mut f2 = vec![0u64; g.m()];
    for (idx, &v) in vp.b_order().iter().enumerate() {
        let rank = idx + 1;
        let target = p.target(rank);
        let weight = w1[v];
        if weight > target {
            return Err(Step2Error::NegativeSurplus {
                v,
                rank,
                weight,
                target,
            });
        }
        let surplus = target - weight;
        let edges: Vec<usize> = g
            .neighbors(v)
            .iter()
            .zip(g.incident(v))
            .filter(|(&u, _)| !vp.in_big(u))
            .map(|(_, &e)| e)
            .collect();
        if edges.is_empty() {
            if surplus == 0 {
                continue;
            }
            return Err(Step2Error::NoSmallNeighbor { v });
        }
        let needed = surplus.div_ceil(edges.len() as u64);
        if needed > p.f2_cap {
            return Err(Step2Error::CapExceeded {
                v,
                needed,
                cap: p.f2_cap,
            });
        }
        // neighbors are sorted, so increments go out in ascending neighbor order
        for (&e, add) in edges.iter().zip(split_evenly(surplus, edges.len())) {
            f2[e] = add;
        }
    }
    Ok(f2)
}

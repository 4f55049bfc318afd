//! Initial weights: heavy window edges inside B, level-graded edges across
//! B and S, and weight 1 everywhere else.

use crate::graph::Graph;
use crate::params::ConstructionParams;
use crate::partition::VertexPartition;

/// Which class an edge falls in with respect to the partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    /// Both ends in B.
    Big,
    /// One end in B, the other in S at the given level.
    Cross(u8),
    /// Both ends in S.
    Small,
}

pub fn edge_class(g: &Graph, vp: &VertexPartition, e: usize) -> EdgeClass {
    let (u, v) = g.edge(e);
    match (vp.level(u), vp.level(v)) {
        (0, 0) => EdgeClass::Big,
        (0, l) | (l, 0) => EdgeClass::Cross(l),
        _ => EdgeClass::Small,
    }
}

pub fn step1_initial(g: &Graph, p: &ConstructionParams, vp: &VertexPartition) -> Vec<u64> {
    let layout = vp.layout();
    let floor = p.floor_nd();
    let (plain, corrected) = if p.frac_at_least_half() {
        (floor + 1, floor + 2)
    } else {
        (floor + 2, floor + 1)
    };
    (0..g.m())
        .map(|e| match edge_class(g, vp, e) {
            EdgeClass::Big => {
                let (u, v) = g.edge(e);
                if layout.in_window(vp.bin(u), vp.bin(v)) {
                    if vp.coins()[e] {
                        corrected
                    } else {
                        plain
                    }
                } else {
                    1
                }
            }
            EdgeClass::Cross(l) => l as u64 * p.omega + p.ceil_nd(),
            EdgeClass::Small => 1,
        })
        .collect()
}

/// An edge whose weight left the range its class allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangeViolation {
    pub edge: usize,
    pub class: EdgeClass,
    pub weight: u64,
    pub lo: u64,
    pub hi: u64,
}

/// Checks per-class ranges: B-B in `[1, floor(n/d)+2]`, B-S in
/// `[ceil(n/d), ceil(n/d) + 13 omega + cross_extra]`, S-S exactly 1.
pub fn check_class_ranges(
    g: &Graph,
    p: &ConstructionParams,
    vp: &VertexPartition,
    w: &[u64],
    cross_extra: u64,
) -> Result<(), RangeViolation> {
    for (e, &weight) in w.iter().enumerate() {
        let class = edge_class(g, vp, e);
        let (lo, hi) = match class {
            EdgeClass::Big => (1, p.floor_nd() + 2),
            EdgeClass::Cross(_) => (p.ceil_nd(), p.ceil_nd() + 13 * p.omega + cross_extra),
            EdgeClass::Small => (1, 1),
        };
        if weight < lo || weight > hi {
            return Err(RangeViolation {
                edge: e,
                class,
                weight,
                lo,
                hi,
            });
        }
    }
    Ok(())
}

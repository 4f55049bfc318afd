//! Random vertex partition into bins, the big set B and the small sets
//! S_1..S_13, plus the random "corrected" labels on B-B edges.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{EdgeId, Graph, Vertex};
use crate::params::ConstructionParams;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("graph is not regular")]
    NotRegular,
    #[error("graph is {actual}-regular but parameters assume d = {expected}")]
    DegreeMismatch { expected: usize, actual: usize },
    #[error("graph has {actual} vertices but parameters assume n = {expected}")]
    OrderMismatch { expected: usize, actual: usize },
    #[error("partition degenerate at this scale: d = {d} <= s* = {s_star}")]
    Degenerate { d: usize, s_star: usize },
    #[error("expected {expected} draws, got {got}")]
    DrawCount { expected: usize, got: usize },
    #[error(
        "resampling budget of {budget} rounds exhausted; conditions unattainable at this scale"
    )]
    BudgetExhausted { budget: usize },
}

/// Level of a vertex: 0 for B, `l` in 1..=13 for S_l.
pub type Level = u8;

/// Bin index in `1..=d` for a draw interpreted as `x / 2^64`.
#[inline]
pub fn bin_of(x: u64, d: usize) -> u32 {
    (((x as u128) * (d as u128)) >> 64) as u32 + 1
}

/// Whether a coin draw lands below `alpha = alpha_num / d`.
#[inline]
pub fn coin_of(draw: u64, alpha_num: u64, d: usize) -> bool {
    (draw as u128) * (d as u128) < (alpha_num as u128) << 64
}

/// Maps bins to levels for fixed `d` and `s*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinLayout {
    pub d: usize,
    pub s_star: usize,
}

impl BinLayout {
    pub fn new(p: &ConstructionParams) -> Self {
        BinLayout {
            d: p.d,
            s_star: p.s_star,
        }
    }

    /// Bins `1..=d-s*` form B.
    pub fn big_bins(&self) -> usize {
        self.d.saturating_sub(self.s_star)
    }

    /// S_l collects bins in `(d - (14-l) s*/13, d - (13-l) s*/13]`.
    #[inline]
    pub fn level(&self, bin: u32) -> Level {
        let bin = bin as usize;
        if bin <= self.big_bins() {
            return 0;
        }
        let h = self.s_star / 13;
        (13 - (self.d - bin) / h) as Level
    }

    /// For `v` in B_i and `u` in B_j, whether j lies in v's window
    /// `d-s*-i+1 < j <= d-s*`. The relation is symmetric in i and j.
    #[inline]
    pub fn in_window(&self, i: u32, j: u32) -> bool {
        let top = self.big_bins();
        (i as usize) <= top && (j as usize) <= top && i as usize + j as usize >= top + 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPartition {
    layout: BinLayout,
    x: Vec<u64>,
    bin: Vec<u32>,
    level: Vec<Level>,
    coin: Vec<bool>,
    b_order: Vec<Vertex>,
    rank: Vec<usize>,
}

impl VertexPartition {
    /// Assembles a partition from explicit draws: one `x` per vertex and one
    /// label coin per edge (the coin only matters on B-B edges).
    pub fn from_draws(
        g: &Graph,
        p: &ConstructionParams,
        x: Vec<u64>,
        coin: Vec<bool>,
    ) -> Result<Self, PartitionError> {
        if x.len() != g.n() {
            return Err(PartitionError::DrawCount {
                expected: g.n(),
                got: x.len(),
            });
        }
        if coin.len() != g.m() {
            return Err(PartitionError::DrawCount {
                expected: g.m(),
                got: coin.len(),
            });
        }
        let layout = BinLayout::new(p);
        let mut vp = VertexPartition {
            layout,
            bin: vec![0; x.len()],
            level: vec![0; x.len()],
            x,
            coin,
            b_order: Vec::new(),
            rank: Vec::new(),
        };
        for v in 0..vp.x.len() {
            vp.set_x(v, vp.x[v]);
        }
        vp.rebuild_order();
        Ok(vp)
    }

    pub(crate) fn set_x(&mut self, v: Vertex, x: u64) {
        self.x[v] = x;
        self.bin[v] = bin_of(x, self.layout.d);
        self.level[v] = self.layout.level(self.bin[v]);
    }

    pub(crate) fn set_coin(&mut self, e: EdgeId, c: bool) {
        self.coin[e] = c;
    }

    pub(crate) fn rebuild_order(&mut self) {
        let mut order: Vec<Vertex> = (0..self.x.len()).filter(|&v| self.level[v] == 0).collect();
        order.sort_unstable_by_key(|&v| (self.x[v], v));
        self.rank = vec![0; self.x.len()];
        for (k, &v) in order.iter().enumerate() {
            self.rank[v] = k + 1;
        }
        self.b_order = order;
    }

    pub fn layout(&self) -> BinLayout {
        self.layout
    }

    pub fn x(&self) -> &[u64] {
        &self.x
    }

    pub fn coins(&self) -> &[bool] {
        &self.coin
    }

    pub fn bin(&self, v: Vertex) -> u32 {
        self.bin[v]
    }

    pub fn level(&self, v: Vertex) -> Level {
        self.level[v]
    }

    pub fn levels(&self) -> &[Level] {
        &self.level
    }

    pub fn in_big(&self, v: Vertex) -> bool {
        self.level[v] == 0
    }

    /// B sorted by `x` ascending, ties by vertex index.
    pub fn b_order(&self) -> &[Vertex] {
        &self.b_order
    }

    /// 1-based position of `v` in [`Self::b_order`]; 0 for vertices of S.
    pub fn rank(&self, v: Vertex) -> usize {
        self.rank[v]
    }

    pub fn is_corrected(&self, g: &Graph, e: EdgeId) -> bool {
        let (u, v) = g.edge(e);
        self.coin[e] && self.in_big(u) && self.in_big(v)
    }

    /// Members of level `l` (0 = B) in index order.
    pub fn members(&self, l: Level) -> Vec<Vertex> {
        (0..self.x.len()).filter(|&v| self.level[v] == l).collect()
    }
}

pub(crate) fn check_regular(g: &Graph, p: &ConstructionParams) -> Result<(), PartitionError> {
    if g.n() != p.n {
        return Err(PartitionError::OrderMismatch {
            expected: p.n,
            actual: g.n(),
        });
    }
    let d = g.regular_degree().ok_or(PartitionError::NotRegular)?;
    if d != p.d {
        return Err(PartitionError::DegreeMismatch {
            expected: p.d,
            actual: d,
        });
    }
    Ok(())
}

/// Draws `X_v` for every vertex and a label coin for every edge.
pub fn sample_partition(
    g: &Graph,
    p: &ConstructionParams,
    seed: u64,
) -> Result<VertexPartition, PartitionError> {
    check_regular(g, p)?;
    if p.d <= p.s_star {
        return Err(PartitionError::Degenerate {
            d: p.d,
            s_star: p.s_star,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<u64> = (0..g.n()).map(|_| rng.random()).collect();
    let coin: Vec<bool> = (0..g.m())
        .map(|_| coin_of(rng.random(), p.alpha_num, p.d))
        .collect();
    VertexPartition::from_draws(g, p, x, coin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GraphFamilySpec};
    use crate::params::derive_params;

    #[test]
    fn bin_boundaries() {
        assert_eq!(bin_of(0, 10), 1);
        assert_eq!(bin_of(u64::MAX, 10), 10);
        // 2^64 / 4 is exactly the start of bin 2 for d = 4
        assert_eq!(bin_of(1u64 << 62, 4), 2);
        assert_eq!(bin_of((1u64 << 62) - 1, 4), 1);
    }

    #[test]
    fn coin_extremes() {
        assert!(coin_of(u64::MAX, 10, 10));
        assert!(!coin_of(0, 0, 10));
        assert!(coin_of((1u64 << 63) - 1, 5, 10));
        assert!(!coin_of(1u64 << 63, 5, 10));
    }

    #[test]
    fn levels_split_small_bins_evenly() {
        let layout = BinLayout { d: 100, s_star: 26 };
        assert_eq!(layout.level(74), 0);
        assert_eq!(layout.level(75), 1);
        assert_eq!(layout.level(76), 1);
        assert_eq!(layout.level(77), 2);
        assert_eq!(layout.level(99), 13);
        assert_eq!(layout.level(100), 13);
        assert!(layout.in_window(74, 2));
        assert!(!layout.in_window(74, 1));
        assert!(layout.in_window(2, 74));
        assert!(!layout.in_window(1, 74));
    }

    #[test]
    fn degenerate_scale_rejected() {
        let g = generate(&GraphFamilySpec::random_regular(60, 10, 1)).unwrap();
        let p = derive_params(60, 10, 0.1, 0.04).unwrap();
        assert_eq!(p.s_star, 13);
        assert_eq!(
            sample_partition(&g, &p, 0).unwrap_err(),
            PartitionError::Degenerate { d: 10, s_star: 13 }
        );
    }

    #[test]
    fn partition_properties() {
        let g = generate(&GraphFamilySpec::random_regular(1200, 300, 5)).unwrap();
        let p = derive_params(1200, 300, 0.1, 0.04).unwrap();
        let vp = sample_partition(&g, &p, 9).unwrap();
        let mut sizes = [0usize; 14];
        for v in 0..g.n() {
            sizes[vp.level(v) as usize] += 1;
            assert_eq!(vp.bin(v), bin_of(vp.x()[v], 300));
        }
        assert_eq!(sizes.iter().sum::<usize>(), 1200);
        assert_eq!(sizes[0], vp.b_order().len());
        // recount bin sizes by scanning the draws directly
        let mut by_scan = vec![0usize; 301];
        for &x in vp.x() {
            let i = ((x as f64 / 2f64.powi(64)) * 300.0).floor() as usize + 1;
            by_scan[i.min(300)] += 1;
        }
        let mut stored = vec![0usize; 301];
        for v in 0..g.n() {
            stored[vp.bin(v) as usize] += 1;
        }
        let close = by_scan.iter().zip(&stored).filter(|(a, b)| a != b).count();
        // float scan can only disagree for draws within rounding of a boundary
        assert!(close <= 2);
        for w in vp.b_order().windows(2) {
            assert!((vp.x()[w[0]], w[0]) < (vp.x()[w[1]], w[1]));
        }
        for e in 0..g.m() {
            if vp.is_corrected(&g, e) {
                let (a, b) = g.edge(e);
                assert!(vp.in_big(a) && vp.in_big(b));
            }
        }
        assert_eq!(vp, sample_partition(&g, &p, 9).unwrap());
    }
}

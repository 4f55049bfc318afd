//! Processing order of the small set for the distinguishing step.

use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::partition::VertexPartition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("vertex {v} is an isolated component of the induced graph on S_13")]
    SingletonComponent { v: Vertex },
    #[error("vertex {v} at level {level} has no forward edge but is not a component root of S_13")]
    UnexpectedTerminal { v: Vertex, level: u8 },
}

/// The ordering `v_1, v_2, ...` of S together with the terminal pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SOrdering {
    pub order: Vec<Vertex>,
    /// Position in `order`, `usize::MAX` for vertices of B.
    pub position: Vec<usize>,
    /// S_13 components, each listed in reversed BFS order.
    pub components: Vec<Vec<Vertex>>,
    /// `r_j`: second-to-last vertex of component j.
    pub r: Vec<Vertex>,
    /// `t_j`: last vertex (the BFS root) of component j.
    pub t: Vec<Vertex>,
}

impl SOrdering {
    pub fn is_forward(&self, from: Vertex, to: Vertex) -> bool {
        self.position[from] < self.position[to]
    }

    pub fn has_forward_edge(&self, g: &Graph, v: Vertex) -> bool {
        g.neighbors(v)
            .iter()
            .any(|&u| self.position[u] != usize::MAX && self.position[u] > self.position[v])
    }
}

/// S_1..S_12 by increasing `x`, then each S_13 component (by smallest
/// vertex) in reversed BFS order from its smallest vertex.
pub fn build_s_order(g: &Graph, vp: &VertexPartition) -> Result<SOrdering, OrderError> {
    let n = g.n();
    let mut early: Vec<Vertex> = (0..n)
        .filter(|&v| (1..=12).contains(&vp.level(v)))
        .collect();
    early.sort_unstable_by_key(|&v| (vp.x()[v], v));

    let in_top = |v: Vertex| vp.level(v) == 13;
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for root in (0..n).filter(|&v| in_top(v)) {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut bfs = vec![root];
        let mut head = 0;
        while head < bfs.len() {
            let v = bfs[head];
            head += 1;
            for &u in g.neighbors(v) {
                if in_top(u) && !seen[u] {
                    seen[u] = true;
                    bfs.push(u);
                }
            }
        }
        if bfs.len() < 2 {
            return Err(OrderError::SingletonComponent { v: root });
        }
        bfs.reverse();
        components.push(bfs);
    }

    let mut order = early;
    let mut r = Vec::with_capacity(components.len());
    let mut t = Vec::with_capacity(components.len());
    for comp in &components {
        let len = comp.len();
        r.push(comp[len - 2]);
        t.push(comp[len - 1]);
        order.extend_from_slice(comp);
    }
    let mut position = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let ordering = SOrdering {
        order,
        position,
        components,
        r,
        t,
    };

    let mut is_root = vec![false; n];
    for &v in &ordering.t {
        is_root[v] = true;
    }
    for &v in &ordering.order {
        if !is_root[v] && !ordering.has_forward_edge(g, v) {
            return Err(OrderError::UnexpectedTerminal {
                v,
                level: vp.level(v),
            });
        }
    }
    Ok(ordering)
}

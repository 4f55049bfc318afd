//! Immutable simple graphs over dense vertex indices, plus the edge-list
//! text format.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

/// Vertex index, always in `0..n`.
pub type Vertex = usize;

/// Position of an edge in the canonical (lexicographically sorted) edge list.
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: Vertex },
    #[error("line {line}: duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { line: usize, u: Vertex, v: Vertex },
    #[error("line {line}: malformed token {token:?}")]
    Malformed { line: usize, token: String },
    #[error("line {line}: vertex {vertex} out of range for n = {n}")]
    OutOfRange {
        line: usize,
        vertex: Vertex,
        n: usize,
    },
}

/// A simple undirected graph.
///
/// Edges are stored once as `(min, max)` pairs in sorted order; an edge's
/// position in that order is its [`EdgeId`], and every per-edge layer in this
/// crate is a `Vec` indexed by it. Neighbor lists are sorted ascending and
/// carry the matching edge id alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<Vertex>>,
    inc: Vec<Vec<EdgeId>>,
}

impl Graph {
    /// Builds a graph from an edge iterator, rejecting loops and duplicates.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (line, (u, v)) in edges.into_iter().enumerate() {
            let line = line + 1;
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange {
                    line,
                    vertex: u.max(v),
                    n,
                });
            }
            if u == v {
                return Err(GraphError::SelfLoop { line, vertex: u });
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge {
                    line,
                    u: key.0,
                    v: key.1,
                });
            }
            list.push(key);
        }
        Ok(Self::from_canonical(n, list))
    }

    fn from_canonical(n: usize, mut edges: Vec<(Vertex, Vertex)>) -> Self {
        edges.sort_unstable();
        let mut adj: Vec<Vec<(Vertex, EdgeId)>> = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        let mut nbrs = Vec::with_capacity(n);
        let mut inc = Vec::with_capacity(n);
        for mut list in adj {
            list.sort_unstable();
            nbrs.push(list.iter().map(|&(w, _)| w).collect());
            inc.push(list.iter().map(|&(_, e)| e).collect());
        }
        let g = Graph {
            n,
            edges,
            adj: nbrs,
            inc,
        };
        debug_assert!(g.is_consistent());
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list, sorted, each pair `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e]
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    /// Edge ids incident to `v`, aligned with [`Graph::neighbors`].
    pub fn incident(&self, v: Vertex) -> &[EdgeId] {
        &self.inc[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn edge_id(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        if u >= self.n || v >= self.n {
            return None;
        }
        self.adj[u].binary_search(&v).ok().map(|i| self.inc[u][i])
    }

    /// `Some(d)` when every vertex has degree `d`. The empty graph on zero
    /// vertices is not considered regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first()?.len();
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    fn is_consistent(&self) -> bool {
        let mut count = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            if u >= v {
                return false;
            }
            count[u] += 1;
            count[v] += 1;
        }
        self.edges.windows(2).all(|w| w[0] < w[1])
            && (0..self.n).all(|v| {
                count[v] == self.adj[v].len()
                    && self.adj[v]
                        .iter()
                        .zip(&self.inc[v])
                        .all(|(&w, &e)| self.edges[e] == (v.min(w), v.max(w)))
            })
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Parses the edge-list format: optional `n <count>` header, `#` comments,
/// one `u v` pair per line.
pub fn load_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut declared_n = None;
    let mut pairs = Vec::new();
    let mut lines_of = Vec::new();
    let mut first_content = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if first_content && tokens.first() == Some(&"n") {
            first_content = false;
            if tokens.len() != 2 {
                return Err(GraphError::Malformed {
                    line,
                    token: trimmed.to_string(),
                });
            }
            declared_n = Some(parse_index(tokens[1], line)?);
            continue;
        }
        first_content = false;
        if tokens.len() != 2 {
            return Err(GraphError::Malformed {
                line,
                token: trimmed.to_string(),
            });
        }
        let u = parse_index(tokens[0], line)?;
        let v = parse_index(tokens[1], line)?;
        pairs.push((u, v));
        lines_of.push(line);
    }
    let n = match declared_n {
        Some(n) => n,
        None => pairs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0),
    };
    // re-run validation with real line numbers
    let mut seen = HashSet::new();
    for (&(u, v), &line) in pairs.iter().zip(&lines_of) {
        if u >= n || v >= n {
            return Err(GraphError::OutOfRange {
                line,
                vertex: u.max(v),
                n,
            });
        }
        if u == v {
            return Err(GraphError::SelfLoop { line, vertex: u });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(GraphError::DuplicateEdge {
                line,
                u: u.min(v),
                v: u.max(v),
            });
        }
    }
    Ok(Graph::from_canonical(
        n,
        pairs
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect(),
    ))
}

fn parse_index(token: &str, line: usize) -> Result<usize, GraphError> {
    token.parse::<usize>().map_err(|_| GraphError::Malformed {
        line,
        token: token.to_string(),
    })
}

/// Writes `n <count>` followed by the canonical edge list.
pub fn save_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + g.m() * 12);
    let _ = writeln!(out, "n {}", g.n());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

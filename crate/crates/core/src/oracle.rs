//! Exhaustive irregularity strength for tiny graphs.

use thiserror::Error;

use crate::bounds::counting_lower_bound;
use crate::graph::Graph;
use crate::weighting::{finite_strength, EdgeWeighting};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("node budget of {budget} exhausted while searching k = {k}")]
    BudgetExhausted { budget: u64, k: u64 },
    #[error("no irregular weighting with k <= {k_max}")]
    KMaxReached { k_max: u64 },
    #[error("graph has infinite irregularity strength")]
    InfiniteStrength,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    /// `None` when the strength is infinite.
    pub s: Option<u64>,
    pub witness: Option<EdgeWeighting>,
    pub nodes_explored: u64,
}

pub fn exact_strength(g: &Graph, k_max: u64) -> Result<ExactResult, OracleError> {
    exact_strength_with_budget(g, k_max, DEFAULT_NODE_BUDGET)
}

pub fn exact_strength_with_budget(
    g: &Graph,
    k_max: u64,
    budget: u64,
) -> Result<ExactResult, OracleError> {
    if !finite_strength(g) {
        return Ok(ExactResult {
            s: None,
            witness: None,
            nodes_explored: 0,
        });
    }
    if g.m() == 0 {
        let witness = EdgeWeighting::new(g, Vec::new()).expect("empty weighting");
        return Ok(ExactResult {
            s: Some(0),
            witness: Some(witness),
            nodes_explored: 0,
        });
    }
    let mut nodes = 0;
    for k in counting_lower_bound(g)..=k_max {
        let (found, used) = search_at(g, k, budget - nodes)?;
        nodes += used;
        if let Some(w) = found {
            let witness = EdgeWeighting::new(g, w).expect("search assigns weights in [1, k]");
            return Ok(ExactResult {
                s: Some(k),
                witness: Some(witness),
                nodes_explored: nodes,
            });
        }
    }
    Err(OracleError::KMaxReached { k_max })
}

/// Exhaustive search over `{1..k}^E`. Returns the first irregular weighting
/// in lexicographic edge order, or `None` once the space is exhausted, with
/// the number of nodes visited.
pub fn search_at(g: &Graph, k: u64, budget: u64) -> Result<(Option<Vec<u64>>, u64), OracleError> {
    let mut s = Search {
        g,
        k,
        budget,
        nodes: 0,
        w: vec![0; g.m()],
        partial: vec![0; g.n()],
        left: (0..g.n()).map(|v| g.degree(v) as u64).collect(),
        done: vec![0; max_weight(g, k) + 1],
    };
    let found = s.extend(0)?;
    Ok((found.then(|| s.w.clone()), s.nodes))
}

fn max_weight(g: &Graph, k: u64) -> usize {
    (0..g.n()).map(|v| g.degree(v)).max().unwrap_or(0) * k as usize
}

struct Search<'a> {
    g: &'a Graph,
    k: u64,
    budget: u64,
    nodes: u64,
    w: Vec<u64>,
    partial: Vec<u64>,
    left: Vec<u64>,
    /// How many completed vertices hold each weight.
    done: Vec<u32>,
}

impl Search<'_> {
    /// Whether some value in `[lo, hi]` is still free.
    fn reachable(&self, lo: u64, hi: u64) -> bool {
        (lo..=hi).any(|x| self.done[x as usize] == 0)
    }

    fn open_ok(&self, x: usize) -> bool {
        self.left[x] == 0 || {
            let lo = self.partial[x] + self.left[x];
            self.reachable(lo, self.partial[x] + self.left[x] * self.k)
        }
    }

    /// A vertex that just closed can block any open vertex; otherwise only
    /// the two endpoints changed.
    fn feasible(&self, u: usize, v: usize) -> bool {
        if self.left[u] > 0 && self.left[v] > 0 {
            self.open_ok(u) && self.open_ok(v)
        } else {
            (0..self.g.n()).all(|x| self.open_ok(x))
        }
    }

    fn extend(&mut self, e: usize) -> Result<bool, OracleError> {
        if e == self.g.m() {
            return Ok(true);
        }
        let (u, v) = self.g.edge(e);
        for c in 1..=self.k {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(OracleError::BudgetExhausted {
                    budget: self.budget,
                    k: self.k,
                });
            }
            self.w[e] = c;
            self.partial[u] += c;
            self.partial[v] += c;
            self.left[u] -= 1;
            self.left[v] -= 1;
            let mut ok = true;
            let mut closed = Vec::with_capacity(2);
            for x in [u, v] {
                if self.left[x] == 0 {
                    let slot = &mut self.done[self.partial[x] as usize];
                    if *slot > 0 {
                        ok = false;
                    }
                    *slot += 1;
                    closed.push(x);
                }
            }
            if ok && self.feasible(u, v) && self.extend(e + 1)? {
                return Ok(true);
            }
            for x in closed {
                self.done[self.partial[x] as usize] -= 1;
            }
            self.partial[u] -= c;
            self.partial[v] -= c;
            self.left[u] += 1;
            self.left[v] += 1;
        }
        self.w[e] = 0;
        Ok(false)
    }
}

/// Whether `w` attains the exact strength of `g`.
pub fn certify_optimal(g: &Graph, w: &EdgeWeighting) -> Result<bool, OracleError> {
    let res = exact_strength(g, w.k().max(1))?;
    match res.s {
        None => Err(OracleError::InfiniteStrength),
        Some(s) => Ok(s == w.k()),
    }
}

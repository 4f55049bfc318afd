//! Randomized local search for an irregular weighting of any graph with
//! finite strength.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bounds::counting_lower_bound;
use crate::graph::{Graph, Vertex};
use crate::weighting::{finite_strength, EdgeWeighting};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FallbackError {
    #[error(
        "graph has infinite irregularity strength (an isolated edge or two isolated vertices)"
    )]
    InfiniteStrength,
    #[error("no irregular weighting found with k up to {k_max}")]
    GaveUp { k_max: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FallbackConfig {
    /// A restart happens after `stagnation_factor * m` moves without a new
    /// best collision count.
    pub stagnation_factor: usize,
    /// Restarts per value of k before k is raised.
    pub restarts: usize,
    /// Probability of accepting a move that leaves the collision count unchanged.
    pub sideways: f64,
    /// Optional ceiling on k; `None` searches until success.
    pub k_max: Option<u64>,
}

impl Default for FallbackConfig {
    fn default() -> Self {
        FallbackConfig {
            stagnation_factor: 50,
            restarts: 20,
            sideways: 0.2,
            k_max: None,
        }
    }
}

pub fn fallback_greedy(g: &Graph, seed: u64, k_start: u64) -> Result<EdgeWeighting, FallbackError> {
    fallback_greedy_with(g, seed, k_start, &FallbackConfig::default())
}

pub fn fallback_greedy_with(
    g: &Graph,
    seed: u64,
    k_start: u64,
    cfg: &FallbackConfig,
) -> Result<EdgeWeighting, FallbackError> {
    if !finite_strength(g) {
        return Err(FallbackError::InfiniteStrength);
    }
    if g.m() == 0 {
        return Ok(EdgeWeighting::new(g, Vec::new()).expect("empty weighting"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k = k_start.max(counting_lower_bound(g)).max(1);
    loop {
        if cfg.k_max.is_some_and(|cap| k > cap) {
            return Err(FallbackError::GaveUp { k_max: k - 1 });
        }
        for attempt in 0..cfg.restarts.max(1) {
            let init = if attempt == 0 {
                vec![k.div_ceil(2); g.m()]
            } else {
                (0..g.m()).map(|_| rng.random_range(1..=k)).collect()
            };
            if let Some(w) = Search::new(g, k, init).run(&mut rng, cfg) {
                return Ok(EdgeWeighting::new(g, w).expect("weights lie in [1, k]"));
            }
        }
        k += 1;
    }
}

/// Vertex weights bucketed by value, with the colliding values indexed for
/// uniform sampling.
struct Search<'a> {
    g: &'a Graph,
    k: u64,
    w: Vec<u64>,
    vw: Vec<u64>,
    buckets: HashMap<u64, Vec<Vertex>>,
    hot: Vec<u64>,
    hot_pos: HashMap<u64, usize>,
    pairs: u64,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph, k: u64, w: Vec<u64>) -> Self {
        let mut s = Search {
            g,
            k,
            vw: vec![0; g.n()],
            w,
            buckets: HashMap::new(),
            hot: Vec::new(),
            hot_pos: HashMap::new(),
            pairs: 0,
        };
        for (&(u, v), &x) in g.edges().iter().zip(&s.w) {
            s.vw[u] += x;
            s.vw[v] += x;
        }
        for v in 0..g.n() {
            s.insert(v, s.vw[v]);
        }
        s
    }

    fn count(&self, x: u64) -> u64 {
        self.buckets.get(&x).map_or(0, |b| b.len() as u64)
    }

    fn insert(&mut self, v: Vertex, x: u64) {
        let b = self.buckets.entry(x).or_default();
        b.push(v);
        let c = b.len();
        self.pairs += c as u64 - 1;
        if c == 2 {
            self.hot_pos.insert(x, self.hot.len());
            self.hot.push(x);
        }
    }

    fn remove(&mut self, v: Vertex, x: u64) {
        let b = self.buckets.get_mut(&x).expect("vertex is bucketed");
        let i = b.iter().position(|&u| u == v).expect("vertex is bucketed");
        b.swap_remove(i);
        let c = b.len();
        self.pairs -= c as u64;
        if c == 0 {
            self.buckets.remove(&x);
        }
        if c == 1 {
            let i = self.hot_pos.remove(&x).expect("value was colliding");
            self.hot.swap_remove(i);
            if let Some(&moved) = self.hot.get(i) {
                self.hot_pos.insert(moved, i);
            }
        }
    }

    /// Collision pairs after shifting both endpoints of an edge by `t`.
    fn pairs_after(&self, u: Vertex, v: Vertex, t: i64) -> u64 {
        let (a, b) = (self.vw[u], self.vw[v]);
        let (a2, b2) = ((a as i64 + t) as u64, (b as i64 + t) as u64);
        let mut p = self.pairs;
        // take u out, then v, then put them back at the new values
        p -= self.count(a) - 1;
        p -= self.count(b) - 1 - u64::from(a == b);
        let removed = |x: u64| u64::from(x == a) + u64::from(x == b);
        p += self.count(a2) - removed(a2);
        p += self.count(b2) - removed(b2) + u64::from(a2 == b2);
        p
    }

    fn apply(&mut self, e: usize, value: u64) {
        let (u, v) = self.g.edge(e);
        let old = self.w[e];
        let (a, b) = (self.vw[u], self.vw[v]);
        self.remove(u, a);
        self.remove(v, b);
        self.vw[u] = a + value - old;
        self.vw[v] = b + value - old;
        self.insert(u, self.vw[u]);
        self.insert(v, self.vw[v]);
        self.w[e] = value;
    }

    fn run(mut self, rng: &mut ChaCha8Rng, cfg: &FallbackConfig) -> Option<Vec<u64>> {
        let window = cfg.stagnation_factor.max(1) * self.g.m();
        let mut best = self.pairs;
        let mut idle = 0usize;
        while self.pairs > 0 {
            if idle >= window {
                return None;
            }
            let x = self.hot[rng.random_range(0..self.hot.len())];
            let bucket = &self.buckets[&x];
            let v = bucket[rng.random_range(0..bucket.len())];
            let inc = self.g.incident(v);
            let e = inc[rng.random_range(0..inc.len())];
            let (a, b) = self.g.edge(e);
            let cur = self.w[e];
            let mut choice: Option<(u64, u64)> = None;
            for c in (1..=self.k).filter(|&c| c != cur) {
                let p = self.pairs_after(a, b, c as i64 - cur as i64);
                if choice.is_none_or(|(bp, _)| p < bp) {
                    choice = Some((p, c));
                }
            }
            let Some((p, c)) = choice else {
                idle += 1;
                continue;
            };
            let accept = p < self.pairs || (p == self.pairs && rng.random_bool(cfg.sideways));
            if accept {
                self.apply(e, c);
            }
            if self.pairs < best {
                best = self.pairs;
                idle = 0;
            } else {
                idle += 1;
            }
        }
        Some(self.w)
    }
}

//! Generators for the graph families used in tests and benchmarks.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    RandomRegular,
    Complete,
    Cycle,
    Circulant,
    Hypercube,
    Petersen,
}

impl FromStr for Family {
    type Err = GenerateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "random-regular" => Family::RandomRegular,
            "complete" => Family::Complete,
            "cycle" => Family::Cycle,
            "circulant" => Family::Circulant,
            "hypercube" => Family::Hypercube,
            "petersen" => Family::Petersen,
            other => return Err(GenerateError::UnknownFamily(other.to_string())),
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::RandomRegular => "random-regular",
            Family::Complete => "complete",
            Family::Cycle => "cycle",
            Family::Circulant => "circulant",
            Family::Hypercube => "hypercube",
            Family::Petersen => "petersen",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("unknown graph family {0:?}")]
    UnknownFamily(String),
    #[error("n*d = {n}*{d} is odd; no {d}-regular graph on {n} vertices")]
    OddDegreeSum { n: usize, d: usize },
    #[error("degree {d} must be below n = {n}")]
    DegreeTooLarge { n: usize, d: usize },
    #[error("family {family} needs parameter {param}")]
    MissingParameter { family: Family, param: &'static str },
    #[error("invalid parameters for {family}: {reason}")]
    Invalid { family: Family, reason: String },
}

/// Everything needed to reproduce a generated graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFamilySpec {
    pub family: Family,
    pub n: Option<usize>,
    pub d: Option<usize>,
    /// Circulant offsets; each `s` joins `i` and `i + s (mod n)`.
    pub connections: Vec<usize>,
    pub seed: u64,
}

impl GraphFamilySpec {
    pub fn new(family: Family) -> Self {
        GraphFamilySpec {
            family,
            n: None,
            d: None,
            connections: Vec::new(),
            seed: 0,
        }
    }

    pub fn random_regular(n: usize, d: usize, seed: u64) -> Self {
        GraphFamilySpec {
            n: Some(n),
            d: Some(d),
            seed,
            ..Self::new(Family::RandomRegular)
        }
    }

    fn need_n(&self) -> Result<usize, GenerateError> {
        self.n.ok_or(GenerateError::MissingParameter {
            family: self.family,
            param: "n",
        })
    }

    fn need_d(&self) -> Result<usize, GenerateError> {
        self.d.ok_or(GenerateError::MissingParameter {
            family: self.family,
            param: "d",
        })
    }
}

/// Builds the requested graph. Pure in `spec`: equal specs give equal graphs.
pub fn generate(spec: &GraphFamilySpec) -> Result<Graph, GenerateError> {
    let invalid = |reason: String| GenerateError::Invalid {
        family: spec.family,
        reason,
    };
    let edges: Vec<(Vertex, Vertex)>;
    let n;
    match spec.family {
        Family::RandomRegular => {
            n = spec.need_n()?;
            let d = spec.need_d()?;
            if d >= n {
                return Err(GenerateError::DegreeTooLarge { n, d });
            }
            if (n * d) % 2 == 1 {
                return Err(GenerateError::OddDegreeSum { n, d });
            }
            edges = random_regular_edges(n, d, spec.seed);
        }
        Family::Complete => {
            n = spec.need_n()?;
            edges = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect();
        }
        Family::Cycle => {
            n = spec.need_n()?;
            if n < 3 {
                return Err(invalid(format!("cycle needs n >= 3, got {n}")));
            }
            edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
        }
        Family::Circulant => {
            n = spec.need_n()?;
            if spec.connections.is_empty() {
                return Err(GenerateError::MissingParameter {
                    family: spec.family,
                    param: "connections",
                });
            }
            let mut set = std::collections::BTreeSet::new();
            for &s in &spec.connections {
                let s = s % n.max(1);
                if s == 0 {
                    return Err(invalid("connection offset is a multiple of n".into()));
                }
                for i in 0..n {
                    let j = (i + s) % n;
                    set.insert((i.min(j), i.max(j)));
                }
            }
            edges = set.into_iter().collect();
        }
        Family::Hypercube => {
            let dim = spec.need_d()?;
            if dim >= usize::BITS as usize - 1 {
                return Err(invalid(format!("dimension {dim} too large")));
            }
            n = 1usize << dim;
            if let Some(given) = spec.n {
                if given != n {
                    return Err(invalid(format!(
                        "hypercube of dimension {dim} has {n} vertices, not {given}"
                    )));
                }
            }
            edges = (0..n)
                .flat_map(|u| (0..dim).map(move |b| (u, u ^ (1 << b))))
                .filter(|&(u, v)| u < v)
                .collect();
        }
        Family::Petersen => {
            if let Some(given) = spec.n {
                if given != 10 {
                    return Err(invalid(format!(
                        "Petersen graph has 10 vertices, not {given}"
                    )));
                }
            }
            n = 10;
            let mut list = Vec::with_capacity(15);
            for i in 0..5 {
                list.push((i, (i + 1) % 5));
                list.push((i, i + 5));
                list.push((5 + i, 5 + (i + 2) % 5));
            }
            edges = list;
        }
    }
    Ok(Graph::from_edges(n, edges).expect("generators emit simple graphs"))
}

/// Configuration model: pair up `n*d` stubs uniformly at random, then remove
/// loops and parallel edges by random double-edge swaps. After `100*n*d`
/// rejected swap proposals the whole pairing is redrawn.
fn random_regular_edges(n: usize, d: usize, seed: u64) -> Vec<(Vertex, Vertex)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if d == 0 {
        return Vec::new();
    }
    let m = n * d / 2;
    let swap_limit = 100 * n * d;
    'restart: loop {
        let mut stubs: Vec<Vertex> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        for i in (1..stubs.len()).rev() {
            let j = rng.random_range(0..=i);
            stubs.swap(i, j);
        }
        let mut edges: Vec<(Vertex, Vertex)> = stubs
            .chunks_exact(2)
            .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
            .collect();
        let mut mult: HashMap<(Vertex, Vertex), u32> = HashMap::with_capacity(m);
        for &e in &edges {
            *mult.entry(e).or_insert(0) += 1;
        }
        let is_bad =
            |e: (Vertex, Vertex), mult: &HashMap<(Vertex, Vertex), u32>| e.0 == e.1 || mult[&e] > 1;
        let mut queue: Vec<usize> = (0..m).filter(|&i| is_bad(edges[i], &mult)).collect();
        let mut failures = 0usize;
        while let Some(&i) = queue.last() {
            if !is_bad(edges[i], &mult) {
                queue.pop();
                continue;
            }
            let j = rng.random_range(0..m);
            let (a, b) = edges[i];
            let (c, e) = edges[j];
            let (p1, p2) = if rng.random::<bool>() {
                ((a, c), (b, e))
            } else {
                ((a, e), (b, c))
            };
            let p1 = (p1.0.min(p1.1), p1.0.max(p1.1));
            let p2 = (p2.0.min(p2.1), p2.0.max(p2.1));
            let clash = |p: (Vertex, Vertex)| mult.get(&p).copied().unwrap_or(0) > 0;
            if j == i || p1.0 == p1.1 || p2.0 == p2.1 || p1 == p2 || clash(p1) || clash(p2) {
                failures += 1;
                if failures > swap_limit {
                    continue 'restart;
                }
                continue;
            }
            for old in [edges[i], edges[j]] {
                let c = mult.get_mut(&old).unwrap();
                *c -= 1;
                if *c == 0 {
                    mult.remove(&old);
                }
            }
            mult.insert(p1, 1);
            mult.insert(p2, 1);
            edges[i] = p1;
            edges[j] = p2;
        }
        return edges;
    }
}

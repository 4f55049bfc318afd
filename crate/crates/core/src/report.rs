//! Solve reports and the weighting file format.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::weighting::{EdgeWeighting, WeightingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Paper,
    Fallback,
    Exact,
    Auto,
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Algorithm::Paper),
            "fallback" => Ok(Algorithm::Fallback),
            "exact" => Ok(Algorithm::Exact),
            "auto" => Ok(Algorithm::Auto),
            _ => Err(format!(
                "unknown algorithm '{s}' (expected paper, fallback, exact or auto)"
            )),
        }
    }
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Paper => "paper",
            Algorithm::Fallback => "fallback",
            Algorithm::Exact => "exact",
            Algorithm::Auto => "auto",
        }
    }
}

/// Wall times in milliseconds.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StageTimes {
    pub partition_ms: f64,
    pub step1_ms: f64,
    pub step2_ms: f64,
    pub step3_ms: f64,
    pub fallback_ms: f64,
    pub total_ms: f64,
}

pub fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub epsilon: f64,
    pub gamma: f64,
    pub s_star: usize,
    pub omega: u64,
    pub alpha: f64,
    pub q: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n: usize,
    /// `None` when the graph is not regular.
    pub d: Option<usize>,
    pub algorithm: Algorithm,
    pub achieved_k: Option<u64>,
    pub safe_lower: u64,
    pub paper_lower: Option<u64>,
    pub thm_general: Option<f64>,
    pub thm_dense: Option<f64>,
    /// `n/d + 28` as a reduced fraction.
    pub thm_dense_exact: Option<String>,
    pub thm_dense_applicable: Option<bool>,
    pub valid: bool,
    pub stage_failure: Option<String>,
    pub resamples: usize,
    pub buffer_margin: Option<f64>,
    pub timings: Option<StageTimes>,
    pub seed: u64,
    pub params: Option<ParamsEcho>,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightFileError {
    #[error("line {line}: expected 'u v w', got '{text}'")]
    Malformed { line: usize, text: String },
    #[error(transparent)]
    Weighting(#[from] WeightingError),
}

/// `u v w` per edge with `u < v`, sorted.
pub fn write_weights(g: &Graph, w: &EdgeWeighting) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# n {} m {} k {}", g.n(), g.m(), w.k());
    for (&(u, v), x) in g.edges().iter().zip(w.weights()) {
        let _ = writeln!(out, "{u} {v} {x}");
    }
    out
}

pub fn parse_weights(g: &Graph, text: &str) -> Result<EdgeWeighting, WeightFileError> {
    let mut triples = Vec::with_capacity(g.m());
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let malformed = || WeightFileError::Malformed {
            line: i + 1,
            text: raw.to_string(),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [u, v, x] = fields[..] else {
            return Err(malformed());
        };
        let u: usize = u.parse().map_err(|_| malformed())?;
        let v: usize = v.parse().map_err(|_| malformed())?;
        let x: u64 = x.parse().map_err(|_| malformed())?;
        if u >= g.n() || v >= g.n() {
            return Err(WeightingError::UnknownEdge { u, v }.into());
        }
        triples.push((u, v, x));
    }
    Ok(EdgeWeighting::from_triples(g, triples)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SolveReport {
        SolveReport {
            n: 12000,
            d: Some(10000),
            algorithm: Algorithm::Auto,
            achieved_k: Some(31),
            safe_lower: 2,
            paper_lower: Some(3),
            thm_general: Some(0.1 + 0.2),
            thm_dense: Some(29.2),
            thm_dense_exact: Some("146/5".into()),
            thm_dense_applicable: Some(true),
            valid: true,
            stage_failure: Some("step3".into()),
            resamples: 7,
            buffer_margin: Some(-1.0 / 3.0),
            timings: Some(StageTimes {
                total_ms: 1.0e-7,
                ..Default::default()
            }),
            seed: u64::MAX,
            params: Some(ParamsEcho {
                epsilon: 0.1,
                gamma: 0.04,
                s_star: 260,
                omega: 9,
                alpha: 0.5,
                q: 4,
            }),
        }
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let a = sample().to_json();
        let b = SolveReport::from_json(&a).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.find("\"n\"").unwrap() < a.find("\"d\"").unwrap());
        assert!(a.contains("\"achieved_k\": 31,"));
        assert!(a.contains("\"algorithm\": \"auto\""));
    }

    #[test]
    fn weight_file_round_trip() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let w = EdgeWeighting::new(&g, vec![1, 1, 2, 3]).unwrap();
        let text = write_weights(&g, &w);
        assert_eq!(text, "# n 4 m 4 k 3\n0 1 1\n0 3 1\n1 2 2\n2 3 3\n");
        assert_eq!(parse_weights(&g, &text).unwrap(), w);
        // endpoints in either order, comments anywhere
        let shuffled = "3 2 3 # last\n1 0 1\n\n2 1 2\n3 0 1\n";
        assert_eq!(parse_weights(&g, shuffled).unwrap(), w);
    }

    #[test]
    fn weight_file_errors() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(matches!(
            parse_weights(&g, "0 1\n"),
            Err(WeightFileError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            parse_weights(&g, "0 1 1\n1 2 2\n"),
            Err(WeightFileError::Weighting(WeightingError::MissingEdge {
                u: 0,
                v: 2
            }))
        ));
        assert!(matches!(
            parse_weights(&g, "0 1 1\n1 2 2\n0 2 0\n"),
            Err(WeightFileError::Weighting(
                WeightingError::ZeroWeight { .. }
            ))
        ));
        assert!(matches!(
            parse_weights(&g, "0 1 1\n1 2 2\n0 2 3\n0 9 1\n"),
            Err(WeightFileError::Weighting(WeightingError::UnknownEdge {
                u: 0,
                v: 9
            }))
        ));
    }
}

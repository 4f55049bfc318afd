//! Parameter sweeps over random regular graphs, emitted as CSV.

use serde::Serialize;
use thiserror::Error;

use crate::generate::{generate, GraphFamilySpec};
use crate::par;
use crate::report::{Algorithm, SolveReport};
use crate::solve::{solve, SolveOptions};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("grid entry '{0}' is not of the form key=v1,v2,...")]
    Entry(String),
    #[error("unknown grid key '{0}' (expected n, d, eps, gamma, seeds)")]
    UnknownKey(String),
    #[error("grid key '{0}' given twice")]
    Repeated(String),
    #[error("bad value '{value}' for '{key}'")]
    Value { key: String, value: String },
    #[error("grid key '{0}' is missing")]
    Missing(&'static str),
}

/// A degree either fixed or as a divisor of n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeSpec {
    Fixed(usize),
    Fraction(usize),
}

impl DegreeSpec {
    pub fn resolve(&self, n: usize) -> usize {
        match *self {
            DegreeSpec::Fixed(d) => d,
            DegreeSpec::Fraction(k) => n / k,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub n: Vec<usize>,
    pub d: Vec<DegreeSpec>,
    pub eps: Vec<f64>,
    pub gamma: Vec<f64>,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub n: usize,
    pub d: usize,
    pub eps: f64,
    pub gamma: f64,
    pub seed: u64,
}

fn values<T>(key: &str, raw: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, GridError> {
    raw.split(',')
        .map(|v| {
            let v = v.trim();
            parse(v).ok_or_else(|| GridError::Value {
                key: key.into(),
                value: v.into(),
            })
        })
        .collect()
}

fn degree(v: &str) -> Option<DegreeSpec> {
    match v.strip_prefix("n/") {
        Some(k) => k.parse().ok().filter(|&k| k > 0).map(DegreeSpec::Fraction),
        None => v.parse().ok().map(DegreeSpec::Fixed),
    }
}

impl std::str::FromStr for Grid {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (mut n, mut d, mut eps, mut gamma, mut seeds) = (None, None, None, None, None);
        for entry in s.split(';').map(str::trim).filter(|e| !e.is_empty()) {
            let (key, raw) = entry
                .split_once('=')
                .ok_or_else(|| GridError::Entry(entry.into()))?;
            let key = key.trim();
            let repeated = || GridError::Repeated(key.into());
            match key {
                "n" => n
                    .replace(values(key, raw, |v| v.parse().ok())?)
                    .map_or(Ok(()), |_| Err(repeated()))?,
                "d" => d
                    .replace(values(key, raw, degree)?)
                    .map_or(Ok(()), |_| Err(repeated()))?,
                "eps" => eps
                    .replace(values(key, raw, |v| v.parse().ok())?)
                    .map_or(Ok(()), |_| Err(repeated()))?,
                "gamma" => gamma
                    .replace(values(key, raw, |v| v.parse().ok())?)
                    .map_or(Ok(()), |_| Err(repeated()))?,
                "seeds" => seeds
                    .replace(values(key, raw, |v| v.parse().ok())?)
                    .map_or(Ok(()), |_| Err(repeated()))?,
                other => return Err(GridError::UnknownKey(other.into())),
            }
        }
        Ok(Grid {
            n: n.ok_or(GridError::Missing("n"))?,
            d: d.ok_or(GridError::Missing("d"))?,
            eps: eps.ok_or(GridError::Missing("eps"))?,
            gamma: gamma.ok_or(GridError::Missing("gamma"))?,
            seeds: seeds.ok_or(GridError::Missing("seeds"))?,
        })
    }
}

impl Grid {
    /// Cartesian product, n outermost and seed innermost.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &n in &self.n {
            for d in &self.d {
                for &eps in &self.eps {
                    for &gamma in &self.gamma {
                        for &seed in &self.seeds {
                            out.push(GridPoint {
                                n,
                                d: d.resolve(n),
                                eps,
                                gamma,
                                seed,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// A report flattened into CSV columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub d: usize,
    pub eps: f64,
    pub gamma: f64,
    pub seed: u64,
    pub algorithm: &'static str,
    pub achieved_k: Option<u64>,
    pub safe_lower: u64,
    pub paper_lower: Option<u64>,
    pub thm_general: Option<f64>,
    pub thm_dense: Option<f64>,
    pub thm_dense_applicable: Option<bool>,
    pub valid: bool,
    pub stage_failure: String,
    pub resamples: usize,
    pub buffer_margin: Option<f64>,
    pub s_star: Option<usize>,
    pub omega: Option<u64>,
    pub alpha: Option<f64>,
    pub q: Option<u64>,
    pub partition_ms: Option<f64>,
    pub step1_ms: Option<f64>,
    pub step2_ms: Option<f64>,
    pub step3_ms: Option<f64>,
    pub fallback_ms: Option<f64>,
    pub total_ms: Option<f64>,
}

impl BenchRow {
    fn new(pt: &GridPoint, r: &SolveReport, stage_failure: String) -> Self {
        let t = r.timings.as_ref();
        let p = r.params.as_ref();
        BenchRow {
            n: pt.n,
            d: pt.d,
            eps: pt.eps,
            gamma: pt.gamma,
            seed: pt.seed,
            algorithm: r.algorithm.as_str(),
            achieved_k: r.achieved_k,
            safe_lower: r.safe_lower,
            paper_lower: r.paper_lower,
            thm_general: r.thm_general,
            thm_dense: r.thm_dense,
            thm_dense_applicable: r.thm_dense_applicable,
            valid: r.valid,
            stage_failure,
            resamples: r.resamples,
            buffer_margin: r.buffer_margin,
            s_star: p.map(|p| p.s_star),
            omega: p.map(|p| p.omega),
            alpha: p.map(|p| p.alpha),
            q: p.map(|p| p.q),
            partition_ms: t.map(|t| t.partition_ms),
            step1_ms: t.map(|t| t.step1_ms),
            step2_ms: t.map(|t| t.step2_ms),
            step3_ms: t.map(|t| t.step3_ms),
            fallback_ms: t.map(|t| t.fallback_ms),
            total_ms: t.map(|t| t.total_ms),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub algorithm: Algorithm,
    pub budget: usize,
    pub timings: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            algorithm: Algorithm::Paper,
            budget: SolveOptions::default().budget,
            timings: true,
        }
    }
}

/// Runs one point: a random regular graph seeded by the point's seed, then
/// the chosen algorithm with the same seed.
pub fn run_point(pt: &GridPoint, opts: &BenchOptions) -> BenchRow {
    let solve_opts = SolveOptions {
        algorithm: opts.algorithm,
        epsilon: pt.eps,
        gamma: pt.gamma,
        seed: pt.seed,
        budget: opts.budget,
        timings: opts.timings,
        ..Default::default()
    };
    match generate(&GraphFamilySpec::random_regular(pt.n, pt.d, pt.seed)) {
        Ok(g) => {
            let out = solve(&g, &solve_opts);
            let failure = out.report.stage_failure.clone().unwrap_or_default();
            BenchRow::new(pt, &out.report, failure)
        }
        Err(e) => BenchRow::new(
            pt,
            &SolveReport {
                n: pt.n,
                d: Some(pt.d),
                algorithm: opts.algorithm,
                achieved_k: None,
                safe_lower: 0,
                paper_lower: None,
                thm_general: None,
                thm_dense: None,
                thm_dense_exact: None,
                thm_dense_applicable: None,
                valid: false,
                stage_failure: None,
                resamples: 0,
                buffer_margin: None,
                timings: None,
                seed: pt.seed,
                params: None,
            },
            format!("generate: {e}"),
        ),
    }
}

/// Rows come back in grid order whichever order the workers finish in.
pub fn run_grid(grid: &Grid, opts: &BenchOptions) -> Vec<BenchRow> {
    par::map_slice(&grid.points(), |pt| run_point(pt, opts))
}

pub fn rows_to_csv(rows: &[BenchRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

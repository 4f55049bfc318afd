//! One call that runs any of the algorithms and fills in a [`SolveReport`].

use std::time::Instant;

use thiserror::Error;

use crate::bounds::{bounds, counting_lower_bound};
use crate::construct::fallback::{fallback_greedy, FallbackError};
use crate::construct::pipeline::{run_pipeline, PipelineOptions, PipelineOutcome, StageFailure};
use crate::graph::Graph;
use crate::oracle::{exact_strength_with_budget, OracleError, DEFAULT_NODE_BUDGET};
use crate::report::{millis, Algorithm, ParamsEcho, SolveReport, StageTimes};
use crate::weighting::{finite_strength, is_irregular, EdgeWeighting};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub gamma: f64,
    pub seed: u64,
    pub budget: usize,
    pub best_effort_partition: bool,
    pub exact_k_max: u64,
    pub exact_node_budget: u64,
    pub timings: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        let p = PipelineOptions::default();
        SolveOptions {
            algorithm: Algorithm::Auto,
            epsilon: p.epsilon,
            gamma: p.gamma,
            seed: p.seed,
            budget: p.budget,
            best_effort_partition: false,
            exact_k_max: 64,
            exact_node_budget: DEFAULT_NODE_BUDGET,
            timings: true,
        }
    }
}

#[derive(Debug, Error, Clone)]
pub enum SolveError {
    #[error("graph has infinite irregularity strength")]
    InfiniteStrength,
    #[error("{0}")]
    Pipeline(StageFailure),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Fallback(FallbackError),
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub report: SolveReport,
    pub weighting: Option<EdgeWeighting>,
    pub error: Option<SolveError>,
}

fn base_report(g: &Graph, opts: &SolveOptions) -> SolveReport {
    let d = g.regular_degree().filter(|&d| d > 0);
    let b = d.and_then(|d| bounds(g.n(), d, opts.epsilon - 2.0 * opts.gamma).ok());
    SolveReport {
        n: g.n(),
        d,
        algorithm: opts.algorithm,
        achieved_k: None,
        safe_lower: b
            .as_ref()
            .map_or_else(|| counting_lower_bound(g), |b| b.safe_lower),
        paper_lower: b.as_ref().map(|b| b.paper_lower),
        thm_general: b.as_ref().map(|b| b.thm_general),
        thm_dense: b.as_ref().map(|b| b.thm_dense_f64()),
        thm_dense_exact: b.as_ref().map(|b| b.thm_dense.to_string()),
        thm_dense_applicable: b.as_ref().map(|b| b.thm_dense_applicable),
        valid: false,
        stage_failure: None,
        resamples: 0,
        buffer_margin: None,
        timings: None,
        seed: opts.seed,
        params: None,
    }
}

fn absorb_pipeline(report: &mut SolveReport, times: &mut StageTimes, out: &PipelineOutcome) {
    report.resamples = out.trace.resamples;
    report.buffer_margin = out.trace.buffer_margin;
    if let Some(p) = &out.trace.params {
        report.params = Some(ParamsEcho {
            epsilon: p.epsilon,
            gamma: p.gamma,
            s_star: p.s_star,
            omega: p.omega,
            alpha: p.alpha(),
            q: p.q,
        });
    }
    let t = &out.trace.timings;
    times.partition_ms = millis(t.partition);
    times.step1_ms = millis(t.step1);
    times.step2_ms = millis(t.step2);
    times.step3_ms = millis(t.step3);
    if let Err(f) = &out.result {
        report.stage_failure = Some(f.stage.to_string());
    }
}

pub fn solve(g: &Graph, opts: &SolveOptions) -> SolveOutcome {
    let start = Instant::now();
    let mut report = base_report(g, opts);
    let mut times = StageTimes::default();
    let mut weighting = None;
    let mut error = None;

    if !finite_strength(g) {
        error = Some(SolveError::InfiniteStrength);
    } else {
        match opts.algorithm {
            Algorithm::Paper | Algorithm::Auto => {
                let popts = PipelineOptions {
                    epsilon: opts.epsilon,
                    gamma: opts.gamma,
                    seed: opts.seed,
                    budget: opts.budget,
                    best_effort_partition: opts.best_effort_partition,
                };
                let out = run_pipeline(g, &popts);
                absorb_pipeline(&mut report, &mut times, &out);
                match out.result {
                    Ok(layers) => {
                        weighting = Some(
                            EdgeWeighting::new(g, layers.total())
                                .expect("pipeline weights are positive"),
                        );
                    }
                    Err(f) if opts.algorithm == Algorithm::Paper => {
                        error = Some(SolveError::Pipeline(f))
                    }
                    Err(_) => {
                        let t = Instant::now();
                        match fallback_greedy(g, opts.seed, 1) {
                            Ok(w) => weighting = Some(w),
                            Err(e) => error = Some(SolveError::Fallback(e)),
                        }
                        times.fallback_ms = millis(t.elapsed());
                    }
                }
            }
            Algorithm::Fallback => {
                let t = Instant::now();
                match fallback_greedy(g, opts.seed, 1) {
                    Ok(w) => weighting = Some(w),
                    Err(e) => error = Some(SolveError::Fallback(e)),
                }
                times.fallback_ms = millis(t.elapsed());
            }
            Algorithm::Exact => {
                match exact_strength_with_budget(g, opts.exact_k_max, opts.exact_node_budget) {
                    Ok(r) => weighting = r.witness,
                    Err(e) => error = Some(e.into()),
                }
            }
        }
    }

    if let Some(w) = &weighting {
        report.achieved_k = Some(w.k());
        report.valid = is_irregular(g, w.weights())
            .map(|i| i.is_irregular())
            .unwrap_or(false);
    }
    times.total_ms = millis(start.elapsed());
    report.timings = opts.timings.then_some(times);
    SolveOutcome {
        report,
        weighting,
        error,
    }
}

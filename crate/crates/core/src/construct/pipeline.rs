//! End-to-end construction for d-regular graphs with typed stage failures.

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::conditions::{check_conditions, ConditionReport};
use crate::construct::order::{build_s_order, OrderError, SOrdering};
use crate::construct::step1::{check_class_ranges, step1_initial, RangeViolation};
use crate::construct::step2::{step2_level_big, Step2Error};
use crate::construct::step3::{
    check_step3, step3_distinguish_small, Step3Error, Step3Result, Step3Violation,
};
use crate::graph::{Graph, Vertex};
use crate::params::{derive_params, ConstructionParams, ParamError};
use crate::partition::{sample_partition, PartitionError, VertexPartition};
use crate::resample::resample_until_valid;
use crate::weighting::{first_collision, vertex_weights, Irregularity, WeightingLayers};

/// Default resampling budget.
pub const DEFAULT_BUDGET: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub epsilon: f64,
    pub gamma: f64,
    pub seed: u64,
    pub budget: usize,
    /// Continue past an exhausted resampling budget with the last partition
    /// reached. The run still fails if any later guard trips.
    pub best_effort_partition: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            epsilon: 0.1,
            gamma: 0.04,
            seed: 0,
            budget: DEFAULT_BUDGET,
            best_effort_partition: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Params,
    Partition,
    Step1,
    Step2,
    Order,
    Step3,
    Separation,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Params => "params",
            Stage::Partition => "partition",
            Stage::Step1 => "step1",
            Stage::Step2 => "step2",
            Stage::Order => "order",
            Stage::Step3 => "step3",
            Stage::Separation => "separation",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StageError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("edge class range violated: {0:?}")]
    Range(RangeViolation),
    #[error(transparent)]
    Step2(#[from] Step2Error),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Step3(#[from] Step3Error),
    #[error("step 3 invariant broken: {0:?}")]
    Step3Invariant(Step3Violation),
    #[error("vertex {v} of B weighs {weight} after leveling, expected {target}")]
    Leveling { v: Vertex, weight: u64, target: u64 },
    #[error("levels not separated: vertices {u} and {v} both weigh {weight}")]
    Collision { u: Vertex, v: Vertex, weight: u64 },
    #[error("edge weight {weight} exceeds the bound {bound}")]
    WeightBound { weight: u64, bound: u64 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageTimings {
    pub partition: Duration,
    pub step1: Duration,
    pub step2: Duration,
    pub step3: Duration,
    pub total: Duration,
}

/// Everything the run produced, successful or not.
#[derive(Debug, Clone, Default)]
pub struct PipelineTrace {
    pub params: Option<ConstructionParams>,
    pub partition: Option<VertexPartition>,
    pub conditions: Option<ConditionReport>,
    pub resamples: usize,
    pub f1: Option<Vec<u64>>,
    pub f2: Option<Vec<u64>>,
    pub ordering: Option<SOrdering>,
    pub step3: Option<Step3Result>,
    /// `min over l of (min_{S_l} f12^V - max_{S_{l-1}} f12^V) - 0.4 omega d`.
    pub buffer_margin: Option<f64>,
    /// `min_S f12^V - max_B f12^V`.
    pub small_over_big: Option<i64>,
    pub timings: StageTimings,
}

#[derive(Debug, Clone)]
pub struct StageFailure {
    pub stage: Stage,
    pub error: StageError,
}

impl fmt::Display for StageFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {} failed: {}", self.stage, self.error)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub trace: PipelineTrace,
    pub result: Result<WeightingLayers, StageFailure>,
}

impl PipelineOutcome {
    /// `max f(e)` on success.
    pub fn achieved_k(&self) -> Option<u64> {
        self.result
            .as_ref()
            .ok()
            .map(|l| l.total().into_iter().max().unwrap_or(0))
    }
}

fn fail(stage: Stage, error: impl Into<StageError>) -> StageFailure {
    StageFailure {
        stage,
        error: error.into(),
    }
}

/// Separation margins of the leveled weights.
fn buffer_margins(
    p: &ConstructionParams,
    vp: &VertexPartition,
    w12: &[u64],
) -> (Option<f64>, Option<i64>) {
    let mut lo = [u64::MAX; 14];
    let mut hi = [0u64; 14];
    for (v, &x) in w12.iter().enumerate() {
        let l = vp.level(v) as usize;
        lo[l] = lo[l].min(x);
        hi[l] = hi[l].max(x);
    }
    let nonempty = |l: usize| lo[l] != u64::MAX;
    let mut worst: Option<f64> = None;
    for l in 2..=13 {
        if nonempty(l) && nonempty(l - 1) {
            let gap = lo[l] as f64 - hi[l - 1] as f64 - 0.4 * p.omega as f64 * p.d as f64;
            worst = Some(worst.map_or(gap, |w: f64| w.min(gap)));
        }
    }
    let small_min = (1..=13).filter(|&l| nonempty(l)).map(|l| lo[l]).min();
    let over = match (small_min, nonempty(0)) {
        (Some(s), true) => Some(s as i64 - hi[0] as i64),
        _ => None,
    };
    (worst, over)
}

pub fn run_pipeline(g: &Graph, opts: &PipelineOptions) -> PipelineOutcome {
    let start = Instant::now();
    let mut trace = PipelineTrace::default();
    let result = run_stages(g, opts, &mut trace);
    trace.timings.total = start.elapsed();
    PipelineOutcome { trace, result }
}

fn run_stages(
    g: &Graph,
    opts: &PipelineOptions,
    trace: &mut PipelineTrace,
) -> Result<WeightingLayers, StageFailure> {
    let d = g
        .regular_degree()
        .ok_or(fail(Stage::Partition, PartitionError::NotRegular))?;
    let p =
        derive_params(g.n(), d, opts.epsilon, opts.gamma).map_err(|e| fail(Stage::Params, e))?;
    trace.params = Some(p.clone());

    let t = Instant::now();
    let vp = sample_partition(g, &p, opts.seed).map_err(|e| fail(Stage::Partition, e))?;
    let repaired = resample_until_valid(g, &p, vp, opts.budget, opts.seed ^ 0x5EED_5EED_5EED_5EED);
    let vp = match repaired {
        Ok(out) => {
            trace.resamples = out.rounds;
            out.partition
        }
        Err(ex) => {
            trace.resamples = opts.budget;
            trace.conditions = Some(check_conditions(g, &p, &ex.last));
            trace.partition = Some(ex.last.clone());
            trace.timings.partition = t.elapsed();
            if !opts.best_effort_partition {
                return Err(fail(Stage::Partition, ex.error));
            }
            ex.last
        }
    };
    if trace.conditions.is_none() {
        trace.conditions = Some(check_conditions(g, &p, &vp));
    }
    trace.partition = Some(vp.clone());
    trace.timings.partition = t.elapsed();

    let t = Instant::now();
    let f1 = step1_initial(g, &p, &vp);
    check_class_ranges(g, &p, &vp, &f1, 0).map_err(|e| fail(Stage::Step1, StageError::Range(e)))?;
    trace.f1 = Some(f1.clone());
    trace.timings.step1 = t.elapsed();

    let t = Instant::now();
    let f2 = step2_level_big(g, &p, &vp, &f1).map_err(|e| fail(Stage::Step2, e))?;
    let f12: Vec<u64> = f1.iter().zip(&f2).map(|(a, b)| a + b).collect();
    check_class_ranges(g, &p, &vp, &f12, p.f2_cap)
        .map_err(|e| fail(Stage::Step2, StageError::Range(e)))?;
    trace.f2 = Some(f2.clone());
    let w12 = vertex_weights(g, &f12).expect("layers cover every edge");
    for (idx, &v) in vp.b_order().iter().enumerate() {
        let target = p.target(idx + 1);
        if w12[v] != target {
            return Err(fail(
                Stage::Step2,
                StageError::Leveling {
                    v,
                    weight: w12[v],
                    target,
                },
            ));
        }
    }
    let (margin, over) = buffer_margins(&p, &vp, &w12);
    trace.buffer_margin = margin;
    trace.small_over_big = over;
    trace.timings.step2 = t.elapsed();

    let t = Instant::now();
    let ordering = build_s_order(g, &vp).map_err(|e| fail(Stage::Order, e))?;
    trace.ordering = Some(ordering.clone());
    let res =
        step3_distinguish_small(g, &p, &vp, &f12, &ordering).map_err(|e| fail(Stage::Step3, e))?;
    check_step3(g, &p, &vp, &f12, &res)
        .map_err(|e| fail(Stage::Step3, StageError::Step3Invariant(e)))?;
    trace.timings.step3 = t.elapsed();
    let layers = WeightingLayers {
        f1,
        f2,
        f3: res.f3.clone(),
    };
    let final_weights = res.weights.clone();
    trace.step3 = Some(res);

    if let Irregularity::Collision { u, v, weight } = first_collision(&final_weights) {
        return Err(fail(
            Stage::Separation,
            StageError::Collision { u, v, weight },
        ));
    }
    let bound = p.max_edge_weight();
    let k = layers.total().into_iter().max().unwrap_or(0);
    if k > bound {
        return Err(fail(
            Stage::Separation,
            StageError::WeightBound { weight: k, bound },
        ));
    }
    Ok(layers)
}

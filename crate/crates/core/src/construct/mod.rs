//! The three-step construction for regular graphs, and the local-search
//! fallback.

pub mod fallback;
pub mod order;
pub mod pipeline;
pub mod step1;
pub mod step2;
pub mod step3;

pub use fallback::{fallback_greedy, fallback_greedy_with, FallbackConfig, FallbackError};
pub use pipeline::{
    run_pipeline, PipelineOptions, PipelineOutcome, Stage, StageError, StageFailure,
};

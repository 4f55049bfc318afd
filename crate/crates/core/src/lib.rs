//! Irregular edge weightings of graphs.
//!
//! The main entry point is [`construct::run_pipeline`], a three-step
//! construction for d-regular graphs driven by a random vertex partition that
//! is repaired until a family of concentration conditions holds. Alongside it
//! live an exhaustive oracle for tiny graphs ([`oracle`]), a local-search
//! fallback that accepts any graph of finite strength ([`construct::fallback`]),
//! and the report/bench plumbing used by the `irreg` CLI.

pub mod bench;
pub mod bounds;
pub mod conditions;
pub mod construct;
pub mod generate;
pub mod graph;
pub mod oracle;
pub mod par;
pub mod params;
pub mod partition;
pub mod report;
pub mod resample;
pub mod solve;
pub mod weighting;

pub use graph::{load_edge_list, save_edge_list, EdgeId, Graph, GraphError, Vertex};

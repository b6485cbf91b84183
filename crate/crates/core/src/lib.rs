//! Reachability queries with label and substructure constraints (LSCR) over
//! edge-labeled knowledge graphs.
//!
//! A query `(s, t, L, S)` asks whether some path from `s` to `t` uses only
//! edge labels from `L` and passes through at least one vertex satisfying the
//! basic graph pattern `S`. Three strategies are provided:
//!
//! * [`online::uis_query`]: single stack-driven search that evaluates the
//!   constraint on every visited vertex.
//! * [`online::uis_star_query`]: iterates the precomputed match set `V(S,G)`
//!   and chains label-constrained searches through a shared stack.
//! * [`informed::ins_query`]: the same chaining, guided and pruned by a
//!   [`index::LocalIndex`] of per-landmark minimal label sets.
//!
//! [`workload`] generates synthetic graphs and query sets and holds the
//! brute-force oracle every strategy is checked against.

pub mod bench;
pub mod error;
pub mod graph;
pub mod index;
pub mod informed;
pub mod labels;
pub mod online;
pub mod pattern;
pub mod workload;

pub use error::{Error, Result};
pub use graph::{Edge, IngestOptions, KnowledgeGraph, LabelId, VertexId};
pub use index::LocalIndex;
pub use labels::{LabelSet, LabelSetFamily};
pub use online::{CloseState, LscrQuery, QueryAnswer, SearchStats};
pub use pattern::{SubstructureConstraint, VertexSetResult};

//! Benchmark workloads: synthetic graphs, labelled query sets and a
//! brute-force reference answer.

mod graph_gen;
mod magnitude;
mod oracle;
mod query_gen;
mod queryset;

pub use graph_gen::{gen_graph, GraphGenSpec};
pub use magnitude::gen_constraint_with_magnitude;
pub use oracle::{label_bfs, oracle_lscr};
pub use query_gen::{
    gen_queries, size_band, ConstraintSource, FalseType, GeneratedQuery, GeneratedQuerySet, Provenance,
    QueryGenSpec,
};
pub use queryset::{load_query_set, parse_query_set, save_query_set, write_query_set, QueryRecord};

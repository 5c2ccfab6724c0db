//! Dynamic programs over nice tree decompositions pinned at the initiator.
//!
//! A table cell at node `t` is keyed by how the surviving part of the bag
//! splits into components of the graph seen so far ([`PartitionKey`]) and by
//! one payload row per component ([`CountTuple`]). Its value is the cheapest
//! deletion set inducing that key.

mod constructive;
mod destructive;
mod engine;
mod partition;

pub use constructive::{fill_table, solve_constructive, solve_constructive_with};
pub use destructive::{can_beat, can_beat_with, solve_destructive, solve_destructive_with};
pub use engine::{DpTable, NodeTable};
pub use partition::{
    consistent_predecessors, forget_image, join_counts, join_partitions, merge_edge, CountTuple, DiffTuple, DpKey,
    ForgetCase, PartitionKey, Predecessor,
};

/// Solver knobs.
#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    /// Fill independent subtrees on the rayon pool.
    pub parallel: bool,
}

//! Constructive and destructive election control over voter networks.
//!
//! An instance is an election whose voters sit on a graph. Deleting voters
//! (each at a price, within a budget) changes which voters stay connected to
//! the initiator; only those are counted. The constructive question asks for
//! a deletion set making the target the unique plurality winner, the
//! destructive one for a set making anyone else the unique winner.
//!
//! Solvers:
//! - [`dp::solve_constructive`] and [`dp::solve_destructive`] run dynamic
//!   programs over a nice tree decomposition pinned at the initiator;
//! - [`oracle::brute_force`] enumerates deletion sets and is the reference;
//! - [`reductions`] builds the hardness instances from exact-cover inputs.
//!
//! ```
//! use netpoll_core::{format, solve, Mode};
//!
//! let inst = format::parse_instance(
//!     "candidates a b\nvoter x a 0\nvoter y b 1\nedge x y\ninitiator x\ntarget a\nbudget 1\n",
//! )
//! .unwrap();
//! let w = solve(&inst, Mode::Constructive).unwrap().unwrap();
//! assert_eq!(w.total_cost, 1);
//! ```

pub mod dp;
pub mod election;
pub mod error;
pub mod format;
pub mod oracle;
pub mod random;
pub mod reductions;
pub mod treedecomp;

pub use election::{
    evaluate_control, reachable_from, tally, unique_winner, verify_witness, witness_cost, Budget, Candidate,
    ControlInstance, Election, Mode, Voter, VoterGraph, WitnessSet,
};
pub use error::{Error, Result};

use treedecomp::{decompose_with, pin_x, to_nice, DecomposeOptions, NiceTreeDecomposition};

/// Decomposes the instance graph (rooted at the initiator when it is a
/// forest), makes it nice and pins it at the initiator.
pub fn prepare_decomposition(instance: &ControlInstance) -> Result<NiceTreeDecomposition> {
    let opts = DecomposeOptions { root: Some(instance.initiator), ..DecomposeOptions::default() };
    let nice = to_nice(&instance.graph, &decompose_with(&instance.graph, opts))?;
    pin_x(&nice, instance.initiator)
}

/// Solves `mode` with an automatically built decomposition.
pub fn solve(instance: &ControlInstance, mode: Mode) -> Result<Option<WitnessSet>> {
    let ntd = prepare_decomposition(instance)?;
    match mode {
        Mode::Constructive => dp::solve_constructive(instance, &ntd),
        Mode::Destructive => dp::solve_destructive(instance, &ntd),
    }
}

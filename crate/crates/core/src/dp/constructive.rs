use super::engine::{best_root, check_decomposition, extract, fill, DpTable, Limits, Payload};
use super::SolveOptions;
use crate::election::{evaluate_control, Candidate, ControlInstance, Mode, WitnessSet};
use crate::error::Result;
use crate::treedecomp::NiceTreeDecomposition;

/// Exact table with one per-candidate vote-count row per part.
///
/// Nothing is pruned: every finite cell is the minimum cost of a deletion set
/// avoiding the initiator that induces the key at that node.
pub fn fill_table(instance: &ControlInstance, ntd: &NiceTreeDecomposition) -> Result<DpTable> {
    check_decomposition(instance, ntd)?;
    let m = instance.num_candidates();
    let payload = Payload::new(m, instance.num_voters(), |v, row| row[instance.vote(v).idx()] = 1);
    Ok(fill(instance, ntd, &payload, Limits::default()))
}

/// Cheapest budget-feasible deletion set making the target the unique winner.
pub fn solve_constructive(instance: &ControlInstance, ntd: &NiceTreeDecomposition) -> Result<Option<WitnessSet>> {
    solve_constructive_with(instance, ntd, SolveOptions::default())
}

pub fn solve_constructive_with(
    instance: &ControlInstance,
    ntd: &NiceTreeDecomposition,
    opts: SolveOptions,
) -> Result<Option<WitnessSet>> {
    check_decomposition(instance, ntd)?;
    Ok(cheapest_win(instance, ntd, instance.target, instance.budget.finite(), opts))
}

/// Runs the table on margins `a_target - a_j` (one entry per other candidate)
/// instead of raw counts. The win check only needs the margins, and larger
/// margins are never worse, so dominated cells can be dropped.
pub(crate) fn cheapest_win(
    instance: &ControlInstance,
    ntd: &NiceTreeDecomposition,
    target: Candidate,
    cap: Option<u64>,
    opts: SolveOptions,
) -> Option<WitnessSet> {
    let m = instance.num_candidates();
    let others: Vec<usize> = (0..m).filter(|&j| j != target.idx()).collect();
    let payload = Payload::new(m - 1, instance.num_voters(), |v, row| {
        let c = instance.vote(v);
        for (k, &j) in others.iter().enumerate() {
            row[k] = (c == target) as i32 - (c.idx() == j) as i32;
        }
    });
    let limits = Limits { cap, prune: true, parallel: opts.parallel };
    let table = fill(instance, ntd, &payload, limits);
    let (root, cost) = best_root(&table, |row| row.iter().all(|&d| d > 0))?;
    let deleted = extract(ntd, &table, root);
    let witness = WitnessSet { deleted, total_cost: cost };
    let check = instance.with_target(target);
    debug_assert!(evaluate_control(&check, &witness, Mode::Constructive).unwrap_or(false));
    debug_assert_eq!(crate::election::witness_cost(&check, &witness.deleted).ok(), Some(cost));
    Some(witness)
}

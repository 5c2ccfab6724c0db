use super::constructive::cheapest_win;
use super::engine::{best_root, check_decomposition, extract, fill, root_entries, DpTable, EntryRef, Limits, Payload};
use super::SolveOptions;
use crate::election::{evaluate_control, Candidate, ControlInstance, Mode, WitnessSet};
use crate::error::{Error, Result};
use crate::treedecomp::NiceTreeDecomposition;

/// Cheapest budget-feasible deletion set after which `rival` has strictly
/// more votes than the target among the voters still reachable from the
/// initiator. Other candidates may still tie or beat the rival.
pub fn can_beat(
    instance: &ControlInstance,
    rival: Candidate,
    ntd: &NiceTreeDecomposition,
) -> Result<Option<WitnessSet>> {
    can_beat_with(instance, rival, ntd, SolveOptions::default())
}

pub fn can_beat_with(
    instance: &ControlInstance,
    rival: Candidate,
    ntd: &NiceTreeDecomposition,
    opts: SolveOptions,
) -> Result<Option<WitnessSet>> {
    if rival == instance.target {
        return Err(Error::RivalIsTarget(rival));
    }
    if rival.idx() >= instance.num_candidates() {
        return Err(Error::UnknownCandidate(rival.0));
    }
    check_decomposition(instance, ntd)?;
    Ok(beat(instance, rival, ntd, opts))
}

fn beat(
    instance: &ControlInstance,
    rival: Candidate,
    ntd: &NiceTreeDecomposition,
    opts: SolveOptions,
) -> Option<WitnessSet> {
    let table = beat_table(instance, rival, ntd, opts);
    let (root, cost) = best_root(&table, |row| row[0] > 0)?;
    Some(WitnessSet { deleted: extract(ntd, &table, root), total_cost: cost })
}

fn beat_table(
    instance: &ControlInstance,
    rival: Candidate,
    ntd: &NiceTreeDecomposition,
    opts: SolveOptions,
) -> DpTable {
    let target = instance.target;
    let payload = Payload::new(1, instance.num_voters(), |v, row| {
        let c = instance.vote(v);
        row[0] = (c == rival) as i32 - (c == target) as i32;
    });
    let limits = Limits { cap: instance.budget.finite(), prune: true, parallel: opts.parallel };
    fill(instance, ntd, &payload, limits)
}

/// What one rival's table says: the cheapest cost at which it beats the
/// target, and the cheapest of its root witnesses that has a unique
/// non-target winner.
struct RivalBound {
    rival: Candidate,
    lower: u64,
    certified: Option<WitnessSet>,
}

fn rival_bound(
    instance: &ControlInstance,
    rival: Candidate,
    ntd: &NiceTreeDecomposition,
    opts: SolveOptions,
) -> Result<Option<RivalBound>> {
    let table = beat_table(instance, rival, ntd, opts);
    let mut roots: Vec<(u64, EntryRef)> = root_entries(&table, |row| row[0] > 0);
    if roots.is_empty() {
        return Ok(None);
    }
    roots.sort_by_key(|&(cost, _)| cost);
    let lower = roots[0].0;
    for (cost, r) in roots {
        let witness = WitnessSet { deleted: extract(ntd, &table, r), total_cost: cost };
        if evaluate_control(instance, &witness, Mode::Destructive)? {
            return Ok(Some(RivalBound { rival, lower, certified: Some(witness) }));
        }
    }
    Ok(Some(RivalBound { rival, lower, certified: None }))
}

/// Cheapest budget-feasible deletion set after which some candidate other
/// than the target wins uniquely.
///
/// Every such set lets its winner beat the target, so the cheapest
/// [`can_beat`] cost over all rivals is a lower bound. When the set attaining
/// it also has a unique winner it is returned directly. Otherwise every root
/// witness of every rival table is checked for an upper bound, and rivals
/// whose bound is still below it get the exact "rival wins uniquely" table,
/// capped just below the best cost found so far.
pub fn solve_destructive(instance: &ControlInstance, ntd: &NiceTreeDecomposition) -> Result<Option<WitnessSet>> {
    solve_destructive_with(instance, ntd, SolveOptions::default())
}

pub fn solve_destructive_with(
    instance: &ControlInstance,
    ntd: &NiceTreeDecomposition,
    opts: SolveOptions,
) -> Result<Option<WitnessSet>> {
    check_decomposition(instance, ntd)?;
    let mut bounds = Vec::new();
    for rival in instance.election.candidates().filter(|&r| r != instance.target) {
        bounds.extend(rival_bound(instance, rival, ntd, opts)?);
    }
    bounds.sort_by_key(|b| (b.lower, b.rival));
    let mut best: Option<WitnessSet> = None;
    for b in &bounds {
        if let Some(w) = &b.certified {
            if best.as_ref().is_none_or(|x| w.total_cost < x.total_cost) {
                best = Some(w.clone());
            }
        }
    }
    for b in &bounds {
        if best.as_ref().is_some_and(|x| x.total_cost <= b.lower) {
            break;
        }
        if b.certified.as_ref().is_some_and(|w| w.total_cost == b.lower) {
            continue;
        }
        let cap = match (&best, instance.budget.finite()) {
            (Some(x), Some(budget)) => Some(budget.min(x.total_cost - 1)),
            (Some(x), None) => Some(x.total_cost - 1),
            (None, budget) => budget,
        };
        if let Some(w) = cheapest_win(instance, ntd, b.rival, cap, opts) {
            if best.as_ref().is_none_or(|x| w.total_cost < x.total_cost) {
                best = Some(w);
            }
        }
    }
    Ok(best)
}

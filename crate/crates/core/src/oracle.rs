//! Exhaustive reference solver.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::election::{component_mask, outcome_holds, tally_mask, ControlInstance, Mode, Voter, WitnessSet};
use crate::error::{Error, Result};

/// Largest deletable set [`brute_force`] will enumerate.
pub const MAX_DELETABLE: usize = 25;

/// Tries every subset of `deletable` (default: every voter but the initiator)
/// and returns the cheapest budget-feasible one satisfying `mode`. Ties go to
/// the lexicographically smallest sorted voter list.
pub fn brute_force(
    instance: &ControlInstance,
    mode: Mode,
    deletable: Option<&BTreeSet<Voter>>,
) -> Result<Option<WitnessSet>> {
    let x = instance.initiator;
    let pool: Vec<Voter> = match deletable {
        Some(set) => {
            for &v in set {
                instance.election.check_voter(v)?;
                if v == x {
                    return Err(Error::InitiatorDeleted(v));
                }
            }
            set.iter().copied().collect()
        }
        None => instance.election.voters().filter(|&v| v != x).collect(),
    };
    if pool.len() > MAX_DELETABLE {
        return Err(Error::TooLarge { size: pool.len(), limit: MAX_DELETABLE });
    }
    let n = instance.num_voters();
    let best = (0u64..1 << pool.len())
        .into_par_iter()
        .filter_map(|bits| {
            let members: Vec<Voter> =
                pool.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &v)| v).collect();
            let cost: u64 = members.iter().map(|&v| instance.cost(v)).sum();
            if !instance.budget.allows(cost) {
                return None;
            }
            let mut deleted = vec![false; n];
            for &v in &members {
                deleted[v.idx()] = true;
            }
            let reach = component_mask(&instance.graph, x, &deleted);
            let counts = tally_mask(&instance.election, &reach);
            outcome_holds(&counts, instance.target, mode).then_some((cost, members))
        })
        .min();
    Ok(best.map(|(total_cost, members)| WitnessSet { deleted: members.into_iter().collect(), total_cost }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::{Budget, Candidate, Election, VoterGraph};

    fn pair(target: u32, cost: u64, budget: Budget) -> ControlInstance {
        let election = Election::anonymous(2, vec![Candidate(0), Candidate(1)]).unwrap();
        let graph = VoterGraph::new(2, [(Voter(0), Voter(1))]).unwrap();
        ControlInstance::new(election, graph, Candidate(target), Voter(0), vec![0, cost], budget).unwrap()
    }

    #[test]
    fn deleting_the_neighbour() {
        let w = brute_force(&pair(0, 3, Budget::Finite(3)), Mode::Constructive, None).unwrap().unwrap();
        assert_eq!(w.deleted, BTreeSet::from([Voter(1)]));
        assert_eq!(w.total_cost, 3);
        assert!(brute_force(&pair(0, 3, Budget::Finite(2)), Mode::Constructive, None).unwrap().is_none());
        assert!(brute_force(&pair(1, 3, Budget::Infinite), Mode::Constructive, None).unwrap().is_none());
    }

    #[test]
    fn destructive_mode() {
        // target 1: deleting the neighbour leaves 0 alone and winning
        let w = brute_force(&pair(1, 2, Budget::Infinite), Mode::Destructive, None).unwrap().unwrap();
        assert_eq!(w.total_cost, 2);
    }

    #[test]
    fn restriction_errors() {
        let inst = pair(0, 1, Budget::Infinite);
        let with_x = BTreeSet::from([Voter(0)]);
        assert_eq!(brute_force(&inst, Mode::Constructive, Some(&with_x)), Err(Error::InitiatorDeleted(Voter(0))));
        let empty = BTreeSet::new();
        assert!(brute_force(&inst, Mode::Constructive, Some(&empty)).unwrap().is_none());
    }
}

//! Regular exact 3-cover and the two constructions that encode it as a
//! constructive control instance: one with two candidates, one on a tree.

mod x3c;

use std::collections::BTreeSet;

pub use x3c::{gen_x3c, solve_x3c, X3CInstance, MAX_UNIVERSE};

use crate::election::{Budget, Candidate, ControlInstance, Election, Voter, VoterGraph, WitnessSet};
use crate::error::{Error, Result};

/// Which construction to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    TwoCandidates,
    Tree,
}

/// What a voter stands for in a construction. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    /// Two candidates: the `i`-th voter of the long path.
    PathU(u32),
    /// Two candidates: the voter joining the path to the set voters.
    Hub,
    /// Two candidates: the voter for set `i`.
    SetVoter(u32),
    /// Two candidates: copy `j` of element `k`.
    ElementCopy { copy: u32, element: u32 },
    /// Tree: position `pos` of the prefix of path `set`; `pos == 1` is the head.
    Prefix { set: u32, pos: u32 },
    /// Tree: the voter for `element` in the middle block of path `set`.
    Block { set: u32, element: u32 },
    /// Tree: the last voter of path `set`.
    Tail { set: u32 },
    /// Tree: the `i`-th voter of the two-voter path voting `c`.
    CPath(u32),
    /// Tree: the `i`-th voter of the path voting `d`; the last one is the hub.
    DPath(u32),
}

/// A reduced instance together with the role of every voter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledInstance {
    pub instance: ControlInstance,
    pub roles: Vec<Role>,
}

impl LabeledInstance {
    pub fn voters_where(&self, pred: impl Fn(Role) -> bool) -> BTreeSet<Voter> {
        self.roles.iter().enumerate().filter(|(_, &r)| pred(r)).map(|(i, _)| Voter(i as u32)).collect()
    }

    pub fn voter_with(&self, role: Role) -> Option<Voter> {
        self.roles.iter().position(|&r| r == role).map(|i| Voter(i as u32))
    }

    /// The voters a witness may be assumed to consist of: the set voters for
    /// the two-candidate construction, the path heads for the tree.
    pub fn deletable(&self) -> BTreeSet<Voter> {
        self.voters_where(|r| matches!(r, Role::SetVoter(_) | Role::Prefix { pos: 1, .. }))
    }
}

struct Builder {
    names: Vec<String>,
    votes: Vec<Candidate>,
    roles: Vec<Role>,
    edges: Vec<(Voter, Voter)>,
}

impl Builder {
    fn new() -> Self {
        Builder { names: Vec::new(), votes: Vec::new(), roles: Vec::new(), edges: Vec::new() }
    }

    fn add(&mut self, name: String, vote: Candidate, role: Role) -> Voter {
        self.names.push(name);
        self.votes.push(vote);
        self.roles.push(role);
        Voter(self.names.len() as u32 - 1)
    }

    fn edge(&mut self, a: Voter, b: Voter) {
        self.edges.push((a, b));
    }

    fn finish(self, candidates: Vec<String>, target: Candidate, initiator: Voter) -> LabeledInstance {
        let n = self.names.len();
        let election = Election::new(candidates, self.names, self.votes).expect("construction is consistent");
        let graph = VoterGraph::new(n, self.edges).expect("construction has simple edges");
        let instance = ControlInstance::new(election, graph, target, initiator, vec![1; n], Budget::Infinite)
            .expect("construction is consistent");
        LabeledInstance { instance, roles: self.roles }
    }
}

/// Two candidates `0` and `1`; the initiator sits at the end of a path of
/// `ℓ(3m−1)` voters for `0`, followed by one voter for `1` adjacent to the `m`
/// set voters (for `0`). Each set voter is adjacent to every copy of its three
/// elements; there are `m` copies of each element, all voting `1`. Target `1`,
/// unlimited budget, unit costs. Non-regular inputs are accepted.
pub fn reduce_two_candidates(x3c: &X3CInstance) -> LabeledInstance {
    let (ell, m) = (x3c.ell(), x3c.num_sets() as u32);
    let (zero, one) = (Candidate(0), Candidate(1));
    let mut b = Builder::new();
    let path_len = ell * (3 * m).saturating_sub(1);
    let mut prev = None;
    let mut first = None;
    for i in 1..=path_len {
        let u = b.add(format!("u{i}"), zero, Role::PathU(i));
        if let Some(p) = prev {
            b.edge(p, u);
        }
        first = first.or(Some(u));
        prev = Some(u);
    }
    let r = b.add("r".into(), one, Role::Hub);
    if let Some(p) = prev {
        b.edge(p, r);
    }
    let set_voters: Vec<Voter> = (1..=m)
        .map(|i| {
            let v = b.add(format!("v{i}"), zero, Role::SetVoter(i));
            b.edge(r, v);
            v
        })
        .collect();
    for j in 1..=m {
        for k in 1..=x3c.universe_size() {
            let w = b.add(format!("w{j}_{k}"), one, Role::ElementCopy { copy: j, element: k });
            for (i, s) in x3c.sets().iter().enumerate() {
                if s.contains(&k) {
                    b.edge(set_voters[i], w);
                }
            }
        }
    }
    b.finish(vec!["0".into(), "1".into()], one, first.unwrap_or(r))
}

/// Candidates `1..=3ℓ`, `c` and `d`. Set `i` becomes a path: its three
/// elements (ascending, first one is the head), then one voter per universe
/// element, then a voter for `c`. Two more voters for `c` form a path, and
/// `m+1−ℓ` voters for `d` form a path whose last voter is adjacent to every
/// head and to the first `c` voter. The initiator is the first `d` voter;
/// target `c`, unlimited budget, unit costs. Requires a regular input.
pub fn reduce_tree(x3c: &X3CInstance) -> Result<LabeledInstance> {
    if !x3c.is_regular() {
        return Err(Error::InvalidX3c("the tree construction needs every element in exactly two sets".into()));
    }
    let (ell, m) = (x3c.ell(), x3c.num_sets() as u32);
    let n_elem = x3c.universe_size();
    let elem = |e: u32| Candidate(e - 1);
    let (c, d) = (Candidate(n_elem), Candidate(n_elem + 1));
    let mut b = Builder::new();
    let mut heads = Vec::new();
    for (i, s) in x3c.sets().iter().enumerate() {
        let set = i as u32 + 1;
        let mut path = Vec::new();
        for (k, &e) in s.iter().enumerate() {
            path.push(b.add(format!("p{set}_e{}", k + 1), elem(e), Role::Prefix { set, pos: k as u32 + 1 }));
        }
        for e in 1..=n_elem {
            path.push(b.add(format!("p{set}_u{e}"), elem(e), Role::Block { set, element: e }));
        }
        path.push(b.add(format!("p{set}_w"), c, Role::Tail { set }));
        for w in path.windows(2) {
            b.edge(w[0], w[1]);
        }
        heads.push(path[0]);
    }
    let c1 = b.add("c1".into(), c, Role::CPath(1));
    let c2 = b.add("c2".into(), c, Role::CPath(2));
    b.edge(c1, c2);
    let d_len = m + 1 - ell;
    let d_path: Vec<Voter> = (1..=d_len).map(|i| b.add(format!("d{i}"), d, Role::DPath(i))).collect();
    for w in d_path.windows(2) {
        b.edge(w[0], w[1]);
    }
    let hub = *d_path.last().expect("m ≥ ℓ");
    for &h in &heads {
        b.edge(hub, h);
    }
    b.edge(hub, c1);
    let mut candidates: Vec<String> = (1..=n_elem).map(|e| e.to_string()).collect();
    candidates.push("c".into());
    candidates.push("d".into());
    Ok(b.finish(candidates, c, d_path[0]))
}

/// The deletion set a cover translates to: the set voters of the sets left
/// out (two candidates), or the heads of the covering sets' paths (tree).
pub fn cover_to_witness(x3c: &X3CInstance, cover: &[usize], which: Construction) -> Result<WitnessSet> {
    if !x3c.is_cover(cover) {
        return Err(Error::InvalidCover(format!("{cover:?} is not an exact cover")));
    }
    let chosen: BTreeSet<u32> = cover.iter().map(|&i| i as u32 + 1).collect();
    let labeled = match which {
        Construction::TwoCandidates => reduce_two_candidates(x3c),
        Construction::Tree => reduce_tree(x3c)?,
    };
    let deleted = match which {
        Construction::TwoCandidates => labeled.voters_where(|r| matches!(r, Role::SetVoter(i) if !chosen.contains(&i))),
        Construction::Tree => {
            labeled.voters_where(|r| matches!(r, Role::Prefix { set, pos: 1 } if chosen.contains(&set)))
        }
    };
    WitnessSet::new(&labeled.instance, deleted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::{evaluate_control, reachable_from, tally, Mode};

    fn one() -> X3CInstance {
        X3CInstance::new(1, vec![[1, 2, 3], [1, 2, 3]]).unwrap()
    }

    #[test]
    fn two_candidate_sizes() {
        let l = reduce_two_candidates(&one());
        assert_eq!(l.instance.num_voters(), 14);
        assert_eq!(l.instance.graph.num_edges(), 19);
        let all: BTreeSet<Voter> = l.instance.election.voters().collect();
        assert_eq!(tally(&l.instance.election, &all).unwrap(), vec![7, 7]);
        let two = gen_x3c(2, 1, true);
        assert_eq!(reduce_two_candidates(&two).instance.num_voters(), 51);
    }

    #[test]
    fn two_candidate_witness() {
        let l = reduce_two_candidates(&one());
        let w = cover_to_witness(&one(), &[0], Construction::TwoCandidates).unwrap();
        assert_eq!(w.deleted, BTreeSet::from([l.voter_with(Role::SetVoter(2)).unwrap()]));
        let reach = reachable_from(&l.instance.graph, l.instance.initiator, &w.deleted).unwrap();
        assert_eq!(tally(&l.instance.election, &reach).unwrap(), vec![6, 7]);
        assert!(evaluate_control(&l.instance, &w, Mode::Constructive).unwrap());
    }

    #[test]
    fn tree_sizes_and_tallies() {
        let l = reduce_tree(&one()).unwrap();
        assert_eq!(l.instance.num_voters(), 18);
        assert_eq!(l.instance.graph.num_edges(), 17);
        assert!(l.instance.graph.is_tree());
        let all: BTreeSet<Voter> = l.instance.election.voters().collect();
        // elements 1..3 and c get m+2 = 4, d gets m+1-ℓ = 2
        assert_eq!(tally(&l.instance.election, &all).unwrap(), vec![4, 4, 4, 4, 2]);
    }

    #[test]
    fn tree_witness() {
        let l = reduce_tree(&one()).unwrap();
        let w = cover_to_witness(&one(), &[0], Construction::Tree).unwrap();
        assert_eq!(w.deleted, BTreeSet::from([l.voter_with(Role::Prefix { set: 1, pos: 1 }).unwrap()]));
        let reach = reachable_from(&l.instance.graph, l.instance.initiator, &w.deleted).unwrap();
        assert_eq!(tally(&l.instance.election, &reach).unwrap(), vec![2, 2, 2, 3, 2]);
        assert!(evaluate_control(&l.instance, &w, Mode::Constructive).unwrap());
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(cover_to_witness(&one(), &[0, 1], Construction::Tree), Err(Error::InvalidCover(_))));
        let irregular = X3CInstance::general(1, vec![[1, 2, 3]]).unwrap();
        assert!(reduce_tree(&irregular).is_err());
        assert_eq!(reduce_two_candidates(&irregular).instance.num_voters(), 2 + 1 + 1 + 3);
    }
}

//! Elections over a voter network, restricted tallies and the certificate
//! check that gives both control problems their meaning.
//!
//! Voters and candidates are addressed by dense indices ([`Voter`],
//! [`Candidate`]); the human-readable ids live in [`Election`] and are only
//! needed for IO.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Index of a voter inside an [`Election`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Voter(pub u32);

/// Index of a candidate inside an [`Election`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Candidate(pub u32);

impl Voter {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl Candidate {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Voter {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "v#{}", self.0)
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "c#{}", self.0)
    }
}

/// Which control problem a witness is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// The target must win uniquely.
    Constructive,
    /// Some candidate other than the target must win uniquely.
    Destructive,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Mode::Constructive => f.write_str("constructive"),
            Mode::Destructive => f.write_str("destructive"),
        }
    }
}

/// Candidates, voters and the vote function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Election {
    candidates: Vec<String>,
    voters: Vec<String>,
    votes: Vec<Candidate>,
}

impl Election {
    /// Builds an election; `votes[i]` is the candidate voter `i` votes for.
    pub fn new(candidates: Vec<String>, voters: Vec<String>, votes: Vec<Candidate>) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::InvalidInput("an election needs at least one candidate".into()));
        }
        if voters.is_empty() {
            return Err(Error::InvalidInput("an election needs at least one voter".into()));
        }
        if voters.len() != votes.len() {
            return Err(Error::InvalidInput(format!("{} voters but {} votes", voters.len(), votes.len())));
        }
        if let Some(c) = votes.iter().find(|c| c.idx() >= candidates.len()) {
            return Err(Error::UnknownCandidate(c.0));
        }
        Ok(Election { candidates, voters, votes })
    }

    /// Election with ids `"0".."m-1"` for candidates and `"v0".."v{n-1}"` for voters.
    pub fn anonymous(num_candidates: usize, votes: Vec<Candidate>) -> Result<Self> {
        let candidates = (0..num_candidates).map(|i| i.to_string()).collect();
        let voters = (0..votes.len()).map(|i| format!("v{i}")).collect();
        Election::new(candidates, voters, votes)
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    pub fn num_voters(&self) -> usize {
        self.voters.len()
    }

    pub fn vote(&self, v: Voter) -> Candidate {
        self.votes[v.idx()]
    }

    pub fn votes(&self) -> &[Candidate] {
        &self.votes
    }

    pub fn candidate_name(&self, c: Candidate) -> &str {
        &self.candidates[c.idx()]
    }

    pub fn voter_name(&self, v: Voter) -> &str {
        &self.voters[v.idx()]
    }

    pub fn candidate_names(&self) -> &[String] {
        &self.candidates
    }

    pub fn voter_names(&self) -> &[String] {
        &self.voters
    }

    pub fn find_voter(&self, name: &str) -> Option<Voter> {
        self.voters.iter().position(|n| n == name).map(|i| Voter(i as u32))
    }

    pub fn find_candidate(&self, name: &str) -> Option<Candidate> {
        self.candidates.iter().position(|n| n == name).map(|i| Candidate(i as u32))
    }

    pub fn voters(&self) -> impl Iterator<Item = Voter> {
        (0..self.voters.len() as u32).map(Voter)
    }

    pub fn candidates(&self) -> impl Iterator<Item = Candidate> {
        (0..self.candidates.len() as u32).map(Candidate)
    }

    pub(crate) fn check_voter(&self, v: Voter) -> Result<()> {
        if v.idx() < self.voters.len() {
            Ok(())
        } else {
            Err(Error::UnknownVoter(v.0))
        }
    }
}

/// Simple undirected graph on voters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoterGraph {
    adj: Vec<Vec<Voter>>,
    // normalized so that .0 < .1, in insertion order
    edges: Vec<(Voter, Voter)>,
}

impl VoterGraph {
    /// Rejects self-loops, duplicate edges and out-of-range endpoints.
    pub fn new(num_voters: usize, edges: impl IntoIterator<Item = (Voter, Voter)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); num_voters];
        let mut list = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v.idx() >= num_voters {
                    return Err(Error::UnknownVoter(v.0));
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge(e.0, e.1));
            }
            adj[a.idx()].push(b);
            adj[b.idx()].push(a);
            list.push(e);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        Ok(VoterGraph { adj, edges: list })
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Voter, Voter)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Voter) -> &[Voter] {
        &self.adj[v.idx()]
    }

    pub fn has_edge(&self, a: Voter, b: Voter) -> bool {
        self.adj[a.idx()].binary_search(&b).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Voter> {
        (0..self.adj.len() as u32).map(Voter)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<Voter>> {
        let no_deletions = vec![false; self.num_vertices()];
        let mut seen = vec![false; self.num_vertices()];
        let mut out = Vec::new();
        for v in self.vertices() {
            if !seen[v.idx()] {
                let comp = component_mask(self, v, &no_deletions);
                let mut members = Vec::new();
                for (i, &inside) in comp.iter().enumerate() {
                    if inside {
                        seen[i] = true;
                        members.push(Voter(i as u32));
                    }
                }
                out.push(members);
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.num_vertices() <= 1 || self.components().len() == 1
    }

    /// A forest has no cycles.
    pub fn is_forest(&self) -> bool {
        self.num_edges() + self.components().len() == self.num_vertices()
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.num_edges() + 1 == self.num_vertices()
    }
}

/// Mask of vertices reachable from `start` while avoiding `deleted`.
pub(crate) fn component_mask(graph: &VoterGraph, start: Voter, deleted: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; graph.num_vertices()];
    if deleted[start.idx()] {
        return seen;
    }
    let mut queue = VecDeque::from([start]);
    seen[start.idx()] = true;
    while let Some(u) = queue.pop_front() {
        for &w in graph.neighbors(u) {
            if !seen[w.idx()] && !deleted[w.idx()] {
                seen[w.idx()] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Deletion budget; `Infinite` compares above every finite amount.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Budget {
    Finite(u64),
    Infinite,
}

impl Budget {
    pub fn allows(self, cost: u64) -> bool {
        match self {
            Budget::Finite(b) => cost <= b,
            Budget::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Budget::Finite(b) => Some(b),
            Budget::Infinite => None,
        }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Budget::Finite(b) => write!(f, "{b}"),
            Budget::Infinite => f.write_str("inf"),
        }
    }
}

/// A full control instance: election, network, target, initiator, costs and budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlInstance {
    pub election: Election,
    pub graph: VoterGraph,
    pub target: Candidate,
    pub initiator: Voter,
    pub costs: Vec<u64>,
    pub budget: Budget,
}

impl ControlInstance {
    pub fn new(
        election: Election,
        graph: VoterGraph,
        target: Candidate,
        initiator: Voter,
        costs: Vec<u64>,
        budget: Budget,
    ) -> Result<Self> {
        if graph.num_vertices() != election.num_voters() {
            return Err(Error::InvalidInput(format!(
                "graph has {} vertices but the election has {} voters",
                graph.num_vertices(),
                election.num_voters()
            )));
        }
        if costs.len() != election.num_voters() {
            return Err(Error::InvalidInput(format!("{} costs for {} voters", costs.len(), election.num_voters())));
        }
        if target.idx() >= election.num_candidates() {
            return Err(Error::UnknownCandidate(target.0));
        }
        election.check_voter(initiator)?;
        Ok(ControlInstance { election, graph, target, initiator, costs, budget })
    }

    pub fn num_voters(&self) -> usize {
        self.election.num_voters()
    }

    pub fn num_candidates(&self) -> usize {
        self.election.num_candidates()
    }

    pub fn cost(&self, v: Voter) -> u64 {
        self.costs[v.idx()]
    }

    pub fn vote(&self, v: Voter) -> Candidate {
        self.election.vote(v)
    }

    /// Same instance aimed at another target.
    pub fn with_target(&self, target: Candidate) -> Self {
        ControlInstance { target, ..self.clone() }
    }

    pub fn with_budget(&self, budget: Budget) -> Self {
        ControlInstance { budget, ..self.clone() }
    }

    pub fn total_cost(&self) -> u64 {
        self.costs.iter().sum()
    }
}

/// A deletion set together with its total cost.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WitnessSet {
    pub deleted: BTreeSet<Voter>,
    pub total_cost: u64,
}

impl WitnessSet {
    pub fn new(instance: &ControlInstance, deleted: BTreeSet<Voter>) -> Result<Self> {
        let total_cost = witness_cost(instance, &deleted)?;
        Ok(WitnessSet { deleted, total_cost })
    }

    pub fn empty() -> Self {
        WitnessSet { deleted: BTreeSet::new(), total_cost: 0 }
    }

    pub fn len(&self) -> usize {
        self.deleted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deleted.is_empty()
    }
}

/// Voters reachable from `x` once `deleted` is removed from the graph.
pub fn reachable_from(graph: &VoterGraph, x: Voter, deleted: &BTreeSet<Voter>) -> Result<BTreeSet<Voter>> {
    let n = graph.num_vertices();
    if x.idx() >= n {
        return Err(Error::UnknownVoter(x.0));
    }
    let mut mask = vec![false; n];
    for &d in deleted {
        if d.idx() >= n {
            return Err(Error::UnknownVoter(d.0));
        }
        mask[d.idx()] = true;
    }
    if mask[x.idx()] {
        return Err(Error::InitiatorDeleted(x));
    }
    let comp = component_mask(graph, x, &mask);
    Ok(comp.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| Voter(i as u32)).collect())
}

/// Per-candidate vote counts over `subset`.
pub fn tally(election: &Election, subset: &BTreeSet<Voter>) -> Result<Vec<u32>> {
    let mut counts = vec![0u32; election.num_candidates()];
    for &v in subset {
        election.check_voter(v)?;
        counts[election.vote(v).idx()] += 1;
    }
    Ok(counts)
}

pub(crate) fn tally_mask(election: &Election, mask: &[bool]) -> Vec<u32> {
    let mut counts = vec![0u32; election.num_candidates()];
    for (i, &inside) in mask.iter().enumerate() {
        if inside {
            counts[election.votes[i].idx()] += 1;
        }
    }
    counts
}

/// The candidate with a strictly maximal count, if there is exactly one.
pub fn unique_winner(counts: &[u32]) -> Option<Candidate> {
    let max = *counts.iter().max()?;
    let mut winners = counts.iter().enumerate().filter(|(_, &c)| c == max);
    let (first, _) = winners.next()?;
    if winners.next().is_some() {
        None
    } else {
        Some(Candidate(first as u32))
    }
}

pub(crate) fn outcome_holds(counts: &[u32], target: Candidate, mode: Mode) -> bool {
    match (unique_winner(counts), mode) {
        (Some(w), Mode::Constructive) => w == target,
        (Some(w), Mode::Destructive) => w != target,
        (None, _) => false,
    }
}

/// Certificate check. The budget is deliberately not consulted here.
pub fn evaluate_control(instance: &ControlInstance, witness: &WitnessSet, mode: Mode) -> Result<bool> {
    let reach = reachable_from(&instance.graph, instance.initiator, &witness.deleted)?;
    let counts = tally(&instance.election, &reach)?;
    Ok(outcome_holds(&counts, instance.target, mode))
}

/// Total cost of a deletion set that avoids the initiator.
pub fn witness_cost(instance: &ControlInstance, deleted: &BTreeSet<Voter>) -> Result<u64> {
    let mut total = 0;
    for &v in deleted {
        instance.election.check_voter(v)?;
        if v == instance.initiator {
            return Err(Error::InitiatorDeleted(v));
        }
        total += instance.cost(v);
    }
    Ok(total)
}

/// Checks a witness against both the certificate semantics and the budget.
pub fn verify_witness(instance: &ControlInstance, witness: &WitnessSet, mode: Mode) -> Result<bool> {
    let cost = witness_cost(instance, &witness.deleted)?;
    if cost != witness.total_cost {
        return Ok(false);
    }
    Ok(instance.budget.allows(cost) && evaluate_control(instance, witness, mode)?)
}

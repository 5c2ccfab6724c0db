//! Seedable random instance generators used by tests, benches and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::election::{Budget, Candidate, ControlInstance, Election, Voter, VoterGraph};

/// Uniform random recursive tree with shuffled labels.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> VoterGraph {
    let mut labels: Vec<u32> = (0..n as u32).collect();
    labels.shuffle(rng);
    let edges: Vec<(Voter, Voter)> = (1..n).map(|i| (Voter(labels[rng.gen_range(0..i)]), Voter(labels[i]))).collect();
    VoterGraph::new(n, edges).expect("tree edges are simple")
}

/// A random spanning tree plus every other pair independently with probability `p`.
pub fn random_connected_graph(n: usize, p: f64, rng: &mut impl Rng) -> VoterGraph {
    let tree = random_tree(n, rng);
    let mut edges = tree.edges().to_vec();
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            let e = (Voter(a), Voter(b));
            if !tree.has_edge(e.0, e.1) && rng.gen_bool(p) {
                edges.push(e);
            }
        }
    }
    VoterGraph::new(n, edges).expect("edges are simple")
}

/// Shape of a random instance.
#[derive(Clone, Copy, Debug)]
pub struct InstanceParams {
    pub voters: usize,
    pub candidates: usize,
    /// Extra-edge probability; ignored when `tree` is set.
    pub edge_prob: f64,
    pub tree: bool,
    /// Costs are drawn from `min_cost..=max_cost`.
    pub min_cost: u64,
    pub max_cost: u64,
    /// Chance of an unlimited budget; otherwise uniform in `[0, total cost]`.
    pub infinite_budget_prob: f64,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams {
            voters: 8,
            candidates: 2,
            edge_prob: 0.5,
            tree: false,
            min_cost: 0,
            max_cost: 5,
            infinite_budget_prob: 0.2,
        }
    }
}

/// Uniform votes, initiator and target over a random connected graph.
pub fn random_instance(params: &InstanceParams, rng: &mut impl Rng) -> ControlInstance {
    let n = params.voters;
    let graph = if params.tree { random_tree(n, rng) } else { random_connected_graph(n, params.edge_prob, rng) };
    let votes = (0..n).map(|_| Candidate(rng.gen_range(0..params.candidates as u32))).collect();
    let election = Election::anonymous(params.candidates, votes).expect("valid election");
    let costs: Vec<u64> = (0..n).map(|_| rng.gen_range(params.min_cost..=params.max_cost)).collect();
    let total: u64 = costs.iter().sum();
    let budget = if rng.gen_bool(params.infinite_budget_prob) {
        Budget::Infinite
    } else {
        Budget::Finite(rng.gen_range(0..=total))
    };
    let initiator = Voter(rng.gen_range(0..n as u32));
    let target = Candidate(rng.gen_range(0..params.candidates as u32));
    ControlInstance::new(election, graph, target, initiator, costs, budget).expect("consistent instance")
}

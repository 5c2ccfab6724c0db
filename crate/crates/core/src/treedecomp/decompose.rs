use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::TreeDecomposition;
use crate::election::{Voter, VoterGraph};

/// Knobs for [`decompose_with`].
#[derive(Clone, Copy, Debug)]
pub struct DecomposeOptions {
    /// Seed for min-fill tie-breaking.
    pub seed: u64,
    /// Graphs with at most this many vertices also get an exact elimination-order search.
    pub exact_limit: usize,
    /// Forests are rooted here (normally the initiator), so its component
    /// is only assembled near the root of the decomposition.
    pub root: Option<Voter>,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { seed: 0, exact_limit: 12, root: None }
    }
}

/// Decomposition with default options.
pub fn decompose(graph: &VoterGraph) -> TreeDecomposition {
    decompose_with(graph, DecomposeOptions::default())
}

/// Forests get a width-1 (or 0) decomposition from a rooted traversal; other
/// graphs the better of min-fill and, for small graphs, an exact search.
pub fn decompose_with(graph: &VoterGraph, opts: DecomposeOptions) -> TreeDecomposition {
    assert!(graph.num_vertices() > 0, "cannot decompose an empty graph");
    if graph.is_forest() {
        return forest_decomposition(graph, opts.root);
    }
    let heuristic = min_fill_order(graph, opts.seed);
    let order = if graph.num_vertices() <= opts.exact_limit {
        let exact = exact_elimination_order(graph);
        if elimination_width(graph, &exact) < elimination_width(graph, &heuristic) {
            exact
        } else {
            heuristic
        }
    } else {
        heuristic
    };
    from_elimination_order(graph, &order)
}

fn forest_decomposition(graph: &VoterGraph, first: Option<Voter>) -> TreeDecomposition {
    let n = graph.num_vertices();
    let mut bags = vec![Vec::new(); n];
    let mut parents = vec![None; n];
    let mut visited = vec![false; n];
    let mut prev_root: Option<usize> = None;
    let starts = first.into_iter().filter(|v| v.idx() < n).chain(graph.vertices());
    for root in starts {
        if visited[root.idx()] {
            continue;
        }
        visited[root.idx()] = true;
        bags[root.idx()] = vec![root];
        // hang later component roots under the first so the result is one tree
        parents[root.idx()] = prev_root;
        prev_root = prev_root.or(Some(root.idx()));
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in graph.neighbors(u) {
                if !visited[w.idx()] {
                    visited[w.idx()] = true;
                    bags[w.idx()] = vec![u, w];
                    parents[w.idx()] = Some(u.idx());
                    queue.push_back(w);
                }
            }
        }
    }
    TreeDecomposition::new(bags, parents)
}

/// Greedy min-fill elimination order; ties broken by a seeded shuffle.
pub fn min_fill_order(graph: &VoterGraph, seed: u64) -> Vec<Voter> {
    let n = graph.num_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<BTreeSet<usize>> =
        graph.vertices().map(|v| graph.neighbors(v).iter().map(|w| w.idx()).collect()).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    while !alive.is_empty() {
        alive.shuffle(&mut rng);
        let mut best = (usize::MAX, usize::MAX);
        let mut pick = 0;
        for (pos, &v) in alive.iter().enumerate() {
            let nb: Vec<usize> = adj[v].iter().copied().collect();
            let mut fill = 0;
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    if !adj[nb[i]].contains(&nb[j]) {
                        fill += 1;
                    }
                }
            }
            let score = (fill, nb.len());
            if score < best {
                best = score;
                pick = pos;
            }
        }
        let v = alive.swap_remove(pick);
        eliminate(&mut adj, v);
        order.push(Voter(v as u32));
    }
    order
}

fn eliminate(adj: &mut [BTreeSet<usize>], v: usize) {
    let nb: Vec<usize> = adj[v].iter().copied().collect();
    for &a in &nb {
        adj[a].remove(&v);
        for &b in &nb {
            if a != b {
                adj[a].insert(b);
            }
        }
    }
    adj[v].clear();
}

/// Largest "higher neighbourhood" met while eliminating in `order`.
fn elimination_width(graph: &VoterGraph, order: &[Voter]) -> usize {
    let mut adj: Vec<BTreeSet<usize>> =
        graph.vertices().map(|v| graph.neighbors(v).iter().map(|w| w.idx()).collect()).collect();
    let mut width = 0;
    for v in order {
        width = width.max(adj[v.idx()].len());
        eliminate(&mut adj, v.idx());
    }
    width
}

/// Optimal elimination order by dynamic programming over vertex subsets.
///
/// `best[S]` is the smallest width achievable when the vertices of `S` are
/// eliminated first; the cost of eliminating `v` after `S` is the number of
/// vertices outside `S + v` reachable from `v` through `S`.
pub fn exact_elimination_order(graph: &VoterGraph) -> Vec<Voter> {
    let n = graph.num_vertices();
    assert!(n <= 20, "exact search is exponential in the vertex count");
    let nb: Vec<u32> = graph.vertices().map(|v| graph.neighbors(v).iter().fold(0u32, |m, w| m | (1 << w.0))).collect();
    let q = |set: u32, v: usize| -> u32 {
        // vertices outside set+v reachable from v via set
        let mut seen = 1u32 << v;
        let mut frontier = 1u32 << v;
        let mut out = 0u32;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let mut next = nb[u] & !seen;
            seen |= next;
            out |= next & !set;
            next &= set;
            frontier |= next;
        }
        out.count_ones()
    };
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut best = vec![u32::MAX; 1usize << n];
    let mut choice = vec![0u8; 1usize << n];
    best[0] = 0;
    for set in 1..=full {
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = set & !(1 << v);
            let w = best[prev as usize].max(q(prev, v));
            if w < best[set as usize] {
                best[set as usize] = w;
                choice[set as usize] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut set = full;
    while set != 0 {
        let v = choice[set as usize];
        order.push(Voter(v as u32));
        set &= !(1 << v);
    }
    order.reverse();
    order
}

/// Builds the decomposition induced by eliminating vertices in `order`.
///
/// Each vertex gets the bag of itself plus its later neighbours in the filled
/// graph; its parent is the earliest-eliminated of those neighbours.
pub fn from_elimination_order(graph: &VoterGraph, order: &[Voter]) -> TreeDecomposition {
    let n = graph.num_vertices();
    assert_eq!(order.len(), n, "order must list every vertex once");
    let mut pos = vec![usize::MAX; n];
    for (i, v) in order.iter().enumerate() {
        pos[v.idx()] = i;
    }
    let mut adj: Vec<BTreeSet<usize>> =
        graph.vertices().map(|v| graph.neighbors(v).iter().map(|w| w.idx()).collect()).collect();
    let mut bags = vec![Vec::new(); n];
    let mut parents = vec![None; n];
    let mut roots = Vec::new();
    for v in order {
        let v = v.idx();
        let higher: Vec<usize> = adj[v].iter().copied().collect();
        let mut bag: Vec<Voter> = higher.iter().map(|&w| Voter(w as u32)).collect();
        bag.push(Voter(v as u32));
        bags[pos[v]] = bag;
        match higher.iter().min_by_key(|&&w| pos[w]) {
            Some(&p) => parents[pos[v]] = Some(pos[p]),
            None => roots.push(pos[v]),
        }
        eliminate(&mut adj, v);
    }
    // one root per component; hang the earlier ones under the last
    let last = *roots.last().expect("at least one vertex");
    for &r in &roots[..roots.len() - 1] {
        parents[r] = Some(last);
    }
    TreeDecomposition::new(bags, parents)
}

use std::collections::BTreeSet;
use std::fmt;

use super::{validate, TreeDecomposition, ValidationReport, Violation};
use crate::election::{Voter, VoterGraph};
use crate::error::{Error, Result};

/// What a nice-decomposition node does relative to its child bag(s).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf,
    Introduce(Voter),
    /// Endpoints are stored as `(smaller, larger)`.
    IntroduceEdge(Voter, Voter),
    Forget(Voter),
    Join,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            NodeKind::Leaf => f.write_str("leaf"),
            NodeKind::Introduce(v) => write!(f, "introduce({})", v.0),
            NodeKind::IntroduceEdge(a, b) => write!(f, "introduce-edge({},{})", a.0, b.0),
            NodeKind::Forget(v) => write!(f, "forget({})", v.0),
            NodeKind::Join => f.write_str("join"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NodeKind,
    /// Sorted.
    pub bag: Vec<Voter>,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

/// A nice tree decomposition. Node ids are dense and in post-order, so every
/// child id is smaller than its parent's and the root is the last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    nodes: Vec<NiceNode>,
    pinned: Option<Voter>,
}

impl NiceTreeDecomposition {
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &NiceNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// The initiator this decomposition was pinned at, if any.
    pub fn pinned(&self) -> Option<Voter> {
        self.pinned
    }

    pub fn width(&self) -> isize {
        self.nodes.iter().map(|n| n.bag.len() as isize).max().unwrap_or(0) - 1
    }

    pub fn introduced_edges(&self) -> impl Iterator<Item = (Voter, Voter)> + '_ {
        self.nodes.iter().filter_map(|n| match n.kind {
            NodeKind::IntroduceEdge(a, b) => Some((a, b)),
            _ => None,
        })
    }

    /// Forgets the node kinds.
    pub fn as_tree_decomposition(&self) -> TreeDecomposition {
        TreeDecomposition::new(
            self.nodes.iter().map(|n| n.bag.clone()).collect(),
            self.nodes.iter().map(|n| n.parent).collect(),
        )
    }

    /// Plain decomposition conditions plus every nice-node rule, the
    /// exactly-once edge rule and, if pinned, the pinning invariants.
    pub fn validate(&self, graph: &VoterGraph) -> ValidationReport {
        let mut report = validate(graph, &self.as_tree_decomposition());
        let bad = |node: usize, reason: String| Violation::BadNode { node, reason };
        let mut introduced: BTreeSet<(Voter, Voter)> = BTreeSet::new();
        for (id, node) in self.nodes.iter().enumerate() {
            if node.children.iter().any(|&c| c >= id || self.nodes[c].parent != Some(id)) {
                report.violations.push(bad(id, "children must precede their parent".into()));
                continue;
            }
            let child_bag = |k: usize| -> &[Voter] { &self.nodes[node.children[k]].bag };
            let reason = match (node.kind, node.children.len()) {
                (NodeKind::Leaf, 0) => (!node.bag.is_empty()).then(|| "leaf bag must be empty".to_string()),
                (NodeKind::Introduce(v), 1) => {
                    let mut expect = child_bag(0).to_vec();
                    (!expect.contains(&v))
                        .then(|| {
                            expect.push(v);
                            expect.sort_unstable();
                        })
                        .filter(|_| expect == node.bag)
                        .is_none()
                        .then(|| format!("introduce {} does not extend the child bag by it", v.0))
                }
                (NodeKind::Forget(v), 1) => {
                    let expect: Vec<Voter> = child_bag(0).iter().copied().filter(|&w| w != v).collect();
                    (!child_bag(0).contains(&v) || expect != node.bag)
                        .then(|| format!("forget {} does not shrink the child bag by it", v.0))
                }
                (NodeKind::IntroduceEdge(a, b), 1) => {
                    if child_bag(0) != node.bag.as_slice() {
                        Some("introduce-edge must keep the child bag".into())
                    } else if !node.bag.contains(&a) || !node.bag.contains(&b) {
                        Some(format!("edge {}-{} endpoints not in bag", a.0, b.0))
                    } else if !graph.has_edge(a, b) {
                        Some(format!("{}-{} is not a graph edge", a.0, b.0))
                    } else if !introduced.insert((a, b)) {
                        Some(format!("edge {}-{} introduced twice", a.0, b.0))
                    } else {
                        None
                    }
                }
                (NodeKind::Join, 2) => (child_bag(0) != node.bag.as_slice() || child_bag(1) != node.bag.as_slice())
                    .then(|| "join children must share its bag".to_string()),
                (kind, k) => Some(format!("{kind} node with {k} children")),
            };
            if let Some(r) = reason {
                report.violations.push(bad(id, r));
            }
        }
        for &(a, b) in graph.edges() {
            if !introduced.contains(&(a, b)) {
                report.violations.push(bad(self.root(), format!("edge {}-{} is never introduced", a.0, b.0)));
            }
        }
        let root = self.root();
        match self.pinned {
            None => {
                if !self.nodes[root].bag.is_empty() {
                    report.violations.push(bad(root, "root bag must be empty".into()));
                }
            }
            Some(x) => {
                if self.nodes[root].bag != [x] {
                    report.violations.push(bad(root, format!("pinned root bag must be {{{}}}", x.0)));
                }
                for (id, node) in self.nodes.iter().enumerate() {
                    if node.kind == NodeKind::Forget(x) {
                        report.violations.push(bad(id, "the initiator is forgotten".into()));
                    }
                    if node.kind != NodeKind::Leaf && node.bag.binary_search(&x).is_err() {
                        report.violations.push(bad(id, "internal bag misses the initiator".into()));
                    }
                    if node.kind == NodeKind::Leaf
                        && node.parent.map(|p| self.nodes[p].kind) != Some(NodeKind::Introduce(x))
                    {
                        report.violations.push(bad(id, "leaf parent does not introduce the initiator".into()));
                    }
                }
            }
        }
        report
    }
}

/// Mutable node soup used while building; finalized into post-order.
struct Arena {
    kind: Vec<NodeKind>,
    bag: Vec<Vec<Voter>>,
    children: Vec<Vec<usize>>,
    removed: Vec<bool>,
}

impl Arena {
    fn new() -> Self {
        Arena { kind: Vec::new(), bag: Vec::new(), children: Vec::new(), removed: Vec::new() }
    }

    fn from_nice(ntd: &NiceTreeDecomposition) -> Self {
        Arena {
            kind: ntd.nodes.iter().map(|n| n.kind).collect(),
            bag: ntd.nodes.iter().map(|n| n.bag.clone()).collect(),
            children: ntd.nodes.iter().map(|n| n.children.clone()).collect(),
            removed: vec![false; ntd.nodes.len()],
        }
    }

    fn push(&mut self, kind: NodeKind, bag: Vec<Voter>, children: Vec<usize>) -> usize {
        self.kind.push(kind);
        self.bag.push(bag);
        self.children.push(children);
        self.removed.push(false);
        self.kind.len() - 1
    }

    fn parents(&self) -> Vec<Option<usize>> {
        let mut p = vec![None; self.kind.len()];
        for (i, ch) in self.children.iter().enumerate() {
            if self.removed[i] {
                continue;
            }
            for &c in ch {
                p[c] = Some(i);
            }
        }
        p
    }

    /// Inserts a node with `kind` and `bag` between `node` and its parent.
    fn insert_above(
        &mut self,
        node: usize,
        parents: &mut Vec<Option<usize>>,
        kind: NodeKind,
        bag: Vec<Voter>,
    ) -> usize {
        let parent = parents[node];
        let new = self.push(kind, bag, vec![node]);
        parents.push(parent);
        if let Some(p) = parent {
            for c in &mut self.children[p] {
                if *c == node {
                    *c = new;
                }
            }
        }
        parents[node] = Some(new);
        new
    }

    fn finalize(self, root: usize, pinned: Option<Voter>) -> NiceTreeDecomposition {
        let mut order = Vec::new();
        let mut stack = vec![(root, false)];
        while let Some((u, expanded)) = stack.pop() {
            if expanded {
                order.push(u);
            } else {
                stack.push((u, true));
                for &c in self.children[u].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        let mut new_id = vec![usize::MAX; self.kind.len()];
        for (i, &u) in order.iter().enumerate() {
            new_id[u] = i;
        }
        let mut nodes: Vec<NiceNode> = order
            .iter()
            .map(|&u| NiceNode {
                kind: self.kind[u],
                bag: self.bag[u].clone(),
                children: self.children[u].iter().map(|&c| new_id[c]).collect(),
                parent: None,
            })
            .collect();
        for i in 0..nodes.len() {
            for k in 0..nodes[i].children.len() {
                let c = nodes[i].children[k];
                nodes[c].parent = Some(i);
            }
        }
        NiceTreeDecomposition { nodes, pinned }
    }
}

fn with(bag: &[Voter], v: Voter) -> Vec<Voter> {
    let mut b = bag.to_vec();
    if let Err(pos) = b.binary_search(&v) {
        b.insert(pos, v);
    }
    b
}

fn without(bag: &[Voter], v: Voter) -> Vec<Voter> {
    bag.iter().copied().filter(|&w| w != v).collect()
}

/// Contracts tree edges whose one endpoint's bag is contained in the other's.
fn compress(td: &TreeDecomposition) -> (Vec<Vec<Voter>>, Vec<Vec<usize>>, usize) {
    let n = td.len();
    let mut bags: Vec<Vec<Voter>> = td.bags().to_vec();
    let mut parent: Vec<Option<usize>> = td.parents().to_vec();
    let mut alive = vec![true; n];
    let subset = |a: &[Voter], b: &[Voter]| a.iter().all(|v| b.binary_search(v).is_ok());
    loop {
        let mut changed = false;
        for c in 0..n {
            let Some(p) = parent[c].filter(|_| alive[c]) else { continue };
            let absorb = if subset(&bags[c], &bags[p]) {
                true
            } else if subset(&bags[p], &bags[c]) {
                bags[p] = bags[c].clone();
                true
            } else {
                false
            };
            if absorb {
                alive[c] = false;
                for q in parent.iter_mut() {
                    if *q == Some(c) {
                        *q = Some(p);
                    }
                }
                parent[c] = None;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let ids: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    let mut remap = vec![usize::MAX; n];
    for (new, &old) in ids.iter().enumerate() {
        remap[old] = new;
    }
    let mut children = vec![Vec::new(); ids.len()];
    let mut root = 0;
    for &old in &ids {
        match parent[old] {
            Some(p) => children[remap[p]].push(remap[old]),
            None => root = remap[old],
        }
    }
    (ids.iter().map(|&i| bags[i].clone()).collect(), children, root)
}

/// Converts a valid decomposition into a nice one of the same width.
///
/// Redundant nodes are contracted first, so the result has at most
/// `5 * (width + 1) * |V|` nodes. Every edge gets one introduce-edge node,
/// placed directly below the first forget of one of its endpoints, i.e. at
/// the highest node whose bag holds both.
pub fn to_nice(graph: &VoterGraph, td: &TreeDecomposition) -> Result<NiceTreeDecomposition> {
    let report = validate(graph, td);
    if !report.is_ok() {
        return Err(Error::InvalidDecomposition(report.violations));
    }
    let (bags, children, root) = compress(td);
    let order = {
        let mut order = Vec::new();
        let mut stack = vec![(root, false)];
        while let Some((u, expanded)) = stack.pop() {
            if expanded {
                order.push(u);
            } else {
                stack.push((u, true));
                for &c in children[u].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        order
    };
    let mut arena = Arena::new();
    let mut top = vec![usize::MAX; bags.len()];
    for &t in &order {
        let target = &bags[t];
        let mut tops = Vec::new();
        if children[t].is_empty() {
            let mut cur = arena.push(NodeKind::Leaf, Vec::new(), Vec::new());
            for &v in target {
                let bag = with(&arena.bag[cur], v);
                cur = arena.push(NodeKind::Introduce(v), bag, vec![cur]);
            }
            tops.push(cur);
        }
        for &c in &children[t] {
            let mut cur = top[c];
            for &v in &bags[c] {
                if target.binary_search(&v).is_err() {
                    let bag = without(&arena.bag[cur], v);
                    cur = arena.push(NodeKind::Forget(v), bag, vec![cur]);
                }
            }
            for &v in target {
                if bags[c].binary_search(&v).is_err() {
                    let bag = with(&arena.bag[cur], v);
                    cur = arena.push(NodeKind::Introduce(v), bag, vec![cur]);
                }
            }
            tops.push(cur);
        }
        let mut acc = tops[0];
        for &other in &tops[1..] {
            acc = arena.push(NodeKind::Join, target.clone(), vec![acc, other]);
        }
        top[t] = acc;
    }
    let mut cur = top[root];
    for &v in &bags[root] {
        let bag = without(&arena.bag[cur], v);
        cur = arena.push(NodeKind::Forget(v), bag, vec![cur]);
    }
    let root_node = cur;

    // highest node holding each vertex: the child of its forget node
    let mut parents = arena.parents();
    let mut highest = vec![usize::MAX; graph.num_vertices()];
    for (i, kind) in arena.kind.iter().enumerate() {
        if let NodeKind::Forget(v) = kind {
            highest[v.idx()] = arena.children[i][0];
        }
    }
    for &(a, b) in graph.edges() {
        let ta = highest[a.idx()];
        let at = if arena.bag[ta].binary_search(&b).is_ok() { ta } else { highest[b.idx()] };
        debug_assert!(arena.bag[at].binary_search(&a).is_ok() && arena.bag[at].binary_search(&b).is_ok());
        // stack new edge nodes on top of any already placed there
        let mut slot = at;
        while let Some(p) = parents[slot] {
            if matches!(arena.kind[p], NodeKind::IntroduceEdge(..)) {
                slot = p;
            } else {
                break;
            }
        }
        let bag = arena.bag[at].clone();
        arena.insert_above(slot, &mut parents, NodeKind::IntroduceEdge(a, b), bag);
    }
    Ok(arena.finalize(root_node, None))
}

/// Keeps `x` in every internal bag: afterwards each leaf's parent introduces
/// `x`, `x` is never forgotten and the root bag is `{x}`. Width grows by at
/// most one.
pub fn pin_x(ntd: &NiceTreeDecomposition, x: Voter) -> Result<NiceTreeDecomposition> {
    if ntd.pinned.is_some() {
        return Err(Error::AlreadyPinned);
    }
    let known = ntd.nodes.iter().any(|n| n.bag.contains(&x));
    if !known {
        return Err(Error::UnknownVoter(x.0));
    }
    let mut arena = Arena::from_nice(ntd);
    let n = arena.kind.len();
    let mut parents = arena.parents();
    let mut root = ntd.root();

    for i in 0..n {
        if arena.kind[i] != NodeKind::Leaf {
            arena.bag[i] = with(&arena.bag[i], x);
        }
    }
    for leaf in 0..n {
        if arena.kind[leaf] != NodeKind::Leaf {
            continue;
        }
        let parent_introduces_x = parents[leaf].is_some_and(|p| arena.kind[p] == NodeKind::Introduce(x));
        if !parent_introduces_x {
            let new = arena.insert_above(leaf, &mut parents, NodeKind::Introduce(x), vec![x]);
            if parents[new].is_none() {
                root = new;
            }
        }
    }
    // splice out redundant introduce(x)/forget(x) nodes, root to leaves
    let mut stack = vec![root];
    while let Some(t) = stack.pop() {
        let redundant = matches!(arena.kind[t], NodeKind::Introduce(v) | NodeKind::Forget(v) if v == x)
            && !arena.children[t].iter().any(|&c| arena.kind[c] == NodeKind::Leaf);
        if redundant {
            let child = arena.children[t][0];
            match parents[t] {
                Some(p) => {
                    for c in &mut arena.children[p] {
                        if *c == t {
                            *c = child;
                        }
                    }
                }
                None => root = child,
            }
            parents[child] = parents[t];
            arena.removed[t] = true;
            arena.children[t].clear();
            stack.push(child);
        } else {
            stack.extend(arena.children[t].iter().copied());
        }
    }
    Ok(arena.finalize(root, Some(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treedecomp::decompose;

    fn graph(n: usize, edges: &[(u32, u32)]) -> VoterGraph {
        VoterGraph::new(n, edges.iter().map(|&(a, b)| (Voter(a), Voter(b)))).unwrap()
    }

    #[test]
    fn single_edge_structure() {
        let g = graph(2, &[(0, 1)]);
        let td = TreeDecomposition::new(vec![vec![Voter(0), Voter(1)]], vec![None]);
        let nice = to_nice(&g, &td).unwrap();
        let kinds: Vec<NodeKind> = nice.nodes().iter().map(|n| n.kind).collect();
        assert_eq!(
            kinds,
            vec![
                NodeKind::Leaf,
                NodeKind::Introduce(Voter(0)),
                NodeKind::Introduce(Voter(1)),
                NodeKind::IntroduceEdge(Voter(0), Voter(1)),
                NodeKind::Forget(Voter(0)),
                NodeKind::Forget(Voter(1)),
            ]
        );
        assert!(nice.validate(&g).is_ok());
    }

    #[test]
    fn cycle_keeps_width_and_introduces_each_edge_once() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let nice = to_nice(&g, &decompose(&g)).unwrap();
        assert_eq!(nice.width(), 2);
        assert_eq!(nice.introduced_edges().count(), 5);
        let report = nice.validate(&g);
        assert!(report.is_ok(), "{report:?}");
    }

    #[test]
    fn invalid_input_is_rejected() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let td = TreeDecomposition::new(vec![vec![Voter(0), Voter(1)], vec![Voter(2)]], vec![None, Some(0)]);
        assert!(matches!(to_nice(&g, &td), Err(Error::InvalidDecomposition(_))));
    }

    #[test]
    fn pinning_a_path() {
        let g = graph(2, &[(0, 1)]);
        let td = TreeDecomposition::new(vec![vec![Voter(0), Voter(1)]], vec![None]);
        let nice = to_nice(&g, &td).unwrap();
        let pinned = pin_x(&nice, Voter(0)).unwrap();
        let report = pinned.validate(&g);
        assert!(report.is_ok(), "{report:?}");
        assert_eq!(pinned.node(pinned.root()).bag, vec![Voter(0)]);
        for node in pinned.nodes() {
            if node.kind != NodeKind::Leaf {
                assert!(node.bag.contains(&Voter(0)));
            }
        }
        assert!(pinned.width() <= nice.width() + 1);
        assert_eq!(pin_x(&pinned, Voter(0)), Err(Error::AlreadyPinned));
    }

    #[test]
    fn pinning_rejects_unknown_vertex() {
        let g = graph(2, &[(0, 1)]);
        let nice = to_nice(&g, &decompose(&g)).unwrap();
        assert_eq!(pin_x(&nice, Voter(5)), Err(Error::UnknownVoter(5)));
    }

    #[test]
    fn pinning_single_vertex() {
        let g = graph(1, &[]);
        let nice = to_nice(&g, &decompose(&g)).unwrap();
        let pinned = pin_x(&nice, Voter(0)).unwrap();
        assert!(pinned.validate(&g).is_ok());
        assert_eq!(pinned.len(), 2);
    }

    #[test]
    fn redundant_nodes_are_contracted() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let b = |ids: &[u32]| ids.iter().map(|&i| Voter(i)).collect::<Vec<_>>();
        let td = TreeDecomposition::new(
            vec![b(&[0, 1]), b(&[1]), b(&[1]), b(&[1, 2]), b(&[0])],
            vec![None, Some(0), Some(1), Some(2), Some(0)],
        );
        let nice = to_nice(&g, &td).unwrap();
        assert!(nice.validate(&g).is_ok());
        assert!(nice.len() <= 5 * 2 * 3);
    }
}

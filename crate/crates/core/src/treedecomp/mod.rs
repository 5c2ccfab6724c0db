//! Tree decompositions of voter graphs.
//!
//! [`TreeDecomposition`] is the plain bag-tree; [`NiceTreeDecomposition`] is
//! the typed variant the dynamic programs run on. Plain decompositions come
//! from [`decompose`] or from a file, are converted with [`to_nice`] and then
//! pinned at the initiator with [`pin_x`].

mod decompose;
mod nice;

use std::collections::BTreeSet;
use std::fmt;

use crate::election::{Voter, VoterGraph};

pub use decompose::{
    decompose, decompose_with, exact_elimination_order, from_elimination_order, min_fill_order, DecomposeOptions,
};
pub use nice::{pin_x, to_nice, NiceNode, NiceTreeDecomposition, NodeKind};

/// Rooted tree of bags. Node `i` has bag `bags[i]` (sorted) and parent `parents[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<Voter>>,
    parents: Vec<Option<usize>>,
}

/// A broken decomposition condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The node/parent structure is not a single rooted tree.
    NotATree(String),
    /// A bag mentions a vertex the graph does not have.
    UnknownVertex { node: usize, vertex: Voter },
    /// The vertex is in no bag.
    UncoveredVertex(Voter),
    /// No bag holds both endpoints.
    UncoveredEdge(Voter, Voter),
    /// The nodes whose bags hold the vertex are not connected; `nodes` are
    /// the topmost nodes of the separate pieces.
    Disconnected { vertex: Voter, nodes: Vec<usize> },
    /// A nice-decomposition rule does not hold at `node`.
    BadNode { node: usize, reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Violation::NotATree(s) => write!(f, "not a rooted tree: {s}"),
            Violation::UnknownVertex { node, vertex } => write!(f, "node {node} holds unknown vertex {}", vertex.0),
            Violation::UncoveredVertex(v) => write!(f, "vertex {} is in no bag", v.0),
            Violation::UncoveredEdge(a, b) => write!(f, "edge {}-{} is in no bag", a.0, b.0),
            Violation::Disconnected { vertex, nodes } => {
                write!(f, "bags holding vertex {} are disconnected (pieces topped by {nodes:?})", vertex.0)
            }
            Violation::BadNode { node, reason } => write!(f, "node {node}: {reason}"),
        }
    }
}

/// Outcome of [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl TreeDecomposition {
    /// Bags are sorted and deduplicated on construction.
    pub fn new(bags: Vec<Vec<Voter>>, parents: Vec<Option<usize>>) -> Self {
        assert_eq!(bags.len(), parents.len(), "one parent slot per bag");
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { bags, parents }
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn bag(&self, node: usize) -> &[Voter] {
        &self.bags[node]
    }

    pub fn bags(&self) -> &[Vec<Voter>] {
        &self.bags
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parents[node]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parents
    }

    /// Max bag size minus one; `-1` for a decomposition with only empty bags.
    pub fn width(&self) -> isize {
        self.bags.iter().map(|b| b.len() as isize).max().unwrap_or(0) - 1
    }

    pub fn root(&self) -> Option<usize> {
        let mut roots = (0..self.len()).filter(|&i| self.parents[i].is_none());
        let r = roots.next()?;
        roots.next().is_none().then_some(r)
    }

    /// Children lists, or an explanation of why the parent links do not form a rooted tree.
    pub(crate) fn children(&self) -> Result<Vec<Vec<usize>>, String> {
        let n = self.len();
        if n == 0 {
            return Err("no nodes".into());
        }
        let roots: Vec<usize> = (0..n).filter(|&i| self.parents[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(format!("expected exactly one root, found {}", roots.len()));
        }
        let mut children = vec![Vec::new(); n];
        for (i, p) in self.parents.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(format!("node {i} has unknown parent {p}"));
                }
                children[p].push(i);
            }
        }
        // every node must reach the root
        let mut stack = vec![roots[0]];
        let mut count = 0;
        while let Some(u) = stack.pop() {
            count += 1;
            stack.extend(children[u].iter().copied());
        }
        if count != n {
            return Err(format!("{} node(s) lie on a cycle or are detached", n - count));
        }
        Ok(children)
    }
}

/// Checks the three decomposition conditions (plus basic tree structure).
pub fn validate(graph: &VoterGraph, td: &TreeDecomposition) -> ValidationReport {
    let mut violations = Vec::new();
    if let Err(e) = td.children() {
        return ValidationReport { violations: vec![Violation::NotATree(e)] };
    }
    let n = graph.num_vertices();
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (node, bag) in td.bags().iter().enumerate() {
        for &v in bag {
            if v.idx() >= n {
                violations.push(Violation::UnknownVertex { node, vertex: v });
            } else {
                holders[v.idx()].push(node);
            }
        }
    }
    for v in graph.vertices() {
        if holders[v.idx()].is_empty() {
            violations.push(Violation::UncoveredVertex(v));
        }
    }
    for &(a, b) in graph.edges() {
        let covered = td.bags().iter().any(|bag| bag.binary_search(&a).is_ok() && bag.binary_search(&b).is_ok());
        if !covered {
            violations.push(Violation::UncoveredEdge(a, b));
        }
    }
    for v in graph.vertices() {
        let nodes = &holders[v.idx()];
        if nodes.len() < 2 {
            continue;
        }
        let inside: BTreeSet<usize> = nodes.iter().copied().collect();
        // a holder whose parent is not a holder tops one connected piece
        let tops: Vec<usize> =
            nodes.iter().copied().filter(|&t| td.parent(t).is_none_or(|p| !inside.contains(&p))).collect();
        if tops.len() > 1 {
            violations.push(Violation::Disconnected { vertex: v, nodes: tops });
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(ids: &[u32]) -> Vec<Voter> {
        ids.iter().map(|&i| Voter(i)).collect()
    }

    fn path3() -> VoterGraph {
        VoterGraph::new(3, [(Voter(0), Voter(1)), (Voter(1), Voter(2))]).unwrap()
    }

    #[test]
    fn path_chain_is_valid() {
        let td = TreeDecomposition::new(vec![v(&[0, 1]), v(&[1, 2])], vec![None, Some(0)]);
        let report = validate(&path3(), &td);
        assert!(report.is_ok(), "{report:?}");
        assert_eq!(td.width(), 1);
    }

    #[test]
    fn missing_edge_is_reported() {
        let td = TreeDecomposition::new(vec![v(&[0, 1]), v(&[2])], vec![None, Some(0)]);
        let report = validate(&path3(), &td);
        assert_eq!(report.violations, vec![Violation::UncoveredEdge(Voter(1), Voter(2))]);
    }

    #[test]
    fn disconnected_occurrence_is_reported() {
        // 0 sits in the two ends of the chain but not the middle
        let g = VoterGraph::new(3, [(Voter(0), Voter(1)), (Voter(1), Voter(2))]).unwrap();
        let td = TreeDecomposition::new(vec![v(&[0, 1]), v(&[1, 2]), v(&[0, 2])], vec![None, Some(0), Some(1)]);
        let report = validate(&g, &td);
        assert!(matches!(report.violations.as_slice(), [Violation::Disconnected { vertex: Voter(0), .. }]));
    }

    #[test]
    fn structural_problems() {
        let td = TreeDecomposition::new(vec![v(&[0]), v(&[1])], vec![None, None]);
        assert!(matches!(validate(&path3(), &td).violations[0], Violation::NotATree(_)));
        let td = TreeDecomposition::new(vec![v(&[0, 1, 2, 9])], vec![None]);
        assert_eq!(validate(&path3(), &td).violations, vec![Violation::UnknownVertex { node: 0, vertex: Voter(9) }]);
    }
}

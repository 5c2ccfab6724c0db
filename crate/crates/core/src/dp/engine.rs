//! Table fill shared by all payloads.
//!
//! A payload assigns each voter a unit row of `stride` integers; a part's row
//! is the sum of the unit rows over its component. Plain vote counts, the
//! rival-minus-target difference and per-opponent margins are all payloads.

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;
use rayon::prelude::*;

use super::partition::{forget_map, introduce_map, join_map, merge_map, CountTuple, DpKey, PartitionKey, RowMap};
use crate::election::{ControlInstance, Voter};
use crate::error::{Error, Result};
use crate::treedecomp::{NiceTreeDecomposition, NodeKind};

/// Unit rows for every voter, flat.
#[derive(Clone, Debug)]
pub(crate) struct Payload {
    pub(crate) stride: usize,
    units: Vec<i32>,
}

impl Payload {
    pub(crate) fn new(stride: usize, n: usize, unit: impl Fn(Voter, &mut [i32])) -> Self {
        let mut units = vec![0; n * stride];
        for i in 0..n {
            unit(Voter(i as u32), &mut units[i * stride..(i + 1) * stride]);
        }
        Payload { stride, units }
    }

    pub(crate) fn unit(&self, v: Voter) -> &[i32] {
        &self.units[v.idx() * self.stride..(v.idx() + 1) * self.stride]
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Limits {
    /// Entries costing more are dropped.
    pub(crate) cap: Option<u64>,
    /// Drop entries beaten by a cheaper entry with componentwise larger rows.
    /// Sound only when the final check is monotone in every row entry.
    pub(crate) prune: bool,
    pub(crate) parallel: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct EntryRef {
    pub(crate) group: u32,
    pub(crate) entry: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Back {
    Leaf,
    Child(EntryRef),
    /// The introduced vertex was deleted.
    Deleted(EntryRef),
    Join(EntryRef, EntryRef),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Cell {
    pub(crate) cost: u64,
    pub(crate) back: Back,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Group {
    pub(crate) partition: PartitionKey,
    pub(crate) rows: IndexMap<Box<[i32]>, Cell>,
}

/// The finite cells of one decomposition node, grouped by partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeTable {
    stride: usize,
    pub(crate) groups: Vec<Group>,
    index: HashMap<PartitionKey, usize>,
}

impl NodeTable {
    fn new(stride: usize) -> Self {
        NodeTable { stride, groups: Vec::new(), index: HashMap::new() }
    }

    /// Number of finite cells.
    pub fn len(&self) -> usize {
        self.groups.iter().map(|g| g.rows.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Minimum cost stored for `key`; `None` means infinite.
    pub fn get(&self, key: &DpKey) -> Option<u64> {
        let g = *self.index.get(&key.partition)?;
        self.groups[g].rows.get(key.counts.values()).map(|c| c.cost)
    }

    /// All finite cells in table order.
    pub fn entries(&self) -> impl Iterator<Item = (DpKey, u64)> + '_ {
        self.groups.iter().flat_map(move |g| {
            g.rows.iter().map(move |(row, cell)| {
                let counts = CountTuple::new(self.stride.max(1), row.to_vec()).expect("row shape");
                (DpKey { partition: g.partition.clone(), counts }, cell.cost)
            })
        })
    }

    fn group(&mut self, p: &PartitionKey) -> usize {
        if let Some(&g) = self.index.get(p) {
            return g;
        }
        self.groups.push(Group { partition: p.clone(), rows: IndexMap::new() });
        self.index.insert(p.clone(), self.groups.len() - 1);
        self.groups.len() - 1
    }

    /// Keeps the cheaper cell; on equal cost the earlier one stays.
    fn relax(&mut self, g: usize, row: &[i32], cost: u64, back: Back) {
        let rows = &mut self.groups[g].rows;
        match rows.get_mut(row) {
            Some(cell) => {
                if cost < cell.cost {
                    *cell = Cell { cost, back };
                }
            }
            None => {
                rows.insert(row.into(), Cell { cost, back });
            }
        }
    }

    fn prune_dominated(&mut self) {
        for g in &mut self.groups {
            let mut order: Vec<usize> = (0..g.rows.len()).collect();
            order.sort_by_key(|&i| g.rows[i].cost);
            let mut kept: Vec<usize> = Vec::new();
            let mut keep = vec![false; g.rows.len()];
            for i in order {
                let (row, _) = g.rows.get_index(i).expect("index");
                let beaten = kept.iter().any(|&k| {
                    let (other, _) = g.rows.get_index(k).expect("index");
                    other.iter().zip(row.iter()).all(|(a, b)| a >= b)
                });
                if !beaten {
                    kept.push(i);
                    keep[i] = true;
                }
            }
            let mut i = 0;
            g.rows.retain(|_, _| {
                i += 1;
                keep[i - 1]
            });
        }
    }
}

/// All node tables of one fill, indexed like the decomposition nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpTable {
    pub(crate) nodes: Vec<NodeTable>,
}

impl DpTable {
    pub fn node(&self, t: usize) -> &NodeTable {
        &self.nodes[t]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Total number of finite cells over all nodes.
    pub fn total_cells(&self) -> usize {
        self.nodes.iter().map(NodeTable::len).sum()
    }
}

/// Checks that `ntd` is a valid decomposition of the instance graph pinned at its initiator.
pub(crate) fn check_decomposition(instance: &ControlInstance, ntd: &NiceTreeDecomposition) -> Result<()> {
    if ntd.pinned() != Some(instance.initiator) {
        return Err(Error::NotPinned);
    }
    let report = ntd.validate(&instance.graph);
    if !report.is_ok() {
        return Err(Error::InvalidDecomposition(report.violations));
    }
    Ok(())
}

pub(crate) fn fill(
    instance: &ControlInstance,
    ntd: &NiceTreeDecomposition,
    payload: &Payload,
    limits: Limits,
) -> DpTable {
    let n = ntd.len();
    let mut tables: Vec<Option<NodeTable>> = (0..n).map(|_| None).collect();
    if limits.parallel {
        let mut waiting: Vec<usize> = ntd.nodes().iter().map(|node| node.children.len()).collect();
        let mut ready: Vec<usize> = (0..n).filter(|&t| waiting[t] == 0).collect();
        while !ready.is_empty() {
            let done: Vec<(usize, NodeTable)> =
                ready.par_iter().map(|&t| (t, compute(instance, ntd, payload, limits, t, &tables))).collect();
            ready.clear();
            for (t, table) in done {
                tables[t] = Some(table);
                if let Some(p) = ntd.node(t).parent {
                    waiting[p] -= 1;
                    if waiting[p] == 0 {
                        ready.push(p);
                    }
                }
            }
            ready.sort_unstable();
        }
    } else {
        for t in 0..n {
            tables[t] = Some(compute(instance, ntd, payload, limits, t, &tables));
        }
    }
    DpTable { nodes: tables.into_iter().map(|t| t.expect("every node filled")).collect() }
}

fn entry_ref(g: usize, e: usize) -> EntryRef {
    EntryRef { group: g as u32, entry: e as u32 }
}

fn compute(
    instance: &ControlInstance,
    ntd: &NiceTreeDecomposition,
    payload: &Payload,
    limits: Limits,
    t: usize,
    tables: &[Option<NodeTable>],
) -> NodeTable {
    let stride = payload.stride;
    let node = ntd.node(t);
    let child = |k: usize| tables[node.children[k]].as_ref().expect("children are filled first");
    let within = |cost: u64| limits.cap.is_none_or(|cap| cost <= cap);
    let mut out = NodeTable::new(stride);
    let mut buf = Vec::new();

    match node.kind {
        NodeKind::Leaf => {
            let g = out.group(&PartitionKey::empty());
            out.relax(g, &[], 0, Back::Leaf);
        }
        NodeKind::Introduce(v) => {
            let src = child(0);
            let price = instance.cost(v);
            for (gi, group) in src.groups.iter().enumerate() {
                if v != instance.initiator {
                    let g = out.group(&group.partition);
                    for (ei, (row, cell)) in group.rows.iter().enumerate() {
                        let cost = cell.cost + price;
                        if within(cost) {
                            out.relax(g, row, cost, Back::Deleted(entry_ref(gi, ei)));
                        }
                    }
                }
                let (partition, map) = introduce_map(&group.partition, v, payload.unit(v));
                let g = out.group(&partition);
                for (ei, (row, cell)) in group.rows.iter().enumerate() {
                    map.apply(stride, row, &mut buf);
                    out.relax(g, &buf, cell.cost, Back::Child(entry_ref(gi, ei)));
                }
            }
        }
        NodeKind::IntroduceEdge(a, b) => unary(&mut out, child(0), stride, &mut buf, |p| merge_map(p, a, b, stride)),
        NodeKind::Forget(v) => unary(&mut out, child(0), stride, &mut buf, |p| forget_map(p, v, stride)),
        NodeKind::Join => join(instance, payload, limits, &node.bag, child(0), child(1), &mut out),
    }
    out.groups.retain(|g| !g.rows.is_empty());
    out.index = out.groups.iter().enumerate().map(|(i, g)| (g.partition.clone(), i)).collect();
    if limits.prune {
        out.prune_dominated();
    }
    out
}

/// Applies a partition-level transition to every row of every child group.
fn unary(
    out: &mut NodeTable,
    src: &NodeTable,
    stride: usize,
    buf: &mut Vec<i32>,
    step: impl Fn(&PartitionKey) -> Option<(PartitionKey, RowMap)>,
) {
    for (gi, group) in src.groups.iter().enumerate() {
        match step(&group.partition) {
            None => {
                let g = out.group(&group.partition);
                for (ei, (row, cell)) in group.rows.iter().enumerate() {
                    out.relax(g, row, cell.cost, Back::Child(entry_ref(gi, ei)));
                }
            }
            Some((partition, map)) => {
                let g = out.group(&partition);
                for (ei, (row, cell)) in group.rows.iter().enumerate() {
                    map.apply(stride, row, buf);
                    out.relax(g, buf, cell.cost, Back::Child(entry_ref(gi, ei)));
                }
            }
        }
    }
}

fn join(
    instance: &ControlInstance,
    payload: &Payload,
    limits: Limits,
    bag: &[Voter],
    left: &NodeTable,
    right: &NodeTable,
    out: &mut NodeTable,
) {
    let stride = payload.stride;
    let mut by_cover: HashMap<Vec<Voter>, Vec<usize>> = HashMap::new();
    for (gi, g) in right.groups.iter().enumerate() {
        by_cover.entry(g.partition.covered()).or_default().push(gi);
    }
    let mut buf = Vec::new();
    for (g1, left_group) in left.groups.iter().enumerate() {
        let covered = left_group.partition.covered();
        let Some(partners) = by_cover.get(&covered) else { continue };
        // bag vertices outside every part are deleted on both sides
        let shared: u64 = bag.iter().filter(|v| covered.binary_search(v).is_err()).map(|&v| instance.cost(v)).sum();
        for &g2 in partners {
            let right_group = &right.groups[g2];
            let (joined, map1, map2) =
                join_map(&left_group.partition, &right_group.partition).expect("same covered set");
            let mut offset = vec![0; joined.num_parts() * stride];
            for (k, part) in joined.parts().iter().enumerate() {
                for &w in part {
                    for (d, u) in offset[k * stride..(k + 1) * stride].iter_mut().zip(payload.unit(w)) {
                        *d -= u;
                    }
                }
            }
            let g = out.group(&joined);
            for (e1, (mu, c1)) in left_group.rows.iter().enumerate() {
                for (e2, (nu, c2)) in right_group.rows.iter().enumerate() {
                    let cost = c1.cost + c2.cost - shared;
                    if limits.cap.is_some_and(|cap| cost > cap) {
                        continue;
                    }
                    buf.clear();
                    buf.extend_from_slice(&offset);
                    for (i, &k) in map1.iter().enumerate() {
                        for s in 0..stride {
                            buf[k * stride + s] += mu[i * stride + s];
                        }
                    }
                    for (i, &k) in map2.iter().enumerate() {
                        for s in 0..stride {
                            buf[k * stride + s] += nu[i * stride + s];
                        }
                    }
                    out.relax(g, &buf, cost, Back::Join(entry_ref(g1, e1), entry_ref(g2, e2)));
                }
            }
        }
    }
}

/// Cheapest root cell whose row satisfies `accept`, with its cost.
pub(crate) fn best_root(table: &DpTable, accept: impl Fn(&[i32]) -> bool) -> Option<(EntryRef, u64)> {
    let root = table.nodes.last()?;
    let mut best: Option<(EntryRef, u64)> = None;
    for (gi, group) in root.groups.iter().enumerate() {
        for (ei, (row, cell)) in group.rows.iter().enumerate() {
            if accept(row) && best.is_none_or(|(_, c)| cell.cost < c) {
                best = Some((entry_ref(gi, ei), cell.cost));
            }
        }
    }
    best
}

/// Every root cell whose row satisfies `accept`, in table order.
pub(crate) fn root_entries(table: &DpTable, accept: impl Fn(&[i32]) -> bool) -> Vec<(u64, EntryRef)> {
    let Some(root) = table.nodes.last() else { return Vec::new() };
    let mut out = Vec::new();
    for (gi, group) in root.groups.iter().enumerate() {
        for (ei, (row, cell)) in group.rows.iter().enumerate() {
            if accept(row) {
                out.push((cell.cost, entry_ref(gi, ei)));
            }
        }
    }
    out
}

/// Replays backpointers from a root cell and collects the deleted voters.
pub(crate) fn extract(ntd: &NiceTreeDecomposition, table: &DpTable, root: EntryRef) -> BTreeSet<Voter> {
    let mut deleted = BTreeSet::new();
    let mut stack = vec![(ntd.root(), root)];
    while let Some((t, r)) = stack.pop() {
        let node = ntd.node(t);
        let cell = table.nodes[t].groups[r.group as usize].rows[r.entry as usize];
        match cell.back {
            Back::Leaf => {}
            Back::Child(c) => stack.push((node.children[0], c)),
            Back::Deleted(c) => {
                if let NodeKind::Introduce(v) = node.kind {
                    deleted.insert(v);
                }
                stack.push((node.children[0], c));
            }
            Back::Join(a, b) => {
                stack.push((node.children[0], a));
                stack.push((node.children[1], b));
            }
        }
    }
    deleted
}

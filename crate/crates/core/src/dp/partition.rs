//! Keys of the DP tables and the per-node transition kernels on them.

use std::fmt;

use crate::election::Voter;
use crate::error::{Error, Result};

/// A partition of a subset of a bag into nonempty parts.
///
/// Canonical form: every part sorted, parts ordered by their smallest element.
/// The empty partition (no parts) stands for "nothing of the bag survives".
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PartitionKey {
    parts: Vec<Vec<Voter>>,
}

impl PartitionKey {
    /// Canonicalizes `parts`; rejects empty or overlapping parts.
    pub fn new(parts: Vec<Vec<Voter>>) -> Result<Self> {
        let mut parts: Vec<Vec<Voter>> = parts
            .into_iter()
            .map(|mut p| {
                p.sort_unstable();
                p
            })
            .collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::InvalidInput("partition has an empty part".into()));
        }
        let mut all: Vec<Voter> = parts.iter().flatten().copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("partition parts overlap".into()));
        }
        parts.sort_unstable_by_key(|p| p[0]);
        Ok(PartitionKey { parts })
    }

    pub fn empty() -> Self {
        PartitionKey::default()
    }

    pub fn singleton(v: Voter) -> Self {
        PartitionKey { parts: vec![vec![v]] }
    }

    pub fn parts(&self) -> &[Vec<Voter>] {
        &self.parts
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part_of(&self, v: Voter) -> Option<usize> {
        self.parts.iter().position(|p| p.binary_search(&v).is_ok())
    }

    /// Sorted union of the parts.
    pub fn covered(&self) -> Vec<Voter> {
        let mut all: Vec<Voter> = self.parts.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }
}

impl fmt::Display for PartitionKey {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("⊥");
        }
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| format!("{{{}}}", p.iter().map(|v| v.0.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// One row of `stride` integers per part, stored flat.
///
/// For the constructive table a row holds per-candidate vote counts; for the
/// rival-versus-target table `stride` is 1 and the value is a vote difference.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CountTuple {
    stride: usize,
    values: Vec<i32>,
}

/// Per-part signed differences (`stride == 1`).
pub type DiffTuple = CountTuple;

impl CountTuple {
    pub fn new(stride: usize, values: Vec<i32>) -> Result<Self> {
        if stride == 0 || !values.len().is_multiple_of(stride) {
            return Err(Error::InvalidInput(format!("{} values do not split into rows of {stride}", values.len())));
        }
        Ok(CountTuple { stride, values })
    }

    pub fn from_rows(stride: usize, rows: &[&[i32]]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != stride) {
            return Err(Error::InvalidInput(format!("every row must have {stride} entries")));
        }
        CountTuple::new(stride, rows.concat())
    }

    pub fn empty(stride: usize) -> Self {
        CountTuple { stride, values: Vec::new() }
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn num_rows(&self) -> usize {
        self.values.len() / self.stride
    }

    pub fn row(&self, i: usize) -> &[i32] {
        &self.values[i * self.stride..(i + 1) * self.stride]
    }
}

/// A table key: partition plus one count row per part.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DpKey {
    pub partition: PartitionKey,
    pub counts: CountTuple,
}

impl DpKey {
    pub fn new(partition: PartitionKey, counts: CountTuple) -> Result<Self> {
        if partition.num_parts() != counts.num_rows() {
            return Err(Error::InvalidInput(format!(
                "{} parts but {} count rows",
                partition.num_parts(),
                counts.num_rows()
            )));
        }
        Ok(DpKey { partition, counts })
    }
}

/// How each output part is assembled: the sum of the listed input rows plus a
/// constant offset row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RowMap {
    pub(crate) sources: Vec<Vec<usize>>,
    pub(crate) offset: Vec<i32>,
}

impl RowMap {
    pub(crate) fn apply(&self, stride: usize, input: &[i32], out: &mut Vec<i32>) {
        out.clear();
        out.extend_from_slice(&self.offset);
        for (k, src) in self.sources.iter().enumerate() {
            let dst = &mut out[k * stride..(k + 1) * stride];
            for &i in src {
                for (d, s) in dst.iter_mut().zip(&input[i * stride..(i + 1) * stride]) {
                    *d += s;
                }
            }
        }
    }
}

/// Reorders `parts` canonically, returning the new order as indices into the input.
fn canonicalize(parts: Vec<Vec<Voter>>) -> (PartitionKey, Vec<usize>) {
    let mut idx: Vec<usize> = (0..parts.len()).collect();
    idx.sort_unstable_by_key(|&i| parts[i][0]);
    let sorted = idx.iter().map(|&i| parts[i].clone()).collect();
    (PartitionKey { parts: sorted }, idx)
}

/// Adds `{v}` as a new part whose row is `unit`.
pub(crate) fn introduce_map(p: &PartitionKey, v: Voter, unit: &[i32]) -> (PartitionKey, RowMap) {
    let stride = unit.len();
    let pos = p.parts.iter().position(|part| part[0] > v).unwrap_or(p.parts.len());
    let mut parts = p.parts.clone();
    parts.insert(pos, vec![v]);
    let mut sources: Vec<Vec<usize>> = (0..p.parts.len()).map(|i| vec![i]).collect();
    sources.insert(pos, Vec::new());
    let mut offset = vec![0; parts.len() * stride];
    offset[pos * stride..(pos + 1) * stride].copy_from_slice(unit);
    (PartitionKey { parts }, RowMap { sources, offset })
}

/// Unions the parts holding `u` and `v` if they differ; `None` means identity.
pub(crate) fn merge_map(p: &PartitionKey, u: Voter, v: Voter, stride: usize) -> Option<(PartitionKey, RowMap)> {
    let (a, b) = (p.part_of(u)?, p.part_of(v)?);
    if a == b {
        return None;
    }
    let (i, j) = (a.min(b), a.max(b));
    let mut parts = p.parts.clone();
    let moved = parts.remove(j);
    parts[i].extend(moved);
    parts[i].sort_unstable();
    // the union keeps the smaller minimum, so it stays at position i
    let mut sources: Vec<Vec<usize>> = (0..p.parts.len()).filter(|&k| k != j).map(|k| vec![k]).collect();
    sources[i].push(j);
    let offset = vec![0; parts.len() * stride];
    Some((PartitionKey { parts }, RowMap { sources, offset }))
}

/// Removes `v` from the partition. A part that was exactly `{v}` disappears
/// together with its row. `None` when `v` is in no part (identity).
pub(crate) fn forget_map(p: &PartitionKey, v: Voter, stride: usize) -> Option<(PartitionKey, RowMap)> {
    let i = p.part_of(v)?;
    let mut parts = p.parts.clone();
    let mut origin: Vec<usize> = (0..parts.len()).collect();
    if parts[i].len() == 1 {
        parts.remove(i);
        origin.remove(i);
    } else {
        parts[i].retain(|&w| w != v);
    }
    let (key, order) = canonicalize(parts);
    let sources = order.iter().map(|&k| vec![origin[k]]).collect();
    let offset = vec![0; key.parts.len() * stride];
    Some((key, RowMap { sources, offset }))
}

/// Joined partition of two partitions over the same covered set, with the
/// index of the joined part each input part falls into.
pub(crate) fn join_map(p1: &PartitionKey, p2: &PartitionKey) -> Result<(PartitionKey, Vec<usize>, Vec<usize>)> {
    let covered = p1.covered();
    if covered != p2.covered() {
        return Err(Error::InvalidInput(format!("join of {p1} and {p2}: covered vertex sets differ")));
    }
    // union-find over positions in `covered`
    let pos = |v: Voter| covered.binary_search(&v).expect("covered vertex");
    let mut root: Vec<usize> = (0..covered.len()).collect();
    fn find(root: &mut [usize], mut a: usize) -> usize {
        while root[a] != a {
            root[a] = root[root[a]];
            a = root[a];
        }
        a
    }
    for part in p1.parts.iter().chain(&p2.parts) {
        let first = pos(part[0]);
        for &w in &part[1..] {
            let (ra, rb) = (find(&mut root, first), find(&mut root, pos(w)));
            if ra != rb {
                root[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut parts: Vec<Vec<Voter>> = Vec::new();
    let mut part_of_root = vec![usize::MAX; covered.len()];
    for (k, &v) in covered.iter().enumerate() {
        let r = find(&mut root, k);
        if part_of_root[r] == usize::MAX {
            part_of_root[r] = parts.len();
            parts.push(Vec::new());
        }
        parts[part_of_root[r]].push(v);
    }
    // scanning `covered` in order already yields canonical part order
    let key = PartitionKey { parts };
    let map1 = p1.parts.iter().map(|p| key.part_of(p[0]).expect("joined")).collect();
    let map2 = p2.parts.iter().map(|p| key.part_of(p[0]).expect("joined")).collect();
    Ok((key, map1, map2))
}

/// Applies an introduce-edge node: the parts of `u` and `v` are united and
/// their rows added. Identity when either endpoint is in no part or both share one.
pub fn merge_edge(key: &DpKey, u: Voter, v: Voter) -> DpKey {
    let stride = key.counts.stride;
    match merge_map(&key.partition, u, v, stride) {
        None => key.clone(),
        Some((partition, map)) => {
            let mut values = Vec::new();
            map.apply(stride, &key.counts.values, &mut values);
            DpKey { partition, counts: CountTuple { stride, values } }
        }
    }
}

/// Forward image of a child key under forgetting `v`.
pub fn forget_image(key: &DpKey, v: Voter) -> DpKey {
    let stride = key.counts.stride;
    match forget_map(&key.partition, v, stride) {
        None => key.clone(),
        Some((partition, map)) => {
            let mut values = Vec::new();
            map.apply(stride, &key.counts.values, &mut values);
            DpKey { partition, counts: CountTuple { stride, values } }
        }
    }
}

/// Which way a child key relates to the key at a forget node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForgetCase {
    /// `v` was already in no part.
    Unchanged,
    /// `v` sat in the given part (index into the child partition).
    AddedTo(usize),
    /// `v` formed its own part; that component is complete and is dropped.
    OwnPart,
}

/// A family of child keys at a forget node.
///
/// For [`ForgetCase::OwnPart`] the row of the `{v}` part is unconstrained: the
/// component may contain any number of already-forgotten voters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predecessor {
    pub partition: PartitionKey,
    /// Rows of the child key; for `OwnPart` the `{v}` row is left out.
    pub counts: CountTuple,
    pub forgotten: Voter,
    pub case: ForgetCase,
}

impl Predecessor {
    /// Does this family contain `child`?
    pub fn admits(&self, child: &DpKey) -> bool {
        if child.partition != self.partition || child.counts.stride != self.counts.stride {
            return false;
        }
        match self.case {
            ForgetCase::Unchanged | ForgetCase::AddedTo(_) => child.counts == self.counts,
            ForgetCase::OwnPart => {
                let Some(free) = self.partition.part_of(self.forgotten) else { return false };
                let s = self.counts.stride;
                let mut kept = child.counts.values.clone();
                kept.drain(free * s..(free + 1) * s);
                kept == self.counts.values
            }
        }
    }
}

/// Child keys consistent with `key` at a node forgetting `v`: the key itself,
/// `v` added to each existing part, and `v` as an extra singleton part.
pub fn consistent_predecessors(key: &DpKey, v: Voter) -> Result<Vec<Predecessor>> {
    if key.partition.part_of(v).is_some() {
        return Err(Error::InvalidInput(format!("forgotten vertex {} is still in {}", v.0, key.partition)));
    }
    let mut out = vec![Predecessor {
        partition: key.partition.clone(),
        counts: key.counts.clone(),
        forgotten: v,
        case: ForgetCase::Unchanged,
    }];
    let stride = key.counts.stride;
    for i in 0..key.partition.num_parts() {
        let mut parts = key.partition.parts.clone();
        parts[i].push(v);
        parts[i].sort_unstable();
        let (partition, order) = canonicalize(parts);
        let values = order.iter().flat_map(|&k| key.counts.row(k).iter().copied()).collect();
        let case = ForgetCase::AddedTo(order.iter().position(|&k| k == i).expect("moved part"));
        out.push(Predecessor { partition, counts: CountTuple { stride, values }, forgotten: v, case });
    }
    let mut parts = key.partition.parts.clone();
    parts.push(vec![v]);
    let (partition, _) = canonicalize(parts);
    out.push(Predecessor { partition, counts: key.counts.clone(), forgotten: v, case: ForgetCase::OwnPart });
    Ok(out)
}

/// Partition whose parts are the connected components of the graph linking
/// vertices that share a part in `p1` or in `p2`.
pub fn join_partitions(p1: &PartitionKey, p2: &PartitionKey) -> Result<PartitionKey> {
    join_map(p1, p2).map(|(key, _, _)| key)
}

/// Rows of the joined key: each joined part sums the child rows it absorbs and
/// subtracts `unit(w)` for every bag vertex `w` in it, since those were
/// counted by both children.
pub fn join_counts(
    mu: &CountTuple,
    nu: &CountTuple,
    p1: &PartitionKey,
    p2: &PartitionKey,
    unit: impl Fn(Voter) -> Vec<i32>,
) -> Result<DpKey> {
    let (joined, map1, map2) = join_map(p1, p2)?;
    let stride = mu.stride;
    if nu.stride != stride || mu.num_rows() != p1.num_parts() || nu.num_rows() != p2.num_parts() {
        return Err(Error::InvalidInput("count rows do not match the partitions".into()));
    }
    let mut values = vec![0; joined.num_parts() * stride];
    for (k, part) in joined.parts.iter().enumerate() {
        for &w in part {
            for (d, u) in values[k * stride..(k + 1) * stride].iter_mut().zip(unit(w)) {
                *d -= u;
            }
        }
    }
    for (counts, map) in [(mu, &map1), (nu, &map2)] {
        for (i, &k) in map.iter().enumerate() {
            for (d, s) in values[k * stride..(k + 1) * stride].iter_mut().zip(counts.row(i)) {
                *d += s;
            }
        }
    }
    Ok(DpKey { partition: joined, counts: CountTuple { stride, values } })
}

//! Text formats for instances, decompositions, witnesses and X3C inputs.
//!
//! Instance documents are line based; `#` starts a comment:
//!
//! ```text
//! candidates a b
//! voter x a 0
//! voter y b 1
//! edge x y
//! initiator x
//! target a
//! budget 1
//! ```
//!
//! Ids are arbitrary tokens without whitespace or `:`. [`write_instance`]
//! emits the canonical form (the order above, edges in graph order), which
//! [`parse_instance`] reads back to an identical instance.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::election::{Budget, Candidate, ControlInstance, Election, Voter, VoterGraph};
use crate::reductions::X3CInstance;
use crate::treedecomp::{NiceTreeDecomposition, NodeKind, TreeDecomposition};

/// Where a document went wrong. `line` is 1-based; `None` means the problem
/// concerns the document as a whole (a missing line, say).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}{kind}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct FormatError {
    pub line: Option<usize>,
    pub kind: FormatErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown reference `{0}`")]
    UnknownReference(String),
    #[error("negative cost `{0}`")]
    NegativeCost(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{0}`-`{1}`")]
    DuplicateEdge(String, String),
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error("repeated `{0}` line")]
    Repeated(&'static str),
    #[error("{0}")]
    Invalid(String),
}

fn err(line: usize, kind: FormatErrorKind) -> FormatError {
    FormatError { line: Some(line), kind }
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    err(line, FormatErrorKind::Syntax(msg.into()))
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = l.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn check_id(line: usize, id: &str) -> Result<(), FormatError> {
    if id.contains(':') {
        return Err(syntax(line, format!("id `{id}` contains `:`")));
    }
    Ok(())
}

fn set_once<T>(slot: &mut Option<(usize, T)>, line: usize, value: T, name: &'static str) -> Result<(), FormatError> {
    if slot.is_some() {
        return Err(err(line, FormatErrorKind::Repeated(name)));
    }
    *slot = Some((line, value));
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<ControlInstance, FormatError> {
    let mut candidates: Option<(usize, Vec<String>)> = None;
    let mut voters: Vec<(usize, String, String, u64)> = Vec::new();
    let mut edges: Vec<(usize, String, String)> = Vec::new();
    let mut initiator: Option<(usize, String)> = None;
    let mut target: Option<(usize, String)> = None;
    let mut budget: Option<(usize, Budget)> = None;

    for (ln, tok) in lines(text) {
        match (tok[0], tok.len()) {
            ("candidates", k) if k >= 2 => {
                let names: Vec<String> = tok[1..].iter().map(|s| s.to_string()).collect();
                for n in &names {
                    check_id(ln, n)?;
                }
                set_once(&mut candidates, ln, names, "candidates")?;
            }
            ("voter", 4) => {
                check_id(ln, tok[1])?;
                let cost = match tok[3].parse::<u64>() {
                    Ok(c) => c,
                    Err(_) if tok[3].parse::<i64>().is_ok() => {
                        return Err(err(ln, FormatErrorKind::NegativeCost(tok[3].into())))
                    }
                    Err(_) => return Err(syntax(ln, format!("bad cost `{}`", tok[3]))),
                };
                voters.push((ln, tok[1].into(), tok[2].into(), cost));
            }
            ("edge", 3) => edges.push((ln, tok[1].into(), tok[2].into())),
            ("initiator", 2) => set_once(&mut initiator, ln, tok[1].to_string(), "initiator")?,
            ("target", 2) => set_once(&mut target, ln, tok[1].to_string(), "target")?,
            ("budget", 2) => {
                let b = match tok[1] {
                    "inf" => Budget::Infinite,
                    s => match s.parse::<u64>() {
                        Ok(b) => Budget::Finite(b),
                        Err(_) => return Err(syntax(ln, format!("bad budget `{s}`"))),
                    },
                };
                set_once(&mut budget, ln, b, "budget")?;
            }
            (kw @ ("candidates" | "voter" | "edge" | "initiator" | "target" | "budget"), _) => {
                return Err(syntax(ln, format!("wrong number of fields for `{kw}`")))
            }
            (kw, _) => return Err(syntax(ln, format!("unknown keyword `{kw}`"))),
        }
    }

    let missing = |name| FormatError { line: None, kind: FormatErrorKind::Missing(name) };
    let (cand_line, cand_names) = candidates.ok_or(missing("candidates"))?;
    let mut cand_index = HashMap::new();
    for (i, c) in cand_names.iter().enumerate() {
        if cand_index.insert(c.as_str(), Candidate(i as u32)).is_some() {
            return Err(err(cand_line, FormatErrorKind::DuplicateId(c.clone())));
        }
    }
    if voters.is_empty() {
        return Err(missing("voter"));
    }
    let mut voter_index = HashMap::new();
    let mut votes = Vec::new();
    let mut costs = Vec::new();
    for (i, (ln, id, vote, cost)) in voters.iter().enumerate() {
        if voter_index.insert(id.as_str(), Voter(i as u32)).is_some() {
            return Err(err(*ln, FormatErrorKind::DuplicateId(id.clone())));
        }
        let c =
            *cand_index.get(vote.as_str()).ok_or_else(|| err(*ln, FormatErrorKind::UnknownReference(vote.clone())))?;
        votes.push(c);
        costs.push(*cost);
    }
    let voter = |ln: usize, id: &str| {
        voter_index.get(id).copied().ok_or_else(|| err(ln, FormatErrorKind::UnknownReference(id.to_string())))
    };
    let mut edge_list = Vec::new();
    let mut seen = BTreeSet::new();
    for (ln, a, b) in &edges {
        let (va, vb) = (voter(*ln, a)?, voter(*ln, b)?);
        if va == vb {
            return Err(err(*ln, FormatErrorKind::SelfLoop(a.clone())));
        }
        if !seen.insert((va.min(vb), va.max(vb))) {
            return Err(err(*ln, FormatErrorKind::DuplicateEdge(a.clone(), b.clone())));
        }
        edge_list.push((va, vb));
    }
    let (iln, init) = initiator.ok_or(missing("initiator"))?;
    let x = voter(iln, &init)?;
    let (tln, tgt) = target.ok_or(missing("target"))?;
    let t = *cand_index.get(tgt.as_str()).ok_or_else(|| err(tln, FormatErrorKind::UnknownReference(tgt.clone())))?;
    let (_, budget) = budget.ok_or(missing("budget"))?;

    let invalid = |e: crate::Error| FormatError { line: None, kind: FormatErrorKind::Invalid(e.to_string()) };
    let names = voters.into_iter().map(|(_, id, _, _)| id).collect();
    let election = Election::new(cand_names, names, votes).map_err(invalid)?;
    let graph = VoterGraph::new(election.num_voters(), edge_list).map_err(invalid)?;
    ControlInstance::new(election, graph, t, x, costs, budget).map_err(invalid)
}

/// Canonical document for `instance`.
pub fn write_instance(instance: &ControlInstance) -> String {
    let e = &instance.election;
    let mut out = String::new();
    writeln!(out, "candidates {}", e.candidate_names().join(" ")).unwrap();
    for v in e.voters() {
        writeln!(out, "voter {} {} {}", e.voter_name(v), e.candidate_name(e.vote(v)), instance.cost(v)).unwrap();
    }
    for &(a, b) in instance.graph.edges() {
        writeln!(out, "edge {} {}", e.voter_name(a), e.voter_name(b)).unwrap();
    }
    writeln!(out, "initiator {}", e.voter_name(instance.initiator)).unwrap();
    writeln!(out, "target {}", e.candidate_name(instance.target)).unwrap();
    writeln!(out, "budget {}", instance.budget).unwrap();
    out
}

/// Deleted voters, one id per line, in voter order.
pub fn write_witness(deleted: &BTreeSet<Voter>, election: &Election) -> String {
    deleted.iter().map(|&v| format!("{}\n", election.voter_name(v))).collect()
}

pub fn parse_witness(text: &str, election: &Election) -> Result<BTreeSet<Voter>, FormatError> {
    let mut out = BTreeSet::new();
    for (ln, tok) in lines(text) {
        if tok.len() != 1 {
            return Err(syntax(ln, "expected one voter id per line"));
        }
        let v = election.find_voter(tok[0]).ok_or_else(|| err(ln, FormatErrorKind::UnknownReference(tok[0].into())))?;
        if !out.insert(v) {
            return Err(err(ln, FormatErrorKind::DuplicateId(tok[0].into())));
        }
    }
    Ok(out)
}

fn kind_token(kind: NodeKind, e: &Election) -> String {
    match kind {
        NodeKind::Leaf => "leaf".into(),
        NodeKind::Introduce(v) => format!("introduce:{}", e.voter_name(v)),
        NodeKind::IntroduceEdge(a, b) => format!("introduce-edge:{}:{}", e.voter_name(a), e.voter_name(b)),
        NodeKind::Forget(v) => format!("forget:{}", e.voter_name(v)),
        NodeKind::Join => "join".into(),
    }
}

fn node_line(out: &mut String, id: usize, kind: &str, parent: Option<usize>, bag: &[Voter], e: &Election) {
    let parent = parent.map_or("-".to_string(), |p| p.to_string());
    write!(out, "{id} {kind} {parent} :").unwrap();
    for &v in bag {
        write!(out, " {}", e.voter_name(v)).unwrap();
    }
    out.push('\n');
}

/// One node per line: `id kind parent : bag`, with `-` as the root's parent.
pub fn write_td(td: &TreeDecomposition, election: &Election) -> String {
    let mut out = String::new();
    for i in 0..td.len() {
        node_line(&mut out, i, "bag", td.parent(i), td.bag(i), election);
    }
    out
}

/// Like [`write_td`] with node kinds, preceded by `pinned <id>` when pinned.
pub fn write_nice_td(ntd: &NiceTreeDecomposition, election: &Election) -> String {
    let mut out = String::new();
    if let Some(x) = ntd.pinned() {
        writeln!(out, "pinned {}", election.voter_name(x)).unwrap();
    }
    for (i, node) in ntd.nodes().iter().enumerate() {
        node_line(&mut out, i, &kind_token(node.kind, election), node.parent, &node.bag, election);
    }
    out
}

/// Reads either format as a plain decomposition. Node kinds and a `pinned`
/// line are accepted but not trusted; callers rebuild the nice form.
pub fn parse_td(text: &str, election: &Election) -> Result<TreeDecomposition, FormatError> {
    let mut nodes: Vec<(usize, usize, Option<usize>, Vec<Voter>)> = Vec::new();
    let voter = |ln: usize, id: &str| {
        election.find_voter(id).ok_or_else(|| err(ln, FormatErrorKind::UnknownReference(id.to_string())))
    };
    for (ln, tok) in lines(text) {
        if tok[0] == "pinned" {
            if tok.len() != 2 {
                return Err(syntax(ln, "expected `pinned <voter>`"));
            }
            voter(ln, tok[1])?;
            continue;
        }
        if tok.len() < 4 || tok[3] != ":" {
            return Err(syntax(ln, "expected `<id> <kind> <parent|-> : <bag>`"));
        }
        let id: usize = tok[0].parse().map_err(|_| syntax(ln, format!("bad node id `{}`", tok[0])))?;
        let mut parts = tok[1].split(':');
        let kind = parts.next().unwrap_or("");
        let refs: Vec<&str> = parts.collect();
        let arity = match kind {
            "bag" | "leaf" | "join" => 0,
            "introduce" | "forget" => 1,
            "introduce-edge" => 2,
            other => return Err(syntax(ln, format!("unknown node kind `{other}`"))),
        };
        if refs.len() != arity {
            return Err(syntax(ln, format!("node kind `{kind}` takes {arity} voter(s)")));
        }
        for r in refs {
            voter(ln, r)?;
        }
        let parent = match tok[2] {
            "-" => None,
            p => Some(p.parse().map_err(|_| syntax(ln, format!("bad parent `{p}`")))?),
        };
        let bag = tok[4..].iter().map(|id| voter(ln, id)).collect::<Result<Vec<_>, _>>()?;
        nodes.push((ln, id, parent, bag));
    }
    if nodes.is_empty() {
        return Err(FormatError { line: None, kind: FormatErrorKind::Missing("node") });
    }
    let k = nodes.len();
    let mut bags = vec![None; k];
    let mut parents = vec![None; k];
    for (ln, id, parent, bag) in nodes {
        if id >= k {
            return Err(syntax(ln, format!("node ids must be 0..{}", k - 1)));
        }
        if bags[id].is_some() {
            return Err(err(ln, FormatErrorKind::DuplicateId(id.to_string())));
        }
        if let Some(p) = parent.filter(|&p| p >= k) {
            return Err(err(ln, FormatErrorKind::UnknownReference(p.to_string())));
        }
        bags[id] = Some(bag);
        parents[id] = parent;
    }
    Ok(TreeDecomposition::new(bags.into_iter().map(|b| b.expect("all ids seen")).collect(), parents))
}

/// First line `ℓ`, then one line of three elements per set.
pub fn write_x3c(x3c: &X3CInstance) -> String {
    let mut out = format!("{}\n", x3c.ell());
    for s in x3c.sets() {
        writeln!(out, "{} {} {}", s[0], s[1], s[2]).unwrap();
    }
    out
}

pub fn parse_x3c(text: &str) -> Result<X3CInstance, FormatError> {
    let mut it = lines(text);
    let (ln, tok) = it.next().ok_or(FormatError { line: None, kind: FormatErrorKind::Missing("ell") })?;
    if tok.len() != 1 {
        return Err(syntax(ln, "first line must hold ℓ alone"));
    }
    let ell: u32 = tok[0].parse().map_err(|_| syntax(ln, format!("bad ℓ `{}`", tok[0])))?;
    let mut sets = Vec::new();
    for (ln, tok) in it {
        if tok.len() != 3 {
            return Err(syntax(ln, "each set needs exactly three elements"));
        }
        let mut s = [0u32; 3];
        for (slot, t) in s.iter_mut().zip(&tok) {
            *slot = t.parse().map_err(|_| syntax(ln, format!("bad element `{t}`")))?;
        }
        sets.push(s);
    }
    X3CInstance::general(ell, sets)
        .map_err(|e| FormatError { line: None, kind: FormatErrorKind::Invalid(e.to_string()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAIR: &str = "candidates a b\nvoter x a 0\nvoter y b 1\nedge x y\ninitiator x\ntarget a\nbudget 1\n";

    #[test]
    fn round_trip() {
        let inst = parse_instance(PAIR).unwrap();
        assert_eq!(write_instance(&inst), PAIR);
        assert_eq!(inst.budget, Budget::Finite(1));
    }

    #[test]
    fn minimal_and_infinite() {
        let inst = parse_instance("candidates a\nvoter x a 3\ninitiator x\ntarget a\nbudget inf # no limit\n").unwrap();
        assert_eq!(inst.num_voters(), 1);
        assert_eq!(inst.budget, Budget::Infinite);
    }

    fn kind_of(text: &str) -> (Option<usize>, FormatErrorKind) {
        let e = parse_instance(text).unwrap_err();
        (e.line, e.kind)
    }

    #[test]
    fn distinct_diagnostics() {
        let bad_ref = PAIR.replace("edge x y", "edge x z");
        assert_eq!(kind_of(&bad_ref), (Some(4), FormatErrorKind::UnknownReference("z".into())));
        let dup = PAIR.replace("voter y b 1", "voter x b 1");
        assert_eq!(kind_of(&dup), (Some(3), FormatErrorKind::DuplicateId("x".into())));
        let neg = PAIR.replace("voter y b 1", "voter y b -2");
        assert_eq!(kind_of(&neg), (Some(3), FormatErrorKind::NegativeCost("-2".into())));
        let lp = PAIR.replace("edge x y", "edge y y");
        assert_eq!(kind_of(&lp), (Some(4), FormatErrorKind::SelfLoop("y".into())));
        let de = PAIR.replace("edge x y", "edge x y\nedge y x");
        assert_eq!(kind_of(&de), (Some(5), FormatErrorKind::DuplicateEdge("y".into(), "x".into())));
        let syn = PAIR.replace("budget 1", "budget lots");
        assert!(matches!(kind_of(&syn), (Some(7), FormatErrorKind::Syntax(_))));
        let miss = PAIR.replace("target a\n", "");
        assert_eq!(kind_of(&miss), (None, FormatErrorKind::Missing("target")));
        let rep = PAIR.replace("target a", "target a\ntarget b");
        assert_eq!(kind_of(&rep), (Some(7), FormatErrorKind::Repeated("target")));
    }

    #[test]
    fn witness_and_td_round_trip() {
        let inst = parse_instance(PAIR).unwrap();
        let w = BTreeSet::from([Voter(1)]);
        let text = write_witness(&w, &inst.election);
        assert_eq!(text, "y\n");
        assert_eq!(parse_witness(&text, &inst.election).unwrap(), w);
        let ntd = crate::prepare_decomposition(&inst).unwrap();
        let text = write_nice_td(&ntd, &inst.election);
        assert!(text.starts_with("pinned x\n"));
        let td = parse_td(&text, &inst.election).unwrap();
        assert_eq!(td, ntd.as_tree_decomposition());
        assert_eq!(parse_td(&write_td(&td, &inst.election), &inst.election).unwrap(), td);
    }

    #[test]
    fn x3c_round_trip() {
        let x = parse_x3c("2\n1 2 3\n4 5 6\n1 2 3\n4 5 6\n").unwrap();
        assert_eq!(write_x3c(&x), "2\n1 2 3\n4 5 6\n1 2 3\n4 5 6\n");
        assert!(parse_x3c("1\n1 2\n").is_err());
    }
}

use std::collections::BTreeSet;

use netpoll_core::dp::{can_beat, fill_table, solve_constructive, solve_destructive, CountTuple, DpKey, PartitionKey};
use netpoll_core::format::parse_instance;
use netpoll_core::treedecomp::NodeKind;
use netpoll_core::{prepare_decomposition, Candidate, ControlInstance, Error, Voter};

fn inst(text: &str) -> ControlInstance {
    parse_instance(text).unwrap()
}

const PAIR: &str = "candidates a b\nvoter x a 0\nvoter v b 1\nedge x v\ninitiator x\ntarget a\nbudget 1\n";

fn key(parts: Vec<Vec<u32>>, stride: usize, values: Vec<i32>) -> DpKey {
    let parts = parts.into_iter().map(|p| p.into_iter().map(Voter).collect()).collect();
    DpKey::new(PartitionKey::new(parts).unwrap(), CountTuple::new(stride, values).unwrap()).unwrap()
}

#[test]
fn leaf_and_introduce_cells() {
    let i = inst("candidates a b\nvoter x a 0\nvoter v b 4\nedge x v\ninitiator x\ntarget a\nbudget inf\n");
    let ntd = prepare_decomposition(&i).unwrap();
    let table = fill_table(&i, &ntd).unwrap();
    let leaf = ntd.nodes().iter().position(|n| n.kind == NodeKind::Leaf).unwrap();
    let cells: Vec<_> = table.node(leaf).entries().collect();
    assert_eq!(cells, vec![(key(vec![], 2, vec![]), 0)]);

    let intro_x = ntd.nodes().iter().position(|n| n.kind == NodeKind::Introduce(Voter(0))).unwrap();
    let cells: Vec<_> = table.node(intro_x).entries().collect();
    assert_eq!(cells, vec![(key(vec![vec![0]], 2, vec![1, 0]), 0)]);

    let intro_v = ntd.nodes().iter().position(|n| n.kind == NodeKind::Introduce(Voter(1))).unwrap();
    let t = table.node(intro_v);
    assert_eq!(t.len(), 2);
    assert_eq!(t.get(&key(vec![vec![0]], 2, vec![1, 0])), Some(4));
    assert_eq!(t.get(&key(vec![vec![0], vec![1]], 2, vec![1, 0, 0, 1])), Some(0));
}

#[test]
fn constructive_examples() {
    let i = inst(PAIR);
    let ntd = prepare_decomposition(&i).unwrap();
    let w = solve_constructive(&i, &ntd).unwrap().unwrap();
    assert_eq!(w.deleted, BTreeSet::from([Voter(1)]));
    assert_eq!(w.total_cost, 1);
    let other = i.with_target(Candidate(1)).with_budget(netpoll_core::Budget::Infinite);
    assert!(solve_constructive(&other, &ntd).unwrap().is_none());
}

#[test]
fn can_beat_examples() {
    let two = inst(
        "candidates a b\nvoter x a 0\nvoter p b 1\nvoter q b 1\nedge x p\nedge x q\ninitiator x\ntarget a\nbudget 0\n",
    );
    let ntd = prepare_decomposition(&two).unwrap();
    let w = can_beat(&two, Candidate(1), &ntd).unwrap().unwrap();
    assert!(w.deleted.is_empty());
    assert!(matches!(can_beat(&two, Candidate(0), &ntd), Err(Error::RivalIsTarget(_))));

    let one = inst(&PAIR.replace("budget 1", "budget inf"));
    let ntd = prepare_decomposition(&one).unwrap();
    assert!(can_beat(&one, Candidate(1), &ntd).unwrap().is_none());
}

#[test]
fn single_candidate_destructive_is_no() {
    let i = inst("candidates a\nvoter x a 0\nvoter y a 0\nedge x y\ninitiator x\ntarget a\nbudget inf\n");
    let ntd = prepare_decomposition(&i).unwrap();
    assert!(solve_destructive(&i, &ntd).unwrap().is_none());
}

#[test]
fn unpinned_decomposition_is_rejected() {
    let i = inst(PAIR);
    let plain = netpoll_core::treedecomp::to_nice(&i.graph, &netpoll_core::treedecomp::decompose(&i.graph)).unwrap();
    assert!(matches!(fill_table(&i, &plain), Err(Error::NotPinned)));
    assert!(matches!(solve_constructive(&i, &plain), Err(Error::NotPinned)));
}

#[test]
fn beating_the_target_is_not_enough_with_three_candidates() {
    // b and c tie at 2 ahead of a; nothing can be deleted
    let i = inst(
        "candidates a b c\nvoter x a 0\nvoter b1 b 1\nvoter b2 b 1\nvoter c1 c 1\nvoter c2 c 1\n\
         edge x b1\nedge x b2\nedge x c1\nedge x c2\ninitiator x\ntarget a\nbudget 0\n",
    );
    let ntd = prepare_decomposition(&i).unwrap();
    assert!(can_beat(&i, Candidate(1), &ntd).unwrap().is_some());
    assert!(can_beat(&i, Candidate(2), &ntd).unwrap().is_some());
    assert!(solve_destructive(&i, &ntd).unwrap().is_none());
    let w = solve_destructive(&i.with_budget(netpoll_core::Budget::Finite(1)), &ntd).unwrap().unwrap();
    assert_eq!(w.total_cost, 1);
}

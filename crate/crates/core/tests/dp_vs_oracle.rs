use netpoll_core::dp::{can_beat, solve_constructive, solve_constructive_with, solve_destructive, SolveOptions};
use netpoll_core::oracle::brute_force;
use netpoll_core::random::{random_instance, InstanceParams};
use netpoll_core::{prepare_decomposition, verify_witness, Candidate, ControlInstance, Mode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instances(seed: u64, count: usize, candidates: &[usize], max_n: usize) -> Vec<ControlInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let params = InstanceParams {
                voters: rng.gen_range(1..=max_n),
                candidates: candidates[rng.gen_range(0..candidates.len())],
                edge_prob: rng.gen_range(0.2..0.8),
                ..InstanceParams::default()
            };
            random_instance(&params, &mut rng)
        })
        .collect()
}

#[test]
fn constructive_matches_oracle() {
    for (i, inst) in instances(11, 150, &[1, 2, 3], 9).iter().enumerate() {
        let ntd = prepare_decomposition(inst).unwrap();
        let dp = solve_constructive(inst, &ntd).unwrap();
        let oracle = brute_force(inst, Mode::Constructive, None).unwrap();
        assert_eq!(dp.as_ref().map(|w| w.total_cost), oracle.as_ref().map(|w| w.total_cost), "instance {i}: {inst:?}");
        if let Some(w) = dp {
            assert!(verify_witness(inst, &w, Mode::Constructive).unwrap());
        }
    }
}

#[test]
fn destructive_matches_oracle() {
    for (i, inst) in instances(12, 150, &[1, 2, 3, 4], 9).iter().enumerate() {
        let ntd = prepare_decomposition(inst).unwrap();
        let dp = solve_destructive(inst, &ntd).unwrap();
        let oracle = brute_force(inst, Mode::Destructive, None).unwrap();
        assert_eq!(dp.as_ref().map(|w| w.total_cost), oracle.as_ref().map(|w| w.total_cost), "instance {i}: {inst:?}");
        if let Some(w) = dp {
            assert!(verify_witness(inst, &w, Mode::Destructive).unwrap());
        }
    }
}

#[test]
fn can_beat_is_a_lower_bound() {
    for inst in instances(13, 80, &[3, 4], 8) {
        let ntd = prepare_decomposition(&inst).unwrap();
        let best = solve_destructive(&inst, &ntd).unwrap();
        let bound = (0..inst.num_candidates() as u32)
            .map(Candidate)
            .filter(|&r| r != inst.target)
            .filter_map(|r| can_beat(&inst, r, &ntd).unwrap())
            .map(|w| w.total_cost)
            .min();
        match (best, bound) {
            (Some(b), Some(l)) => assert!(l <= b.total_cost),
            (Some(_), None) => panic!("a unique non-target winner beats the target"),
            _ => {}
        }
    }
}

#[test]
fn parallel_fill_agrees() {
    for inst in instances(14, 40, &[2, 3], 10) {
        let ntd = prepare_decomposition(&inst).unwrap();
        let seq = solve_constructive(&inst, &ntd).unwrap();
        let par = solve_constructive_with(&inst, &ntd, SolveOptions { parallel: true }).unwrap();
        assert_eq!(seq, par);
    }
}

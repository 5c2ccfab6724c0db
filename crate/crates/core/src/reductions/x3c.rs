use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest universe [`solve_x3c`] will search.
pub const MAX_UNIVERSE: u32 = 18;

/// Exact 3-cover input: universe `1..=3ℓ` and a list of 3-element sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct X3CInstance {
    ell: u32,
    /// Each set sorted ascending.
    sets: Vec<[u32; 3]>,
}

impl X3CInstance {
    /// Regular instance: every element lies in exactly two sets (so `m = 2ℓ`).
    pub fn new(ell: u32, sets: Vec<[u32; 3]>) -> Result<Self> {
        let x = X3CInstance::general(ell, sets)?;
        if !x.is_regular() {
            return Err(Error::InvalidX3c("every element must lie in exactly two sets".into()));
        }
        Ok(x)
    }

    /// Any list of 3-element subsets of the universe.
    pub fn general(ell: u32, sets: Vec<[u32; 3]>) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidX3c("ℓ must be positive".into()));
        }
        let mut sorted = Vec::with_capacity(sets.len());
        for mut s in sets {
            s.sort_unstable();
            if s[0] == s[1] || s[1] == s[2] {
                return Err(Error::InvalidX3c(format!("set {s:?} repeats an element")));
            }
            if s[0] < 1 || s[2] > 3 * ell {
                return Err(Error::InvalidX3c(format!("set {s:?} leaves the universe 1..={}", 3 * ell)));
            }
            sorted.push(s);
        }
        Ok(X3CInstance { ell, sets: sorted })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn universe_size(&self) -> u32 {
        3 * self.ell
    }

    pub fn sets(&self) -> &[[u32; 3]] {
        &self.sets
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn is_regular(&self) -> bool {
        let mut degree = vec![0u32; self.universe_size() as usize + 1];
        for s in &self.sets {
            for &e in s {
                degree[e as usize] += 1;
            }
        }
        degree[1..].iter().all(|&d| d == 2)
    }

    /// Do the indexed sets partition the universe?
    pub fn is_cover(&self, cover: &[usize]) -> bool {
        if cover.len() != self.ell as usize || cover.iter().any(|&i| i >= self.sets.len()) {
            return false;
        }
        let mut seen = vec![false; self.universe_size() as usize + 1];
        for &i in cover {
            for &e in &self.sets[i] {
                if std::mem::replace(&mut seen[e as usize], true) {
                    return false;
                }
            }
        }
        let mut distinct = cover.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        distinct.len() == cover.len()
    }
}

/// Lexicographically first exact cover (sorted set indices), if any.
pub fn solve_x3c(x3c: &X3CInstance) -> Result<Option<Vec<usize>>> {
    if x3c.universe_size() > MAX_UNIVERSE {
        return Err(Error::TooLarge { size: x3c.universe_size() as usize, limit: MAX_UNIVERSE as usize });
    }
    let masks: Vec<u32> = x3c.sets.iter().map(|s| s.iter().fold(0, |m, &e| m | 1 << e)).collect();
    let full: u32 = (1..=x3c.universe_size()).fold(0, |m, e| m | 1 << e);
    fn search(masks: &[u32], full: u32, from: usize, used: u32, chosen: &mut Vec<usize>) -> bool {
        if used == full {
            return true;
        }
        for i in from..masks.len() {
            if masks[i] & used == 0 {
                chosen.push(i);
                if search(masks, full, i + 1, used | masks[i], chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    Ok(search(&masks, full, 0, 0, &mut chosen).then_some(chosen))
}

/// Random regular instance. `planted` stacks two random partitions of the
/// universe into triples (so a cover exists); otherwise each element gets two
/// slots, the slots are shuffled and cut into triples, and shuffles producing
/// a triple with a repeated element are redrawn.
pub fn gen_x3c(ell: u32, seed: u64, planted: bool) -> X3CInstance {
    assert!(ell >= 1, "ℓ must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let universe: Vec<u32> = (1..=3 * ell).collect();
    let sets = if planted {
        let mut sets = Vec::new();
        for _ in 0..2 {
            let mut perm = universe.clone();
            perm.shuffle(&mut rng);
            sets.extend(perm.chunks(3).map(|c| [c[0], c[1], c[2]]));
        }
        sets.shuffle(&mut rng);
        sets
    } else {
        let mut slots: Vec<u32> = universe.iter().flat_map(|&e| [e, e]).collect();
        let mut attempts = 0u64;
        loop {
            slots.shuffle(&mut rng);
            if slots.chunks(3).all(|c| c[0] != c[1] && c[1] != c[2] && c[0] != c[2]) {
                break slots.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
            }
            attempts += 1;
            if attempts.is_multiple_of(10_000) {
                rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempts));
            }
        }
    };
    X3CInstance::new(ell, sets).expect("generator keeps the instance regular")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let one = X3CInstance::new(1, vec![[1, 2, 3], [3, 2, 1]]).unwrap();
        assert_eq!(solve_x3c(&one).unwrap(), Some(vec![0]));
        let none = X3CInstance::new(2, vec![[1, 2, 3], [1, 4, 5], [2, 4, 6], [3, 5, 6]]).unwrap();
        assert_eq!(solve_x3c(&none).unwrap(), None);
        let twice = X3CInstance::new(2, vec![[1, 2, 3], [4, 5, 6], [1, 2, 3], [4, 5, 6]]).unwrap();
        assert_eq!(solve_x3c(&twice).unwrap(), Some(vec![0, 1]));
    }

    #[test]
    fn validation() {
        assert!(X3CInstance::new(1, vec![[1, 2, 3]]).is_err());
        assert!(X3CInstance::general(1, vec![[1, 2, 3]]).is_ok());
        assert!(X3CInstance::general(1, vec![[1, 1, 2]]).is_err());
        assert!(X3CInstance::general(1, vec![[1, 2, 4]]).is_err());
        assert!(X3CInstance::general(0, vec![]).is_err());
    }

    #[test]
    fn generator_outputs_are_regular() {
        assert_eq!(gen_x3c(1, 5, true).sets(), &[[1, 2, 3], [1, 2, 3]]);
        for seed in 0..30 {
            for ell in 1..=4 {
                for planted in [true, false] {
                    let x = gen_x3c(ell, seed, planted);
                    assert!(x.is_regular());
                    assert_eq!(x.num_sets(), 2 * ell as usize);
                    if planted {
                        assert!(solve_x3c(&x).unwrap().is_some());
                    }
                }
            }
        }
        assert_eq!(gen_x3c(3, 8, false), gen_x3c(3, 8, false));
    }

    #[test]
    fn size_guard() {
        let big = gen_x3c(7, 0, true);
        assert!(matches!(solve_x3c(&big), Err(Error::TooLarge { .. })));
    }
}

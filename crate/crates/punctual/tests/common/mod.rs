//! Seeded generators shared by the integration tests.

#![allow(dead_code)]

use punctual::levitz::{anf, LevitzTerm};
use punctual::Nat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random term of depth at most `depth` with constants at most 5.
pub fn random_term(rng: &mut ChaCha8Rng, depth: usize) -> LevitzTerm {
    if depth <= 1 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => LevitzTerm::Zero,
            1 => LevitzTerm::One,
            2 => LevitzTerm::Var,
            _ => LevitzTerm::numeral(&Nat::from(rng.gen_range(2u32..=5))),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_term(rng, depth - 1);
    match rng.gen_range(0..4) {
        0 => LevitzTerm::sum(sub(rng), sub(rng)),
        1 => LevitzTerm::prod(sub(rng), sub(rng)),
        2 => LevitzTerm::ConstPow(Nat::from(rng.gen_range(1u32..=5)), Box::new(sub(rng))),
        _ => LevitzTerm::var_pow(sub(rng)),
    }
}

/// A random term whose normal form fits the default digit cap; constants
/// like `2^5^3^4` are redrawn.
pub fn corpus_term(rng: &mut ChaCha8Rng) -> LevitzTerm {
    loop {
        let t = random_term(rng, 4);
        if anf(&t).is_ok() {
            return t;
        }
    }
}

pub fn corpus_pairs(seed: u64, n: usize) -> Vec<(LevitzTerm, LevitzTerm)> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| (corpus_term(&mut rng), corpus_term(&mut rng)))
        .collect()
}

#![allow(dead_code)]

use bidding_core::games::{random_arena, RandomParams};
use bidding_core::Arena;
use rand::rngs::StdRng;
use rand::SeedableRng;

pub const SUITE_SIZE: usize = 240;

/// Random games with |V| ≤ 4, k ≤ 3, W ≤ 2, fixed seed.
pub fn suite() -> Vec<Arena> {
    suite_with(SUITE_SIZE, 0x5eed)
}

pub fn suite_with(n: usize, seed: u64) -> Vec<Arena> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n).map(|_| random_arena(&mut rng, RandomParams::small(4, 3, 2))).collect()
}

pub fn b(s: &str) -> bidding_core::Budget {
    s.parse().unwrap()
}

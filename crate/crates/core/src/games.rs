//! Small reference arenas and a random generator for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::arena::Arena;

/// Three vertices, total budget 1. Max prefers the `v0 v2` loop (average 3/2),
/// Min the `v0 v1 v0 v2` loop (average 1/4).
pub fn payoff_triangle() -> Arena {
    Arena::from_named(
        &["v0", "v1", "v2"],
        &[
            ("v0", "v2", 3),
            ("v2", "v0", 0),
            ("v1", "v0", 0),
            ("v0", "v1", -2),
            ("v2", "v2", 5),
            ("v1", "v1", 0),
        ],
        1,
    )
    .expect("valid arena")
}

/// A two-vertex negative cycle `v1 v2` with an exit from `v2` to a safe sink
/// `t`, total budget 5. Pres needs budget to leave the cycle.
pub fn budget_ladder() -> Arena {
    Arena::from_named(
        &["v1", "v2", "t"],
        &[("v1", "v2", 2), ("v2", "t", 2), ("v2", "v1", -3), ("t", "t", 0)],
        5,
    )
    .expect("valid arena")
}

/// One vertex with a self-loop of weight `w`.
pub fn self_loop(weight: i64, k: u64) -> Arena {
    Arena::from_named(&["v"], &[("v", "v", weight)], k).expect("valid arena")
}

/// Size limits for [`random_arena`].
#[derive(Debug, Clone, Copy)]
pub struct RandomParams {
    pub max_vertices: usize,
    pub min_budget: u64,
    pub max_budget: u64,
    pub max_weight: i64,
    pub max_out_degree: usize,
}

impl RandomParams {
    pub fn small(max_vertices: usize, max_budget: u64, max_weight: i64) -> RandomParams {
        RandomParams {
            max_vertices,
            min_budget: 0,
            max_budget,
            max_weight,
            max_out_degree: 3,
        }
    }
}

pub fn random_arena<R: Rng>(rng: &mut R, p: RandomParams) -> Arena {
    let n = rng.gen_range(1..=p.max_vertices);
    let k = rng.gen_range(p.min_budget..=p.max_budget);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    let all: Vec<usize> = (0..n).collect();
    for v in 0..n {
        let deg = rng.gen_range(1..=p.max_out_degree.min(n));
        for &u in all.choose_multiple(rng, deg) {
            edges.push((v, u, rng.gen_range(-p.max_weight..=p.max_weight)));
        }
    }
    Arena::new(names, &edges, k).expect("generator produces valid arenas")
}

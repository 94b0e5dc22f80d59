//! The trimmed fixed point `Energy(v, B)` and the strategy `σ_VI`.

use crate::arena::Arena;
use crate::bidding::{Action, Configuration, Player};
use crate::budget::Budget;
use crate::horizon::{best_bid, mu_step, mu_zero, Energy, EnergyTable};
use crate::strategies::PositionalStrategy;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointResult {
    pub energy: EnergyTable,
    pub iterations: u64,
    pub trim_bound: u64,
}

impl FixedPointResult {
    pub fn at(&self, cfg: &Configuration) -> Energy {
        self.energy.at(cfg)
    }

    pub fn get(&self, v: usize, b: Budget) -> Energy {
        self.energy.get(v, b)
    }
}

/// `|V|·k·W`.
pub fn trim_bound(arena: &Arena) -> u64 {
    arena.num_vertices() as u64 * arena.total_budget() * arena.max_weight()
}

/// `max(|V|·k·W, (N−1)·W)` with `N = |V|·(2k+2)` configurations.
///
/// `|V|·k·W` alone is too small on some games: with k = 1, the arena
/// `v0→v0 (−2), v0→v1 (−1), v1→v2 (−2), v2→v1 (2), v2→v2 (1)` has
/// `Energy(v0, 0) = 7 > 6`. The second term bounds every finite threshold,
/// see [`crate::oracle::finite_energy_bound`].
pub fn safe_trim_bound(arena: &Arena) -> u64 {
    let cycle = (arena.num_configurations() as u64 - 1) * arena.max_weight();
    trim_bound(arena).max(cycle)
}

/// One trimmed step: `μ_step` followed by cutting entries above `bound` to `+∞`.
pub fn trimmed_step(arena: &Arena, prev: &EnergyTable, bound: u64) -> EnergyTable {
    let mut next = mu_step(arena, prev);
    for v in 0..arena.num_vertices() {
        for b in arena.budgets() {
            let e = next.get(v, b);
            next.set(v, b, e.trim(bound));
        }
    }
    next
}

/// Trimmed iteration from `μ_0` until two consecutive tables coincide.
pub fn solve_energy_with_bound(arena: &Arena, bound: u64) -> FixedPointResult {
    let cells = arena.num_configurations() as u64;
    let limit = cells.saturating_mul(bound.saturating_add(2));
    let mut current = mu_zero(arena);
    let mut iterations = 0u64;
    loop {
        let next = trimmed_step(arena, &current, bound);
        iterations += 1;
        assert!(
            iterations <= limit,
            "trimmed iteration exceeded the lattice height bound {limit}"
        );
        if next.values() == current.values() {
            return FixedPointResult {
                energy: next,
                iterations,
                trim_bound: bound,
            };
        }
        current = next;
    }
}

pub fn solve_energy(arena: &Arena) -> FixedPointResult {
    solve_energy_with_bound(arena, safe_trim_bound(arena))
}

/// The value-iteration strategy at one configuration, `None` where Energy is infinite.
pub fn sigma_vi_action(arena: &Arena, fp: &FixedPointResult, cfg: &Configuration) -> Option<Action> {
    if !fp.at(cfg).is_finite() {
        return None;
    }
    Some(greedy_action(arena, &fp.energy, cfg))
}

/// Minimising bid (lowest ordinal first) and target (lowest index first)
/// against the requirements in `table`.
pub fn greedy_action(arena: &Arena, table: &EnergyTable, cfg: &Configuration) -> Action {
    let (bid, _) = best_bid(arena, table, cfg.vertex, cfg.pres_budget);
    let after = cfg.pres_budget.checked_sub(bid).expect("legal bid");
    let target = arena
        .neighbors(cfg.vertex)
        .iter()
        .min_by_key(|e| table.get(e.target, after).before_edge(e.weight))
        .expect("non-empty successor list")
        .target;
    Action::new(bid, target)
}

/// Pres playing greedily against a horizon table, defined everywhere.
pub fn sigma_table(arena: &Arena, table: &EnergyTable) -> PositionalStrategy {
    PositionalStrategy::from_fn(arena, Player::Pres, |cfg| Some(greedy_action(arena, table, cfg)))
}

pub fn sigma_vi(arena: &Arena, fp: &FixedPointResult) -> PositionalStrategy {
    PositionalStrategy::from_fn(arena, Player::Pres, |cfg| sigma_vi_action(arena, fp, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::Arena;
    use crate::games::{budget_ladder, self_loop};
    use crate::horizon::bid_requirement;

    fn b(s: &str) -> Budget {
        s.parse().unwrap()
    }

    #[test]
    fn self_loops() {
        let fp = solve_energy(&self_loop(0, 2));
        assert!(fp.energy.values().iter().all(|e| *e == Energy::ZERO));
        let fp = solve_energy(&self_loop(-1, 2));
        assert!(fp.energy.values().iter().all(|e| !e.is_finite()));
    }

    #[test]
    fn short_trim_bound_loses_a_finite_threshold() {
        let a = Arena::new(
            vec!["v0".into(), "v1".into(), "v2".into()],
            &[(0, 0, -2), (0, 1, -1), (1, 2, -2), (2, 1, 2), (2, 2, 1)],
            1,
        )
        .unwrap();
        assert_eq!(trim_bound(&a), 6);
        assert_eq!(solve_energy(&a).get(0, Budget::ZERO), Energy::finite(7));
        let short = solve_energy_with_bound(&a, trim_bound(&a));
        assert_eq!(short.get(0, Budget::ZERO), Energy::INFINITE);
    }

    #[test]
    fn ladder_energy() {
        let a = budget_ladder();
        let fp = solve_energy(&a);
        assert_eq!(fp.get(0, b("1")), Energy::finite(2));
        let again = trimmed_step(&a, &fp.energy, fp.trim_bound);
        assert_eq!(again.values(), fp.energy.values());
    }

    #[test]
    fn ladder_vi_bids() {
        let a = budget_ladder();
        let fp = solve_energy(&a);
        let s = sigma_vi(&a, &fp);
        let t = a.vertex("t").unwrap();
        let at = |v: usize, x: &str| s.action_at(&Configuration::new(v, b(x))).unwrap();
        // Lowest optimal bid; 3* is optimal too and forces t the same way.
        assert_eq!(at(1, "3*"), Action::new(b("2*"), t));
        let need = fp.get(1, b("3*"));
        assert_eq!(bid_requirement(&a, &fp.energy, 1, b("3*"), b("3*")), need);
        assert_eq!(at(1, "2*").bid, b("0*"));
    }

    #[test]
    fn zero_loop_vi_bids_zero() {
        let a = self_loop(0, 3);
        let fp = solve_energy(&a);
        let s = sigma_vi(&a, &fp);
        for budget in a.budgets() {
            assert_eq!(
                s.action_at(&Configuration::new(0, budget)),
                Some(Action::new(Budget::ZERO, 0))
            );
        }
    }
}

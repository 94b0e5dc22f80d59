//! Brute-force ground truth from the game rules alone.
//!
//! Nothing here calls the horizon or fixpoint code. The truncated game is
//! solved as an explicit reachability game over states `(v, e, m, B)`, with
//! every bid of both players enumerated and both players' winning sets
//! computed separately.

use thiserror::Error;

use crate::arena::Arena;
use crate::bidding::{bidding_winner, Player};
use crate::budget::Budget;
use crate::horizon::{Energy, EnergyTable};
use crate::thresholds::ThresholdMap;

/// Largest number of DP cells `dp_solve` will tabulate.
pub const MAX_DP_CELLS: u64 = 40_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("DP would need {cells} cells, above the limit {limit}")]
    TooLarge { cells: u64, limit: u64 },
    #[error("state (v{vertex}, e={energy}, m={remaining}, B={budget}) is won by neither or both players")]
    Undetermined {
        vertex: usize,
        energy: i64,
        remaining: u64,
        budget: Budget,
    },
    #[error("no self-certifying energy table found up to horizon {0}")]
    NoCertificate(u64),
}

/// Winners of one layer `m`, energies `-1..=emax`.
#[derive(Debug, Clone)]
struct Layer {
    emax: i64,
    budgets: usize,
    pres: Vec<bool>,
}

impl Layer {
    fn idx(&self, v: usize, e: i64, b: Budget) -> usize {
        (v * (self.emax as usize + 2) + (e + 1) as usize) * self.budgets + b.ordinal() as usize
    }

    fn pres_wins(&self, v: usize, e: i64, b: Budget) -> bool {
        let e = e.clamp(-1, self.emax);
        self.pres[self.idx(v, e, b)]
    }

    fn min_energy(&self, v: usize, b: Budget) -> Option<u64> {
        (0..=self.emax).find(|&e| self.pres_wins(v, e, b)).map(|e| e as u64)
    }
}

fn base_layer(arena: &Arena) -> Layer {
    let budgets = arena.num_budgets();
    let mut l = Layer {
        emax: 0,
        budgets,
        pres: vec![false; arena.num_vertices() * 2 * budgets],
    };
    for v in 0..arena.num_vertices() {
        for b in arena.budgets() {
            let i = l.idx(v, 0, b);
            l.pres[i] = true;
        }
    }
    l
}

/// Does Pres have an action that wins against every Cons action?
fn pres_has_action(arena: &Arena, prev: &Layer, v: usize, e: i64, budget: Budget) -> bool {
    let cons = budget.complement(arena.total_budget());
    let next_ok = |u: usize, w: i64, b: Budget| prev.pres_wins(u, e + w, b);
    budget.legal_bids().any(|b| {
        let mut can_win = false;
        for c in cons.legal_bids() {
            match bidding_winner(budget, b, c) {
                Player::Pres => can_win = true,
                Player::Cons => {
                    let after = budget.checked_add(c).unwrap();
                    if !arena.neighbors(v).iter().all(|ed| next_ok(ed.target, ed.weight, after)) {
                        return false;
                    }
                }
            }
        }
        if !can_win {
            return true;
        }
        let after = budget.checked_sub(b).unwrap();
        arena.neighbors(v).iter().any(|ed| next_ok(ed.target, ed.weight, after))
    })
}

/// Does Cons have an action that wins against every Pres action?
fn cons_has_action(arena: &Arena, prev: &Layer, v: usize, e: i64, budget: Budget) -> bool {
    let cons = budget.complement(arena.total_budget());
    let next_bad = |u: usize, w: i64, b: Budget| !prev.pres_wins(u, e + w, b);
    cons.legal_bids().any(|c| {
        let mut can_win = false;
        for b in budget.legal_bids() {
            match bidding_winner(budget, b, c) {
                Player::Cons => can_win = true,
                Player::Pres => {
                    let after = budget.checked_sub(b).unwrap();
                    if !arena.neighbors(v).iter().all(|ed| next_bad(ed.target, ed.weight, after)) {
                        return false;
                    }
                }
            }
        }
        if !can_win {
            return true;
        }
        let after = budget.checked_add(c).unwrap();
        arena.neighbors(v).iter().any(|ed| next_bad(ed.target, ed.weight, after))
    })
}

fn next_layer(arena: &Arena, prev: &Layer, m: u64) -> Result<Layer, OracleError> {
    let emax = m as i64 * arena.max_weight() as i64;
    let budgets = arena.num_budgets();
    let mut l = Layer {
        emax,
        budgets,
        pres: vec![false; arena.num_vertices() * (emax as usize + 2) * budgets],
    };
    for v in 0..arena.num_vertices() {
        for b in arena.budgets() {
            for e in 0..=emax {
                let p = pres_has_action(arena, prev, v, e, b);
                let c = cons_has_action(arena, prev, v, e, b);
                if p == c {
                    return Err(OracleError::Undetermined {
                        vertex: v,
                        energy: e,
                        remaining: m,
                        budget: b,
                    });
                }
                let i = l.idx(v, e, b);
                l.pres[i] = p;
            }
        }
    }
    Ok(l)
}

/// Winners of the reachability game for horizons `0..=n`.
#[derive(Debug, Clone)]
pub struct DpTable {
    layers: Vec<Layer>,
}

impl DpTable {
    pub fn horizon(&self) -> u64 {
        self.layers.len() as u64 - 1
    }

    /// Winner at `(v, e, m, B)`; energies above `m·W` behave like `m·W`.
    pub fn winner(&self, v: usize, e: i64, m: u64, b: Budget) -> Player {
        if e < 0 {
            return Player::Cons;
        }
        if self.layers[m as usize].pres_wins(v, e, b) {
            Player::Pres
        } else {
            Player::Cons
        }
    }

    /// `min{e >= 0 : Pres wins (v, e, m, B)}`.
    pub fn min_winning_energy(&self, v: usize, m: u64, b: Budget) -> u64 {
        self.layers[m as usize]
            .min_energy(v, b)
            .expect("Pres always wins with m·W")
    }

    /// The table of minimal winning energies at horizon `m`.
    pub fn energy_table(&self, arena: &Arena, m: u64) -> EnergyTable {
        let mut t = EnergyTable::filled(arena, Energy::ZERO, Some(m));
        for v in 0..arena.num_vertices() {
            for b in arena.budgets() {
                t.set(v, b, Energy::finite(self.min_winning_energy(v, m, b)));
            }
        }
        t
    }

    /// Largest energy tabulated at layer `m`.
    pub fn max_energy(&self, m: u64) -> i64 {
        self.layers[m as usize].emax
    }
}

fn dp_cells(arena: &Arena, n: u64) -> u64 {
    let per_energy = arena.num_configurations() as u64;
    let w = arena.max_weight();
    // Σ_{m=0..n} (m·W + 2)
    let energies = (n + 1) * 2 + w * n * (n + 1) / 2;
    per_energy.saturating_mul(energies)
}

pub fn dp_solve(arena: &Arena, n: u64) -> Result<DpTable, OracleError> {
    let cells = dp_cells(arena, n);
    if cells > MAX_DP_CELLS {
        return Err(OracleError::TooLarge {
            cells,
            limit: MAX_DP_CELLS,
        });
    }
    let mut layers = vec![base_layer(arena)];
    for m in 1..=n {
        let next = next_layer(arena, layers.last().unwrap(), m)?;
        layers.push(next);
    }
    Ok(DpTable { layers })
}

/// Upper bound on any finite energy threshold.
///
/// Against a positional winning Pres strategy every play is a path in a
/// graph on the `N = |V|·(2k+2)` configurations without negative cycles, so
/// no prefix drops below `-(N-1)·W`.
pub fn finite_energy_bound(arena: &Arena) -> u64 {
    (arena.num_configurations() as u64 - 1) * arena.max_weight()
}

/// Does `t` let Pres keep the invariant `energy >= t(config)` forever from
/// every finite cell, when she commits to an action first?
pub fn is_pres_certificate(arena: &Arena, t: &EnergyTable) -> bool {
    let k = arena.total_budget();
    for v in 0..arena.num_vertices() {
        for budget in arena.budgets() {
            let Some(have) = t.get(v, budget).value() else {
                continue;
            };
            let ok_at = |u: usize, w: i64, b: Budget| match t.get(u, b).value() {
                Some(need) => have as i128 + w as i128 >= need as i128,
                None => false,
            };
            let cons = budget.complement(k);
            let found = budget.legal_bids().any(|b| {
                let mut can_win = false;
                for c in cons.legal_bids() {
                    match bidding_winner(budget, b, c) {
                        Player::Pres => can_win = true,
                        Player::Cons => {
                            let after = budget.checked_add(c).unwrap();
                            if !arena.neighbors(v).iter().all(|ed| ok_at(ed.target, ed.weight, after)) {
                                return false;
                            }
                        }
                    }
                }
                !can_win || {
                    let after = budget.checked_sub(b).unwrap();
                    arena.neighbors(v).iter().any(|ed| ok_at(ed.target, ed.weight, after))
                }
            });
            if !found {
                return false;
            }
        }
    }
    true
}

/// Exact energy thresholds from the DP.
///
/// Requirements only grow with the horizon and converge to the threshold, so
/// a cell above [`finite_energy_bound`] is infinite. The horizon is doubled
/// until the remaining cells form a table that certifies itself.
pub fn oracle_energy(arena: &Arena, max_horizon: u64) -> Result<EnergyTable, OracleError> {
    let bound = finite_energy_bound(arena);
    let mut layer = base_layer(arena);
    let mut m = 0u64;
    let mut check_at = 1u64;
    loop {
        if m >= check_at || m >= max_horizon {
            let mut t = EnergyTable::filled(arena, Energy::ZERO, None);
            for v in 0..arena.num_vertices() {
                for b in arena.budgets() {
                    let e = layer.min_energy(v, b).unwrap();
                    let e = if e > bound { Energy::INFINITE } else { Energy::finite(e) };
                    t.set(v, b, e);
                }
            }
            if is_pres_certificate(arena, &t) {
                return Ok(t);
            }
            if m >= max_horizon {
                return Err(OracleError::NoCertificate(max_horizon));
            }
            check_at = (check_at * 2).min(max_horizon);
        }
        m += 1;
        layer = next_layer(arena, &layer, m)?;
    }
}

/// Thresholds derived from [`oracle_energy`].
pub fn oracle_threshold(arena: &Arena, max_horizon: u64) -> Result<ThresholdMap, OracleError> {
    let energy = oracle_energy(arena, max_horizon)?;
    let values = (0..arena.num_vertices())
        .map(|v| {
            arena
                .budgets()
                .find(|&b| energy.get(v, b).is_finite())
                .unwrap_or_else(|| arena.top())
        })
        .collect();
    Ok(ThresholdMap::new(arena.total_budget(), values).expect("in range"))
}

//! Finite-horizon energy requirements `μ_n`.

use std::fmt;

use crate::arena::Arena;
use crate::bidding::Configuration;
use crate::budget::Budget;

/// A natural number or `+∞`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Energy(u64);

impl Energy {
    pub const ZERO: Energy = Energy(0);
    pub const INFINITE: Energy = Energy(u64::MAX);

    pub fn finite(value: u64) -> Energy {
        assert!(value < u64::MAX, "finite energy out of range");
        Energy(value)
    }

    pub fn is_finite(self) -> bool {
        self != Energy::INFINITE
    }

    pub fn value(self) -> Option<u64> {
        self.is_finite().then_some(self.0)
    }

    /// Energy needed before traversing an edge of weight `w` into a
    /// configuration needing `self`: `max(self - w, 0)`.
    pub fn before_edge(self, w: i64) -> Energy {
        match self.value() {
            None => Energy::INFINITE,
            Some(e) => {
                let need = e as i128 - w as i128;
                Energy(need.max(0) as u64)
            }
        }
    }

    /// `+∞` when the value exceeds `bound`.
    pub fn trim(self, bound: u64) -> Energy {
        if self.0 > bound {
            Energy::INFINITE
        } else {
            self
        }
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("+inf"),
        }
    }
}

impl fmt::Debug for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Dense map `(vertex, budget ordinal) -> Energy`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EnergyTable {
    num_budgets: usize,
    values: Vec<Energy>,
    horizon: Option<u64>,
}

impl EnergyTable {
    pub fn filled(arena: &Arena, value: Energy, horizon: Option<u64>) -> EnergyTable {
        EnergyTable {
            num_budgets: arena.num_budgets(),
            values: vec![value; arena.num_configurations()],
            horizon,
        }
    }

    pub fn get(&self, v: usize, b: Budget) -> Energy {
        self.values[v * self.num_budgets + b.ordinal() as usize]
    }

    pub fn at(&self, cfg: &Configuration) -> Energy {
        self.get(cfg.vertex, cfg.pres_budget)
    }

    pub fn set(&mut self, v: usize, b: Budget, e: Energy) {
        self.values[v * self.num_budgets + b.ordinal() as usize] = e;
    }

    pub fn horizon(&self) -> Option<u64> {
        self.horizon
    }

    pub fn num_vertices(&self) -> usize {
        self.values.len() / self.num_budgets
    }

    pub fn num_budgets(&self) -> usize {
        self.num_budgets
    }

    pub fn values(&self) -> &[Energy] {
        &self.values
    }

    /// Row of vertex `v`, indexed by budget ordinal.
    pub fn row(&self, v: usize) -> &[Energy] {
        &self.values[v * self.num_budgets..(v + 1) * self.num_budgets]
    }

    pub fn max_finite(&self) -> Option<u64> {
        self.values.iter().filter_map(|e| e.value()).max()
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &EnergyTable) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

pub fn mu_zero(arena: &Arena) -> EnergyTable {
    EnergyTable::filled(arena, Energy::ZERO, Some(0))
}

/// Requirement `e_next(v, B, b)` for Pres bidding `b` at `(v, B)` against `prev`.
///
/// Pres winning the bidding picks the best successor at `B ⊖ b`; Cons winning
/// with the cheapest overbid `trump(B, b)` picks the worst one at `B ⊕ trump`,
/// provided Cons can afford it.
pub fn bid_requirement(arena: &Arena, prev: &EnergyTable, v: usize, budget: Budget, bid: Budget) -> Energy {
    let after_win = budget.checked_sub(bid).expect("legal bid");
    let mut e_win = Energy::INFINITE;
    for e in arena.neighbors(v) {
        e_win = e_win.min(prev.get(e.target, after_win).before_edge(e.weight));
    }
    let after_loss = budget.ordinal() + budget.trump(bid).ordinal();
    if after_loss > arena.total().ordinal() {
        return e_win;
    }
    let after_loss = Budget::from_ordinal(after_loss);
    let mut e_lose = Energy::ZERO;
    for e in arena.neighbors(v) {
        e_lose = e_lose.max(prev.get(e.target, after_loss).before_edge(e.weight));
    }
    e_win.max(e_lose)
}

/// Best bid at `(v, B)`: minimal requirement, smallest ordinal on ties.
pub fn best_bid(arena: &Arena, prev: &EnergyTable, v: usize, budget: Budget) -> (Budget, Energy) {
    let mut best = (Budget::ZERO, Energy::INFINITE);
    let mut first = true;
    for bid in budget.legal_bids() {
        let e = bid_requirement(arena, prev, v, budget, bid);
        if first || e < best.1 {
            best = (bid, e);
            first = false;
        }
    }
    best
}

pub fn mu_step(arena: &Arena, prev: &EnergyTable) -> EnergyTable {
    let mut next = EnergyTable::filled(arena, Energy::ZERO, prev.horizon.map(|n| n + 1));
    for v in 0..arena.num_vertices() {
        for budget in arena.budgets() {
            next.set(v, budget, best_bid(arena, prev, v, budget).1);
        }
    }
    next
}

/// `[μ_0, ..., μ_n]`.
pub fn mu_n_tables(arena: &Arena, n: u64) -> Vec<EnergyTable> {
    let mut out = vec![mu_zero(arena)];
    for _ in 0..n {
        let next = mu_step(arena, out.last().unwrap());
        out.push(next);
    }
    out
}

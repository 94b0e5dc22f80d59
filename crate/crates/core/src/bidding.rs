//! Configurations, actions and the resolution of a single bidding.

use std::fmt;

use thiserror::Error;

use crate::arena::Arena;
use crate::budget::Budget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    /// The preserver, who keeps the energy non-negative.
    Pres,
    /// The consumer, who tries to exhaust the energy.
    Cons,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Pres => Player::Cons,
            Player::Cons => Player::Pres,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Pres => "pres",
            Player::Cons => "cons",
        })
    }
}

/// A vertex and Pres's budget; Cons holds the rest of `k*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub vertex: usize,
    pub pres_budget: Budget,
}

impl Configuration {
    pub fn new(vertex: usize, pres_budget: Budget) -> Configuration {
        Configuration { vertex, pres_budget }
    }

    pub fn cons_budget(&self, k: u64) -> Budget {
        self.pres_budget.complement(k)
    }

    /// The budget of `player` in this configuration.
    pub fn budget_of(&self, player: Player, k: u64) -> Budget {
        match player {
            Player::Pres => self.pres_budget,
            Player::Cons => self.cons_budget(k),
        }
    }

    /// Dense table index `vertex·(2k+2) + ordinal`.
    pub fn index(&self, arena: &Arena) -> usize {
        self.vertex * arena.num_budgets() + self.pres_budget.ordinal() as usize
    }
}

/// A bid together with the vertex to move to on winning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Action {
    pub bid: Budget,
    pub target: usize,
}

impl Action {
    pub fn new(bid: Budget, target: usize) -> Action {
        Action { bid, target }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BiddingError {
    #[error("{player} bid {bid} is not legal with budget {budget}")]
    IllegalBid {
        player: Player,
        bid: Budget,
        budget: Budget,
    },
    #[error("{player} target {target} is not a successor of vertex {vertex}")]
    IllegalTarget {
        player: Player,
        vertex: usize,
        target: usize,
    },
    #[error("configuration budget {0} exceeds the total budget")]
    BadConfiguration(Budget),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub next: Configuration,
    pub winner: Player,
    pub weight: i64,
}

/// Winner of a bidding between `pres_bid` and `cons_bid` when Pres holds `pres_budget`.
///
/// Higher ordinal wins; on equal ordinals the player without the advantage
/// wins, since the holder chose not to use it.
pub fn bidding_winner(pres_budget: Budget, pres_bid: Budget, cons_bid: Budget) -> Player {
    use std::cmp::Ordering::*;
    match pres_bid.ordinal().cmp(&cons_bid.ordinal()) {
        Greater => Player::Pres,
        Less => Player::Cons,
        Equal => {
            if pres_budget.has_advantage() {
                Player::Cons
            } else {
                Player::Pres
            }
        }
    }
}

/// Checks that `action` is legal for `player` at `cfg`.
pub fn check_action(
    arena: &Arena,
    cfg: &Configuration,
    player: Player,
    action: &Action,
) -> Result<(), BiddingError> {
    let budget = cfg.budget_of(player, arena.total_budget());
    if !budget.can_bid(action.bid) {
        return Err(BiddingError::IllegalBid {
            player,
            bid: action.bid,
            budget,
        });
    }
    if action.target >= arena.num_vertices() || !arena.is_edge(cfg.vertex, action.target) {
        return Err(BiddingError::IllegalTarget {
            player,
            vertex: cfg.vertex,
            target: action.target,
        });
    }
    Ok(())
}

pub fn resolve_bidding(
    arena: &Arena,
    cfg: &Configuration,
    pres: &Action,
    cons: &Action,
) -> Result<Transition, BiddingError> {
    if cfg.pres_budget > arena.total() {
        return Err(BiddingError::BadConfiguration(cfg.pres_budget));
    }
    check_action(arena, cfg, Player::Pres, pres)?;
    check_action(arena, cfg, Player::Cons, cons)?;
    let budget = cfg.pres_budget;
    let (next, winner) = match bidding_winner(budget, pres.bid, cons.bid) {
        Player::Pres => (
            Configuration::new(pres.target, budget.checked_sub(pres.bid).expect("legal bid")),
            Player::Pres,
        ),
        Player::Cons => (
            Configuration::new(cons.target, budget.checked_add(cons.bid).expect("small budget")),
            Player::Cons,
        ),
    };
    let weight = arena.weight(cfg.vertex, next.vertex).expect("checked target");
    Ok(Transition {
        next,
        winner,
        weight,
    })
}

//! Discrete-bidding games with energy and mean-payoff objectives.
//!
//! Two players, Pres and Cons, split a total budget of `k` chips plus a
//! tie-breaking advantage. Each turn both bid; the higher bid pays the
//! other and moves the token. Pres wants the running energy to stay
//! non-negative.
//!
//! The crate computes the energy threshold `Energy(v, B)` by trimmed value
//! iteration, derives threshold budgets, builds strategies for both players,
//! certifies threshold maps through a turn-based reduction, and provides an
//! independent brute-force oracle.

pub mod arena;
pub mod bidding;
pub mod budget;
pub mod fixpoint;
pub mod format;
pub mod games;
pub mod horizon;
pub mod oracle;
pub mod sim;
pub mod strategies;
pub mod thresholds;
pub mod turnbased;

pub use arena::{Arena, ArenaError, Edge};
pub use bidding::{resolve_bidding, Action, Configuration, Player, Transition};
pub use budget::Budget;
pub use fixpoint::{sigma_vi, solve_energy, FixedPointResult};
pub use horizon::{Energy, EnergyTable};
pub use thresholds::{check_average, complement, thresholds, ThresholdMap};

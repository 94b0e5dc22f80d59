//! Play engine, mean-payoff accounting and the mean-payoff to energy reduction.

use std::collections::{HashMap, HashSet};

use num_rational::Ratio;
use thiserror::Error;

use crate::arena::Arena;
use crate::bidding::{resolve_bidding, Action, BiddingError, Configuration, Player};
use crate::budget::Budget;
use crate::fixpoint::{sigma_vi, solve_energy};
use crate::strategies::{PositionalStrategy, Strategy, StrategyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlayError {
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Bidding(#[from] BiddingError),
    #[error("strategy for {found} passed where a {expected} strategy is needed")]
    WrongPlayer { expected: Player, found: Player },
    #[error("play did not end in a detected cycle")]
    NotPeriodic,
    #[error("invalid target: {0}")]
    Target(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub cfg: Configuration,
    pub pres: Action,
    pub cons: Action,
    pub winner: Player,
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayTrace {
    pub steps: Vec<Step>,
    pub initial_energy: i64,
    /// Energy before each step, followed by the energy after the last one.
    pub running_energy: Vec<i64>,
    pub last: Configuration,
}

impl PlayTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_energy(&self) -> i64 {
        *self.running_energy.last().unwrap()
    }

    pub fn min_energy(&self) -> i64 {
        *self.running_energy.iter().min().unwrap()
    }

    /// Vertices visited, starting with the initial one.
    pub fn path(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.steps.iter().map(|s| s.cfg.vertex).collect();
        p.push(self.last.vertex);
        p
    }

    pub fn configurations(&self) -> Vec<Configuration> {
        let mut c: Vec<Configuration> = self.steps.iter().map(|s| s.cfg).collect();
        c.push(self.last);
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Energy dropped below zero after `step` moves.
    ConsWin { step: usize },
    PresSurvived,
    /// The state before move `start` recurs before move `start + period`.
    CycleDetected { start: usize, period: usize, weight_sum: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Play {
    pub trace: PlayTrace,
    pub outcome: Outcome,
}

impl Play {
    /// Vertices of the detected cycle.
    pub fn cycle(&self) -> Option<Vec<usize>> {
        match self.outcome {
            Outcome::CycleDetected { start, period, .. } => Some(
                self.trace.steps[start..start + period]
                    .iter()
                    .map(|s| s.cfg.vertex)
                    .collect(),
            ),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlayOptions {
    pub max_steps: u64,
    pub detect_cycles: bool,
    /// Stop as soon as the energy is negative. Without it the play runs on
    /// and any repeated state counts as a cycle, which is what mean-payoff
    /// plays need; with it only non-negative cycles end the play, since a
    /// negative one is bound to reach negative energy.
    pub energy_objective: bool,
}

impl PlayOptions {
    pub fn energy(arena: &Arena) -> PlayOptions {
        PlayOptions {
            max_steps: default_max_steps(arena),
            detect_cycles: true,
            energy_objective: true,
        }
    }

    pub fn mean_payoff(arena: &Arena) -> PlayOptions {
        PlayOptions {
            energy_objective: false,
            ..PlayOptions::energy(arena)
        }
    }

    pub fn with_steps(self, max_steps: u64) -> PlayOptions {
        PlayOptions { max_steps, ..self }
    }

    pub fn without_cycles(self) -> PlayOptions {
        PlayOptions {
            detect_cycles: false,
            ..self
        }
    }
}

/// `10·|V|·(2k+2)·(|V|·k·W + 1)`.
pub fn default_max_steps(arena: &Arena) -> u64 {
    let n = arena.num_vertices() as u64;
    let trim = n * arena.total_budget() * arena.max_weight();
    (10 * n * arena.num_budgets() as u64).saturating_mul(trim + 1)
}

pub fn run_play(
    arena: &Arena,
    init: Configuration,
    energy: i64,
    pres: &mut dyn Strategy,
    cons: &mut dyn Strategy,
    opts: PlayOptions,
) -> Result<Play, PlayError> {
    for (s, expected) in [(pres.player(), Player::Pres), (cons.player(), Player::Cons)] {
        if s != expected {
            return Err(PlayError::WrongPlayer { expected, found: s });
        }
    }
    if init.pres_budget > arena.total() {
        return Err(BiddingError::BadConfiguration(init.pres_budget).into());
    }
    let mut trace = PlayTrace {
        steps: Vec::new(),
        initial_energy: energy,
        running_energy: vec![energy],
        last: init,
    };
    let mut seen: HashMap<(Configuration, u64, u64), usize> = HashMap::new();
    let mut energy_now = energy;
    let mut cfg = init;
    if energy_now < 0 {
        return Ok(Play {
            trace,
            outcome: Outcome::ConsWin { step: 0 },
        });
    }
    for i in 0..opts.max_steps as usize {
        if opts.detect_cycles {
            if let (Some(p), Some(c)) = (pres.memory_key(), cons.memory_key()) {
                if let Some(&start) = seen.get(&(cfg, p, c)) {
                    let weight_sum = energy_now - trace.running_energy[start];
                    if !opts.energy_objective || weight_sum >= 0 {
                        return Ok(Play {
                            trace,
                            outcome: Outcome::CycleDetected {
                                start,
                                period: i - start,
                                weight_sum,
                            },
                        });
                    }
                } else {
                    seen.insert((cfg, p, c), i);
                }
            }
        }
        let pa = pres.decide(arena, &cfg, energy_now)?;
        let ca = cons.decide(arena, &cfg, energy_now)?;
        let t = resolve_bidding(arena, &cfg, &pa, &ca)?;
        pres.observe(arena, &cfg, &t);
        cons.observe(arena, &cfg, &t);
        trace.steps.push(Step {
            cfg,
            pres: pa,
            cons: ca,
            winner: t.winner,
            weight: t.weight,
        });
        energy_now += t.weight;
        trace.running_energy.push(energy_now);
        cfg = t.next;
        trace.last = cfg;
        if opts.energy_objective && energy_now < 0 {
            return Ok(Play {
                trace,
                outcome: Outcome::ConsWin { step: i + 1 },
            });
        }
    }
    Ok(Play {
        trace,
        outcome: Outcome::PresSurvived,
    })
}

/// Exact average of the detected cycle.
pub fn mean_payoff_of(play: &Play) -> Result<Ratio<i64>, PlayError> {
    match play.outcome {
        Outcome::CycleDetected { period, weight_sum, .. } if period > 0 => {
            Ok(Ratio::new(weight_sum, period as i64))
        }
        _ => Err(PlayError::NotPeriodic),
    }
}

/// Average weight of the whole trace; only an approximation of the liminf.
pub fn prefix_average(trace: &PlayTrace) -> Option<Ratio<i64>> {
    if trace.is_empty() {
        return None;
    }
    Some(Ratio::new(
        trace.final_energy() - trace.initial_energy,
        trace.len() as i64,
    ))
}

/// Same vertices and budget, weights `q·w − p`.
pub fn reduce_mean_payoff(arena: &Arena, target: Ratio<i64>) -> Arena {
    let (p, q) = (*target.numer(), *target.denom());
    arena.map_weights(|w| q * w - p)
}

fn total(arena: &Arena, s: PositionalStrategy) -> PositionalStrategy {
    let player = s.player();
    PositionalStrategy::from_fn(arena, player, |cfg| {
        Some(s.action_at(cfg).unwrap_or(Action::new(Budget::ZERO, arena.neighbors(cfg.vertex)[0].target)))
    })
}

/// Positional strategies for Max (as Pres) and Min (as Cons) at `target`.
///
/// Max plays `σ_VI` on the shifted arena, Min plays `σ_VI` on the negated
/// shifted arena with the budgets swapped. Where a side has no finite
/// requirement it bids zero and takes the first edge.
pub fn mean_payoff_strategies(arena: &Arena, target: Ratio<i64>) -> (PositionalStrategy, PositionalStrategy) {
    let shifted = reduce_mean_payoff(arena, target);
    let max = sigma_vi(&shifted, &solve_energy(&shifted));
    let negated = shifted.map_weights(|w| -w);
    let min = sigma_vi(&negated, &solve_energy(&negated)).as_opponent(arena);
    (total(arena, max), total(arena, min))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanPayoffVerdict {
    /// Max guarantees at least the target and Min cannot hold it to the target.
    Max,
    /// Both guarantee the target from their side: the value is exactly the target.
    MaxAtBoundary,
    Min,
}

/// Winner of the mean-payoff game with threshold `target` from every configuration.
pub fn mean_payoff_winners(arena: &Arena, target: Ratio<i64>) -> Vec<(Configuration, MeanPayoffVerdict)> {
    let shifted = reduce_mean_payoff(arena, target);
    let max = solve_energy(&shifted);
    let negated = shifted.map_weights(|w| -w);
    let min = solve_energy(&negated);
    let k = arena.total_budget();
    let mut out = Vec::new();
    for v in 0..arena.num_vertices() {
        for b in arena.budgets() {
            let cfg = Configuration::new(v, b);
            let verdict = match (max.get(v, b).is_finite(), min.get(v, b.complement(k)).is_finite()) {
                (true, true) => MeanPayoffVerdict::MaxAtBoundary,
                (true, false) => MeanPayoffVerdict::Max,
                (false, _) => MeanPayoffVerdict::Min,
            };
            out.push((cfg, verdict));
        }
    }
    out
}

/// Largest cycle average `p/q` that Max can guarantee from `cfg`.
///
/// Optimal plays settle on a cycle of configurations, so `q` ranges up to
/// the number of configurations, not just `|V|`: in the payoff triangle
/// Max gets 1/4 from `(v0, 0*)` along a cycle of length 4 on 3 vertices.
pub fn optimal_value(arena: &Arena, cfg: Configuration) -> Ratio<i64> {
    let n = arena.num_configurations() as i64;
    let w = arena.max_weight() as i64;
    let mut candidates: Vec<Ratio<i64>> = (1..=n)
        .flat_map(|q| (-q * w..=q * w).map(move |p| Ratio::new(p, q)))
        .collect();
    candidates.sort();
    candidates.dedup();
    let wins = |c: Ratio<i64>| {
        let shifted = reduce_mean_payoff(arena, c);
        solve_energy(&shifted).at(&cfg).is_finite()
    };
    // `wins` holds at -W and is monotone; find the last candidate where it holds.
    let (mut lo, mut hi) = (0usize, candidates.len());
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if wins(candidates[mid]) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    candidates[lo]
}

/// Parses `P/Q` or an integer.
pub fn parse_target(s: &str) -> Result<Ratio<i64>, PlayError> {
    let bad = || PlayError::Target(s.to_string());
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse::<i64>().map_err(|_| bad())?, q.trim().parse::<i64>().map_err(|_| bad())?),
        None => (s.trim().parse::<i64>().map_err(|_| bad())?, 1),
    };
    if q < 1 {
        return Err(bad());
    }
    Ok(Ratio::new(p, q))
}

/// Searches Cons action sequences of length at most `depth` that drive the
/// energy below zero against the positional Pres strategy `pres`.
pub fn exhaustive_cons_search(
    arena: &Arena,
    pres: &PositionalStrategy,
    init: Configuration,
    energy: i64,
    depth: usize,
) -> Result<Option<Vec<Action>>, PlayError> {
    let mut failed = HashSet::new();
    let mut path = Vec::new();
    if search(arena, pres, init, energy, depth, &mut failed, &mut path)? {
        Ok(Some(path))
    } else {
        Ok(None)
    }
}

fn search(
    arena: &Arena,
    pres: &PositionalStrategy,
    cfg: Configuration,
    energy: i64,
    depth: usize,
    failed: &mut HashSet<(Configuration, i64, usize)>,
    path: &mut Vec<Action>,
) -> Result<bool, PlayError> {
    if energy < 0 {
        return Ok(true);
    }
    if depth == 0 || failed.contains(&(cfg, energy, depth)) {
        return Ok(false);
    }
    let pa = pres.action_at(&cfg).ok_or(StrategyError::Undefined(cfg))?;
    let cons_budget = cfg.cons_budget(arena.total_budget());
    let mut pres_move_tried = false;
    for bid in cons_budget.legal_bids() {
        for e in arena.neighbors(cfg.vertex) {
            let ca = Action::new(bid, e.target);
            let t = resolve_bidding(arena, &cfg, &pa, &ca)?;
            if t.winner == Player::Pres {
                // The outcome does not depend on the Cons action; try it once.
                if pres_move_tried {
                    continue;
                }
                pres_move_tried = true;
            }
            path.push(ca);
            if search(arena, pres, t.next, energy + t.weight, depth - 1, failed, path)? {
                return Ok(true);
            }
            path.pop();
        }
    }
    failed.insert((cfg, energy, depth));
    Ok(false)
}

/// Line records `step vertex budget pres_bid cons_bid winner weight energy`,
/// where `energy` is the value after the step.
pub fn trace_lines(arena: &Arena, trace: &PlayTrace) -> Vec<String> {
    trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            format!(
                "{} {} {} {} {} {} {} {}",
                i,
                arena.name(s.cfg.vertex),
                s.cfg.pres_budget,
                s.pres.bid,
                s.cons.bid,
                s.winner,
                s.weight,
                trace.running_energy[i + 1]
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{payoff_triangle, self_loop};
    use crate::strategies::RandomStrategy;

    #[test]
    fn negative_loop_loses_at_step_four() {
        let a = self_loop(-1, 2);
        let mut p = RandomStrategy::new(Player::Pres, 1);
        let mut c = RandomStrategy::new(Player::Cons, 2);
        let play = run_play(&a, Configuration::new(0, Budget::ZERO), 3, &mut p, &mut c, PlayOptions::energy(&a)).unwrap();
        assert_eq!(play.outcome, Outcome::ConsWin { step: 4 });
        assert_eq!(play.trace.running_energy, vec![3, 2, 1, 0, -1]);
    }

    #[test]
    fn zero_cycle_average() {
        let a = self_loop(0, 1);
        let (mut p, mut c) = mean_payoff_strategies(&a, Ratio::from_integer(0));
        let play = run_play(&a, Configuration::new(0, Budget::ZERO), 0, &mut p, &mut c, PlayOptions::mean_payoff(&a)).unwrap();
        assert_eq!(mean_payoff_of(&play).unwrap(), Ratio::from_integer(0));
    }

    #[test]
    fn non_cyclic_trace_has_no_mean_payoff() {
        let a = self_loop(-1, 1);
        let mut p = RandomStrategy::new(Player::Pres, 1);
        let mut c = RandomStrategy::new(Player::Cons, 2);
        let play = run_play(&a, Configuration::new(0, Budget::ZERO), 0, &mut p, &mut c, PlayOptions::energy(&a)).unwrap();
        assert_eq!(mean_payoff_of(&play), Err(PlayError::NotPeriodic));
    }

    #[test]
    fn shift_arithmetic() {
        let a = payoff_triangle();
        assert_eq!(reduce_mean_payoff(&a, Ratio::from_integer(0)), a);
        let s = reduce_mean_payoff(&a, Ratio::new(3, 2));
        assert_eq!(s.weight(0, 2), Some(3));
        assert_eq!(s.weight(2, 2), Some(7));
        assert_eq!(s.weight(0, 1), Some(-7));
    }

    #[test]
    fn wrong_player_rejected() {
        let a = self_loop(0, 1);
        let mut p = RandomStrategy::new(Player::Cons, 1);
        let mut c = RandomStrategy::new(Player::Cons, 2);
        let r = run_play(&a, Configuration::new(0, Budget::ZERO), 0, &mut p, &mut c, PlayOptions::energy(&a));
        assert!(matches!(r, Err(PlayError::WrongPlayer { .. })));
    }

    #[test]
    fn targets() {
        assert_eq!(parse_target("3/2").unwrap(), Ratio::new(3, 2));
        assert_eq!(parse_target("-1").unwrap(), Ratio::from_integer(-1));
        assert!(parse_target("1/0").is_err());
    }
}

//! Turn-based energy games built from a candidate threshold map, used to
//! certify thresholds and to extract positional budget-agnostic strategies.
//!
//! The mover holds a budget in `{T(v), succ(T(v))}`. It fixes a bid and a
//! vertex to move to on winning; the responder then concedes or overbids
//! (with `trump` or the next bid up) and moves anywhere. Budgets above
//! `succ(T(u))` go to a per-vertex sink that is good for the mover. By
//! default every bid that keeps all outcomes at or above `T` is offered;
//! [`MoverBids::Prescribed`] restricts the mover to `optbid` and the allowed
//! vertices.

use thiserror::Error;

use crate::arena::Arena;
use crate::bidding::{bidding_winner, Action, Configuration, Player};
use crate::budget::Budget;
use crate::horizon::Energy;
use crate::strategies::PositionalStrategy;
use crate::thresholds::{bid_plan, check_average, complement, plan_bid, relativebud, ThresholdError, ThresholdMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TurnBasedError {
    #[error("threshold map violates the average property at vertex {0}")]
    NotAverage(usize),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
}

/// Which player moves first in the turn-based game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Pres,
    Cons,
}

impl Side {
    pub fn mover(self) -> Player {
        match self {
            Side::Pres => Player::Pres,
            Side::Cons => Player::Cons,
        }
    }
}

/// Budget slot of a position node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Base,
    Succ,
    Sink,
}

const SLOTS: [Slot; 3] = [Slot::Base, Slot::Succ, Slot::Sink];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    /// Mover to choose an allowed vertex; `budget` is `None` for sinks.
    Position { vertex: usize, slot: Slot, budget: Option<Budget> },
    /// Responder, after the mover at position `parent` bid `bid` and picked
    /// `choice` for the case it wins; `None` when the bid cannot win.
    Response { bid: Budget, choice: Option<usize>, parent: usize },
}

#[derive(Debug, Clone)]
pub struct TurnBasedGame {
    side: Side,
    nodes: Vec<Node>,
    succ: Vec<Vec<(usize, i64)>>,
    /// Nodes whose owner maximises the energy requirement (Cons).
    maximiser: Vec<bool>,
    /// Position nodes that correspond to real configurations.
    live: Vec<bool>,
}

pub fn position_index(vertex: usize, slot: Slot) -> usize {
    3 * vertex
        + match slot {
            Slot::Base => 0,
            Slot::Succ => 1,
            Slot::Sink => 2,
        }
}

impl TurnBasedGame {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn successors(&self, x: usize) -> &[(usize, i64)] {
        &self.succ[x]
    }

    pub fn is_maximiser(&self, x: usize) -> bool {
        self.maximiser[x]
    }

    pub fn is_live(&self, x: usize) -> bool {
        self.live[x]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_positions(&self) -> usize {
        self.live.len()
    }

    pub fn num_responses(&self) -> usize {
        self.nodes.len() - self.live.len()
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn max_weight(&self) -> u64 {
        self.succ
            .iter()
            .flatten()
            .map(|(_, w)| w.unsigned_abs())
            .max()
            .unwrap_or(0)
    }
}

fn slot_of(t: &ThresholdMap, u: usize, budget: Budget) -> Option<Slot> {
    let base = t.get(u);
    if budget < base {
        None
    } else if budget == base {
        Some(Slot::Base)
    } else if budget == base.succ() {
        Some(Slot::Succ)
    } else {
        Some(Slot::Sink)
    }
}

/// Which bids the mover may place at a position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MoverBids {
    /// Every legal bid that keeps all successor budgets at or above `T`.
    #[default]
    Admissible,
    /// Only `optbid(T, v, B)` together with the allowed vertices.
    Prescribed,
}

pub fn build_turn_based(arena: &Arena, t: &ThresholdMap, side: Side) -> Result<TurnBasedGame, TurnBasedError> {
    build_turn_based_with(arena, t, side, MoverBids::default())
}

pub fn build_turn_based_with(
    arena: &Arena,
    t: &ThresholdMap,
    side: Side,
    bids: MoverBids,
) -> Result<TurnBasedGame, TurnBasedError> {
    if let Err(v) = check_average(arena, t) {
        return Err(TurnBasedError::NotAverage(v.vertex));
    }
    let n = arena.num_vertices();
    let k = arena.total_budget();
    let total = arena.total();
    let mover_max = side == Side::Cons;
    let sink_weight = if side == Side::Pres { 0 } else { -1 };
    // A mover without any admissible bid loses on the spot.
    let stuck_weight = -1 - sink_weight;
    let mut nodes = Vec::with_capacity(3 * n);
    let mut maximiser = Vec::with_capacity(3 * n);
    let mut live = Vec::with_capacity(3 * n);
    for v in 0..n {
        for slot in SLOTS {
            let budget = match slot {
                Slot::Base => Some(t.get(v)),
                Slot::Succ => Some(t.get(v).succ()),
                Slot::Sink => None,
            };
            let real = !t.is_top(v) && budget.is_some_and(|b| b <= total);
            nodes.push(Node::Position { vertex: v, slot, budget });
            maximiser.push(mover_max);
            live.push(real);
        }
    }
    let at_or_above = |u: usize, b: Budget| slot_of(t, u, b).map(|s| position_index(u, s));
    let mut succ: Vec<Vec<(usize, i64)>> = vec![Vec::new(); 3 * n];
    for v in 0..n {
        for slot in SLOTS {
            let p = position_index(v, slot);
            if slot == Slot::Sink {
                succ[p].push((p, sink_weight));
                continue;
            }
            if !live[p] {
                succ[p].push((p, 0));
                continue;
            }
            let Node::Position { budget: Some(budget), .. } = nodes[p] else {
                unreachable!()
            };
            let responder = budget.complement(k);
            let candidates: Vec<(Budget, Option<Vec<usize>>)> = match bids {
                MoverBids::Admissible => budget.legal_bids().map(|b| (b, None)).collect(),
                MoverBids::Prescribed => {
                    let plan = bid_plan(arena, t, v)?;
                    vec![(plan_bid(&plan, budget), Some(plan.allowed))]
                }
            };
            for (bid, restrict) in candidates {
                // Responder bids that win and lead to distinct trimmed budgets.
                let trump = budget.trump(bid);
                let overbids: Vec<Budget> = [trump, trump.succ()]
                    .into_iter()
                    .filter(|&c| responder.can_bid(c))
                    .collect();
                let mut overbid = Vec::new();
                let mut admissible = true;
                'outer: for &c in &overbids {
                    let after = budget.checked_add(c).expect("within total");
                    for e in arena.neighbors(v) {
                        match at_or_above(e.target, after) {
                            Some(q) => overbid.push((q, e.weight)),
                            None => {
                                admissible = false;
                                break 'outer;
                            }
                        }
                    }
                }
                if !admissible {
                    continue;
                }
                let mut choices: Vec<(Option<usize>, Option<usize>)> = Vec::new();
                if bidding_winner(budget, bid, Budget::ZERO) == Player::Pres {
                    let after = budget.checked_sub(bid).expect("legal bid");
                    for e in arena.neighbors(v) {
                        if restrict.as_ref().is_some_and(|a| !a.contains(&e.target)) {
                            continue;
                        }
                        if let Some(q) = at_or_above(e.target, after) {
                            choices.push((Some(e.target), Some(q)));
                        }
                    }
                } else {
                    choices.push((None, None));
                }
                for (choice, q) in choices {
                    let r = nodes.len();
                    nodes.push(Node::Response { bid, choice, parent: p });
                    maximiser.push(!mover_max);
                    let mut out = Vec::with_capacity(overbid.len() + 1);
                    if let (Some(u), Some(q)) = (choice, q) {
                        out.push((q, arena.weight(v, u).unwrap()));
                    }
                    out.extend_from_slice(&overbid);
                    succ.push(out);
                    succ[p].push((r, 0));
                }
            }
            if succ[p].is_empty() {
                succ[p].push((p, stuck_weight));
            }
        }
    }
    Ok(TurnBasedGame {
        side,
        nodes,
        succ,
        maximiser,
        live,
    })
}

/// Least initial credit for Pres at every node, `+∞` where Cons wins.
pub fn solve_turn_based(g: &TurnBasedGame) -> Vec<Energy> {
    solve_with(g, |_, _| true)
}

fn solve_with(g: &TurnBasedGame, keep: impl Fn(usize, usize) -> bool) -> Vec<Energy> {
    let bound = g.num_nodes() as u64 * g.max_weight();
    let mut f = vec![Energy::ZERO; g.num_nodes()];
    loop {
        let mut changed = false;
        let mut next = f.clone();
        for x in 0..g.num_nodes() {
            let options = g.succ[x]
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(x, *i))
                .map(|(_, &(y, w))| f[y].before_edge(w));
            let v = if g.maximiser[x] { options.max() } else { options.min() };
            let v = v.unwrap_or(Energy::ZERO).trim(bound);
            if v != f[x] {
                changed = true;
            }
            next[x] = v;
        }
        f = next;
        if !changed {
            return f;
        }
    }
}

/// Successor index chosen at every position node owned by the mover.
///
/// For a minimising mover this is the argmin of the requirement. For a
/// maximising mover, edges are pruned one at a time while the set of nodes
/// it wins stays the same, which leaves a memoryless winning choice.
pub fn mover_choices(g: &TurnBasedGame, sol: &[Energy]) -> Vec<usize> {
    let positions = g.num_positions();
    let maximise = g.side == Side::Cons;
    if !maximise {
        return (0..positions)
            .map(|x| {
                let s = &g.succ[x];
                (0..s.len()).min_by_key(|&i| sol[s[i].0].before_edge(s[i].1)).unwrap()
            })
            .collect();
    }
    let winning: Vec<bool> = sol.iter().map(|e| !e.is_finite()).collect();
    let mut removed: Vec<Vec<bool>> = g.succ.iter().map(|s| vec![false; s.len()]).collect();
    for x in 0..positions {
        if !winning[x] {
            continue;
        }
        for i in 0..g.succ[x].len() {
            let left = removed[x].iter().filter(|r| !**r).count();
            if left <= 1 {
                break;
            }
            removed[x][i] = true;
            let trial = solve_with(g, |a, j| !removed[a][j]);
            let still = (0..g.num_nodes()).all(|y| !winning[y] || !trial[y].is_finite());
            if !still {
                removed[x][i] = false;
            }
        }
    }
    (0..positions)
        .map(|x| {
            let s = &g.succ[x];
            if winning[x] {
                (0..s.len()).find(|&i| !removed[x][i]).unwrap()
            } else {
                (0..s.len()).max_by_key(|&i| (sol[s[i].0].before_edge(s[i].1), std::cmp::Reverse(i))).unwrap()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    /// The map itself violates the average property.
    AverageProperty { vertex: usize },
    /// Pres cannot win from `(vertex, budget)` although the map says she can.
    PresSideUnbounded { vertex: usize, budget: Budget },
    /// Cons cannot win from `(vertex, cons_budget)` although the complement says he can.
    ConsSideBounded { vertex: usize, cons_budget: Budget },
    /// The turn-based game could not be built.
    Structure(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(Rejection),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

fn live_positions(g: &TurnBasedGame, v: usize) -> impl Iterator<Item = (usize, Budget)> + '_ {
    [Slot::Base, Slot::Succ]
        .into_iter()
        .map(move |s| position_index(v, s))
        .filter(move |&p| g.live[p])
        .map(move |p| match g.nodes[p] {
            Node::Position { budget: Some(b), .. } => (p, b),
            _ => unreachable!(),
        })
}

/// Accepts exactly the true threshold map.
pub fn certify(arena: &Arena, t: &ThresholdMap) -> Verdict {
    certify_with(arena, t, MoverBids::default())
}

pub fn certify_with(arena: &Arena, t: &ThresholdMap, bids: MoverBids) -> Verdict {
    if let Err(v) = check_average(arena, t) {
        return Verdict::Reject(Rejection::AverageProperty { vertex: v.vertex });
    }
    let pres = match build_turn_based_with(arena, t, Side::Pres, bids) {
        Ok(g) => g,
        Err(e) => return Verdict::Reject(Rejection::Structure(e.to_string())),
    };
    let sol = solve_turn_based(&pres);
    for v in 0..arena.num_vertices() {
        for (p, budget) in live_positions(&pres, v) {
            if !sol[p].is_finite() {
                return Verdict::Reject(Rejection::PresSideUnbounded { vertex: v, budget });
            }
        }
    }
    let tc = complement(t);
    if let Err(v) = check_average(arena, &tc) {
        return Verdict::Reject(Rejection::AverageProperty { vertex: v.vertex });
    }
    let cons = match build_turn_based_with(arena, &tc, Side::Cons, bids) {
        Ok(g) => g,
        Err(e) => return Verdict::Reject(Rejection::Structure(e.to_string())),
    };
    let sol = solve_turn_based(&cons);
    for v in 0..arena.num_vertices() {
        for (p, cons_budget) in live_positions(&cons, v) {
            if sol[p].is_finite() {
                return Verdict::Reject(Rejection::ConsSideBounded { vertex: v, cons_budget });
            }
        }
    }
    Verdict::Accept
}

/// Whether `Th(v) ⪰ level`, computed from the fixed point and checked with [`certify`].
pub fn decide_threshold(arena: &Arena, v: usize, level: Budget) -> bool {
    let fp = crate::fixpoint::solve_energy(arena);
    let th = crate::thresholds::thresholds(arena, &fp);
    assert!(
        certify(arena, &th).is_accept(),
        "computed thresholds failed certification"
    );
    th.get(v) >= level
}

/// Lifts the mover's memoryless choice in `g` to a positional bidding strategy.
///
/// `t` is the map `g` was built from: `Th` for the Pres side, `Th'` for the
/// Cons side. At `(v, B)` with the mover's budget at least `t(v)` the
/// strategy plays the turn-based choice at `(v, relativebud(t, v, B))`.
pub fn extract_positional(
    arena: &Arena,
    t: &ThresholdMap,
    g: &TurnBasedGame,
    sol: &[Energy],
) -> Result<PositionalStrategy, TurnBasedError> {
    let choices = mover_choices(g, sol);
    let player = g.side.mover();
    let k = arena.total_budget();
    Ok(PositionalStrategy::from_fn(arena, player, |cfg: &Configuration| {
        let budget = cfg.budget_of(player, k);
        let rel = relativebud(t, cfg.vertex, budget).ok()?;
        let slot = if rel == t.get(cfg.vertex) { Slot::Base } else { Slot::Succ };
        let p = position_index(cfg.vertex, slot);
        let (r, _) = g.succ[p][choices[p]];
        let Node::Response { bid, choice, .. } = g.nodes[r] else {
            return None;
        };
        let target = choice.unwrap_or(arena.neighbors(cfg.vertex)[0].target);
        Some(Action::new(bid, target))
    }))
}

/// Certified positional strategies for both players.
pub fn positional_strategies(arena: &Arena, th: &ThresholdMap) -> Result<(PositionalStrategy, PositionalStrategy), TurnBasedError> {
    let gp = build_turn_based(arena, th, Side::Pres)?;
    let sp = solve_turn_based(&gp);
    let pres = extract_positional(arena, th, &gp, &sp)?;
    let tc = complement(th);
    let gc = build_turn_based(arena, &tc, Side::Cons)?;
    let sc = solve_turn_based(&gc);
    let cons = extract_positional(arena, &tc, &gc, &sc)?;
    Ok((pres, cons))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixpoint::solve_energy;
    use crate::games::{budget_ladder, self_loop};
    use crate::thresholds::thresholds;

    #[test]
    fn zero_loop_structure() {
        let a = self_loop(0, 2);
        let th = thresholds(&a, &solve_energy(&a));
        let g = build_turn_based_with(&a, &th, Side::Pres, MoverBids::Prescribed).unwrap();
        assert_eq!(g.num_positions(), 3);
        assert_eq!(g.num_responses(), 2);
        assert!(solve_turn_based(&g).iter().all(|e| *e == Energy::ZERO));
        // At 0* the mover may also bid a plain 0 and lose the bidding.
        let g = build_turn_based(&a, &th, Side::Pres).unwrap();
        assert_eq!(g.num_responses(), 3);
        assert!(solve_turn_based(&g).iter().all(|e| *e == Energy::ZERO));
    }

    #[test]
    fn negative_loop_certifies_top() {
        let a = self_loop(-1, 2);
        let th = thresholds(&a, &solve_energy(&a));
        assert!(th.is_top(0));
        assert_eq!(certify(&a, &th), Verdict::Accept);
        let wrong = ThresholdMap::new(2, vec![Budget::ZERO]).unwrap();
        assert!(!certify(&a, &wrong).is_accept());
    }

    #[test]
    fn ladder_round_trip() {
        let a = budget_ladder();
        let th = thresholds(&a, &solve_energy(&a));
        let g = build_turn_based(&a, &th, Side::Pres).unwrap();
        assert_eq!(g.num_positions(), 3 * a.num_vertices());
        assert_eq!(certify(&a, &th), Verdict::Accept);
    }

    #[test]
    fn prescribed_bids_lose_on_the_ladder() {
        // At (v1, 0*) the prescribed bid is 0*, which hands over the
        // advantage; Cons answers at (v2, 0) with 0* and the loop v1 v2
        // costs one unit per round. Bidding a plain 0 at (v1, 0*) avoids it.
        let a = budget_ladder();
        let th = thresholds(&a, &solve_energy(&a));
        assert!(th.values().iter().all(|b| *b == Budget::ZERO));
        assert_eq!(
            certify_with(&a, &th, MoverBids::Prescribed),
            Verdict::Reject(Rejection::PresSideUnbounded {
                vertex: 0,
                budget: Budget::ZERO
            })
        );
    }

    #[test]
    fn decide_examples() {
        assert!(decide_threshold(&self_loop(0, 2), 0, Budget::ZERO));
        assert!(decide_threshold(&self_loop(-1, 2), 0, "2*".parse().unwrap()));
        assert!(!decide_threshold(&budget_ladder(), 0, "2".parse().unwrap()));
    }
}

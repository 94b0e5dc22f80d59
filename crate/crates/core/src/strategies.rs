//! Strategies for both players.
//!
//! Pres: `σ_VI` (in [`crate::fixpoint`]), the budget-agnostic `σ_agn`, and
//! lifted turn-based strategies. Cons: `τ_n` for the truncated game, the
//! cycle-skipping `τ`, and the budget-agnostic `τ_agn`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::arena::Arena;
use crate::bidding::{bidding_winner, Action, Configuration, Player, Transition};
use crate::budget::Budget;
use crate::fixpoint::{sigma_vi_action, FixedPointResult};
use crate::horizon::{mu_step, mu_zero, Energy, EnergyTable};
use crate::thresholds::{complement, relativebud, thresholds, ThresholdError, ThresholdMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("strategy undefined at vertex {} with Pres budget {}", .0.vertex, .0.pres_budget)]
    Undefined(Configuration),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Positional,
    Memoryful,
}

/// A strategy for one player. The engine calls `decide` before the bidding
/// and `observe` with the resolved transition afterwards.
pub trait Strategy {
    fn player(&self) -> Player;

    fn kind(&self) -> StrategyKind;

    fn decide(&mut self, arena: &Arena, cfg: &Configuration, energy: i64) -> Result<Action, StrategyError>;

    fn observe(&mut self, _arena: &Arena, _from: &Configuration, _t: &Transition) {}

    /// Fingerprint of the memory, `None` when it cannot be compared (e.g. an RNG).
    fn memory_key(&self) -> Option<u64> {
        Some(0)
    }
}

/// A table `(vertex, Pres budget) -> action` for one player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionalStrategy {
    player: Player,
    num_budgets: usize,
    table: Vec<Option<Action>>,
}

impl PositionalStrategy {
    pub fn from_fn(
        arena: &Arena,
        player: Player,
        mut f: impl FnMut(&Configuration) -> Option<Action>,
    ) -> PositionalStrategy {
        let mut table = Vec::with_capacity(arena.num_configurations());
        for v in 0..arena.num_vertices() {
            for b in arena.budgets() {
                table.push(f(&Configuration::new(v, b)));
            }
        }
        PositionalStrategy {
            player,
            num_budgets: arena.num_budgets(),
            table,
        }
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn action_at(&self, cfg: &Configuration) -> Option<Action> {
        self.table[cfg.vertex * self.num_budgets + cfg.pres_budget.ordinal() as usize]
    }

    /// The same strategy played by the other player: the entry for Pres
    /// budget `B` is the entry of `self` at `k* ⊖ B`.
    pub fn as_opponent(&self, arena: &Arena) -> PositionalStrategy {
        let k = arena.total_budget();
        PositionalStrategy::from_fn(arena, self.player.opponent(), |cfg| {
            self.action_at(&Configuration::new(cfg.vertex, cfg.pres_budget.complement(k)))
        })
    }

    /// Configurations where the strategy is defined.
    pub fn domain(&self) -> impl Iterator<Item = Configuration> + '_ {
        self.table.iter().enumerate().filter_map(move |(i, a)| {
            a.map(|_| {
                Configuration::new(
                    i / self.num_budgets,
                    Budget::from_ordinal((i % self.num_budgets) as u64),
                )
            })
        })
    }
}

impl Strategy for PositionalStrategy {
    fn player(&self) -> Player {
        self.player
    }

    fn kind(&self) -> StrategyKind {
        StrategyKind::Positional
    }

    fn decide(&mut self, _arena: &Arena, cfg: &Configuration, _energy: i64) -> Result<Action, StrategyError> {
        self.action_at(cfg).ok_or(StrategyError::Undefined(*cfg))
    }
}

/// `σ_agn(v, B) = σ_VI(v, relativebud(v, B))`, defined where `B ⪰ Th(v)`.
pub fn sigma_agn(arena: &Arena, fp: &FixedPointResult, th: &ThresholdMap) -> PositionalStrategy {
    PositionalStrategy::from_fn(arena, Player::Pres, |cfg| {
        let rel = relativebud(th, cfg.vertex, cfg.pres_budget).ok()?;
        sigma_vi_action(arena, fp, &Configuration::new(cfg.vertex, rel))
    })
}

/// Uniformly random legal actions.
#[derive(Debug, Clone)]
pub struct RandomStrategy {
    player: Player,
    rng: StdRng,
}

impl RandomStrategy {
    pub fn new(player: Player, seed: u64) -> RandomStrategy {
        RandomStrategy {
            player,
            rng: StdRng::seed_from_u64(seed),
        }
    }
}

impl Strategy for RandomStrategy {
    fn player(&self) -> Player {
        self.player
    }

    fn kind(&self) -> StrategyKind {
        StrategyKind::Memoryful
    }

    fn decide(&mut self, arena: &Arena, cfg: &Configuration, _energy: i64) -> Result<Action, StrategyError> {
        let budget = cfg.budget_of(self.player, arena.total_budget());
        let bid = Budget::from_ordinal(self.rng.gen_range(0..=budget.ordinal()));
        let bid = if budget.can_bid(bid) { bid } else { bid.pred().unwrap() };
        let target = arena.neighbors(cfg.vertex).choose(&mut self.rng).unwrap().target;
        Ok(Action::new(bid, target))
    }

    fn memory_key(&self) -> Option<u64> {
        None
    }
}

/// Raw horizon tables `μ_0, μ_1, ...`, extended on demand.
#[derive(Debug, Clone)]
pub struct HorizonTables {
    tables: Vec<EnergyTable>,
}

impl HorizonTables {
    pub fn new(arena: &Arena) -> HorizonTables {
        HorizonTables {
            tables: vec![mu_zero(arena)],
        }
    }

    pub fn horizon(&self) -> u64 {
        self.tables.len() as u64 - 1
    }

    pub fn ensure(&mut self, arena: &Arena, n: u64) {
        while self.horizon() < n {
            let next = mu_step(arena, self.tables.last().unwrap());
            self.tables.push(next);
        }
    }

    pub fn table(&self, n: u64) -> &EnergyTable {
        &self.tables[n as usize]
    }

    pub fn get(&self, n: u64, v: usize, b: Budget) -> Energy {
        self.tables[n as usize].get(v, b)
    }

    /// Smallest `n <= cap` with `pred(μ_n(v, b))`, extending the tables as needed.
    pub fn first_horizon(
        &mut self,
        arena: &Arena,
        v: usize,
        b: Budget,
        cap: u64,
        pred: impl Fn(Energy) -> bool,
    ) -> Option<u64> {
        let mut n = 0;
        loop {
            self.ensure(arena, n);
            if pred(self.get(n, v, b)) {
                return Some(n);
            }
            if n >= cap {
                return None;
            }
            n += 1;
        }
    }

    /// A Cons action winning the `m`-step game from `(v, B)` with Pres
    /// energy `μ_m(v, B) - 1`, against every Pres action.
    ///
    /// Candidates are tried by bid ordinal, then target index, so Cons
    /// concedes the bidding with a zero bid whenever that already wins.
    pub fn cons_witness(&self, arena: &Arena, v: usize, m: u64, budget: Budget) -> Option<Action> {
        if m == 0 || m > self.horizon() {
            return None;
        }
        let e = self.get(m, v, budget).value()?.checked_sub(1)? as i128;
        let prev = self.table(m - 1);
        let k = arena.total_budget();
        let cons_wins_at = |u: usize, w: i64, b: Budget| {
            let next = e + w as i128;
            match prev.get(u, b).value() {
                None => true,
                Some(need) => next < need as i128,
            }
        };
        for c in budget.complement(k).legal_bids() {
            let mut pres_can_lose = false;
            let mut pres_wins_ok = true;
            for b in budget.legal_bids() {
                match bidding_winner(budget, b, c) {
                    Player::Pres => {
                        let after = budget.checked_sub(b).unwrap();
                        if !arena
                            .neighbors(v)
                            .iter()
                            .all(|ed| cons_wins_at(ed.target, ed.weight, after))
                        {
                            pres_wins_ok = false;
                            break;
                        }
                    }
                    Player::Cons => pres_can_lose = true,
                }
            }
            if !pres_wins_ok {
                continue;
            }
            if !pres_can_lose {
                return Some(Action::new(c, arena.neighbors(v)[0].target));
            }
            let after = budget.checked_add(c).unwrap();
            if let Some(ed) = arena
                .neighbors(v)
                .iter()
                .find(|ed| cons_wins_at(ed.target, ed.weight, after))
            {
                return Some(Action::new(c, ed.target));
            }
        }
        None
    }
}

/// Cons strategy for the `n`-step game: at counter `m` it plays the witness
/// for `(v, m, B)`, as if Pres held the largest energy Cons still beats.
/// Where no witness exists it bids zero towards the first neighbour.
#[derive(Debug, Clone)]
pub struct TauFinite {
    tables: HorizonTables,
    remaining: u64,
}

pub fn tau_finite(arena: &Arena, n: u64) -> TauFinite {
    let mut tables = HorizonTables::new(arena);
    tables.ensure(arena, n);
    TauFinite { tables, remaining: n }
}

impl TauFinite {
    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    pub fn tables(&self) -> &HorizonTables {
        &self.tables
    }
}

impl Strategy for TauFinite {
    fn player(&self) -> Player {
        Player::Cons
    }

    fn kind(&self) -> StrategyKind {
        StrategyKind::Memoryful
    }

    fn decide(&mut self, arena: &Arena, cfg: &Configuration, _energy: i64) -> Result<Action, StrategyError> {
        Ok(self
            .tables
            .cons_witness(arena, cfg.vertex, self.remaining, cfg.pres_budget)
            .unwrap_or(Action::new(Budget::ZERO, arena.neighbors(cfg.vertex)[0].target)))
    }

    fn observe(&mut self, _arena: &Arena, _from: &Configuration, _t: &Transition) {
        self.remaining = self.remaining.saturating_sub(1);
    }

    fn memory_key(&self) -> Option<u64> {
        Some(self.remaining)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct SimState {
    cfg: Configuration,
    energy: i64,
    remaining: u64,
}

/// Level above which a horizon requirement certifies an infinite threshold
/// and forces a repeated configuration on the way down.
pub fn skip_level(arena: &Arena, fp: &FixedPointResult) -> u64 {
    crate::fixpoint::safe_trim_bound(arena).max(fp.trim_bound)
}

/// Cycle-skipping Cons strategy.
///
/// It simulates `τ_n` on a copy of the play. When the simulated play returns
/// to a configuration with less simulated energy than before, the loop is cut
/// out and the simulation resumes from the earlier visit, so the real play
/// keeps paying for negative loops while the simulation never runs out.
#[derive(Debug, Clone)]
pub struct TauCycleSkip {
    tables: HorizonTables,
    energy: EnergyTable,
    level: u64,
    history: Vec<SimState>,
    idle: bool,
    initial_horizon: u64,
    excisions: u64,
    reseeds: u64,
}

impl TauCycleSkip {
    /// Strategy for a play from `init` where Pres starts with `energy < Energy(init)`.
    pub fn new(arena: &Arena, fp: &FixedPointResult, init: Configuration, energy: u64) -> Result<TauCycleSkip, StrategyError> {
        if Energy::finite(energy) >= fp.at(&init) {
            return Err(StrategyError::Contract(format!(
                "Pres wins from vertex {} budget {} with energy {energy}",
                init.vertex, init.pres_budget
            )));
        }
        TauCycleSkip::adversary(arena, fp, init)
    }

    /// The same strategy without the energy contract. It always plays as if
    /// Pres held `Energy(init) − 1`, so it is a legitimate opponent for any
    /// energy, just not a winning one above that.
    pub fn adversary(arena: &Arena, fp: &FixedPointResult, init: Configuration) -> Result<TauCycleSkip, StrategyError> {
        let mut s = TauCycleSkip {
            tables: HorizonTables::new(arena),
            energy: fp.energy.clone(),
            level: skip_level(arena, fp),
            history: Vec::new(),
            idle: false,
            initial_horizon: 0,
            excisions: 0,
            reseeds: 0,
        };
        s.seed(arena, init)?;
        s.initial_horizon = s.history.first().map_or(0, |h| h.remaining);
        s.reseeds = 0;
        Ok(s)
    }

    /// Horizon `n` of the simulation started at the initial configuration.
    pub fn initial_horizon(&self) -> u64 {
        self.initial_horizon
    }

    pub fn excisions(&self) -> u64 {
        self.excisions
    }

    /// Number of times the simulation had to be restarted at the real configuration.
    pub fn reseeds(&self) -> u64 {
        self.reseeds
    }

    fn horizon_cap(&self, arena: &Arena) -> u64 {
        let n = arena.num_configurations() as u64;
        n.saturating_mul(self.level + 2).saturating_add(n)
    }

    fn seed(&mut self, arena: &Arena, cfg: Configuration) -> Result<(), StrategyError> {
        self.reseeds += 1;
        self.history.clear();
        self.idle = false;
        let target = self.energy.at(&cfg);
        let cap = self.horizon_cap(arena);
        let (v, b) = (cfg.vertex, cfg.pres_budget);
        let n = match target.value() {
            Some(0) => {
                self.idle = true;
                return Ok(());
            }
            Some(e) => self.tables.first_horizon(arena, v, b, cap, |x| x >= Energy::finite(e)),
            None => {
                let level = Energy::finite(self.level);
                self.tables.first_horizon(arena, v, b, cap, |x| x > level)
            }
        };
        let n = n.ok_or_else(|| {
            StrategyError::Internal(format!("no horizon up to {cap} reaches the requirement at {cfg:?}"))
        })?;
        let need = self.tables.get(n, v, b).value().unwrap();
        self.history.push(SimState {
            cfg,
            energy: need as i64 - 1,
            remaining: n,
        });
        Ok(())
    }

    fn in_sync(&self, cfg: &Configuration) -> bool {
        match self.history.last() {
            Some(top) => top.cfg == *cfg && top.energy >= 0 && top.remaining > 0,
            None => false,
        }
    }
}

impl Strategy for TauCycleSkip {
    fn player(&self) -> Player {
        Player::Cons
    }

    fn kind(&self) -> StrategyKind {
        StrategyKind::Memoryful
    }

    fn decide(&mut self, arena: &Arena, cfg: &Configuration, _energy: i64) -> Result<Action, StrategyError> {
        if !self.idle && !self.in_sync(cfg) {
            self.seed(arena, *cfg)?;
        }
        if self.idle {
            return Ok(Action::new(Budget::ZERO, arena.neighbors(cfg.vertex)[0].target));
        }
        let top = *self.history.last().unwrap();
        if let Some(a) = self.tables.cons_witness(arena, cfg.vertex, top.remaining, cfg.pres_budget) {
            return Ok(a);
        }
        self.seed(arena, *cfg)?;
        if self.idle {
            return Ok(Action::new(Budget::ZERO, arena.neighbors(cfg.vertex)[0].target));
        }
        let top = *self.history.last().unwrap();
        self.tables
            .cons_witness(arena, cfg.vertex, top.remaining, cfg.pres_budget)
            .ok_or(StrategyError::Undefined(*cfg))
    }

    fn observe(&mut self, _arena: &Arena, _from: &Configuration, t: &Transition) {
        if self.idle {
            self.idle = false;
            return;
        }
        let Some(top) = self.history.last().copied() else {
            return;
        };
        let state = SimState {
            cfg: t.next,
            energy: top.energy + t.weight,
            remaining: top.remaining.saturating_sub(1),
        };
        let earlier = self.history.iter().rposition(|s| s.cfg == t.next);
        match earlier {
            Some(j) if self.history[j].energy > state.energy => {
                self.history.truncate(j + 1);
                self.excisions += 1;
            }
            _ => self.history.push(state),
        }
    }

    fn memory_key(&self) -> Option<u64> {
        let mut h = DefaultHasher::new();
        self.idle.hash(&mut h);
        self.history.hash(&mut h);
        Some(h.finish())
    }
}

/// Budget-agnostic Cons strategy.
///
/// With simulated energy `e` above the level `L` it acts as `τ_{P(e)}` from
/// the trimmed Cons budget, where `P(e)` is the least horizon whose Cons
/// guarantee at that budget reaches `e`. The simulated energy starts at
/// `2L + 1`; negative loops are excised as in [`TauCycleSkip`].
#[derive(Debug, Clone)]
pub struct TauAgn {
    tables: HorizonTables,
    th_cons: ThresholdMap,
    level: u64,
    history: Vec<(Configuration, i64)>,
    excisions: u64,
    resets: u64,
}

impl TauAgn {
    pub fn start_energy(&self) -> i64 {
        2 * self.level as i64 + 1
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn cons_thresholds(&self) -> &ThresholdMap {
        &self.th_cons
    }

    pub fn excisions(&self) -> u64 {
        self.excisions
    }

    pub fn resets(&self) -> u64 {
        self.resets
    }

    /// Simulated energy at the current step.
    pub fn simulated_energy(&self) -> i64 {
        self.history.last().map_or(self.start_energy(), |h| h.1)
    }

    fn horizon_cap(&self, arena: &Arena, e: u64) -> u64 {
        let n = arena.num_configurations() as u64;
        let per = self.level.max(n).max(1);
        n.saturating_mul(self.level + 2)
            .saturating_add((e + 1).saturating_mul(per))
    }

    /// `P(e)` at `(v, B')` for a Cons budget `B' ⪰ Th'(v)`.
    pub fn p_of_e(&mut self, arena: &Arena, v: usize, cons_budget: Budget, e: u64) -> Result<u64, StrategyError> {
        let rel = relativebud(&self.th_cons, v, cons_budget)?;
        let pres = rel.complement(arena.total_budget());
        let cap = self.horizon_cap(arena, e);
        let want = Energy::finite(e + 1);
        self.tables
            .first_horizon(arena, v, pres, cap, |x| x >= want)
            .ok_or_else(|| StrategyError::Internal(format!("P({e}) not reached within {cap} steps")))
    }

    /// `τ'_agn` at `(v, e, B')`.
    pub fn act(&mut self, arena: &Arena, v: usize, e: i64, cons_budget: Budget) -> Result<Action, StrategyError> {
        if e <= self.level as i64 {
            return Err(StrategyError::Contract(format!(
                "simulated energy {e} is not above the level {}",
                self.level
            )));
        }
        let rel = relativebud(&self.th_cons, v, cons_budget)?;
        let pres = rel.complement(arena.total_budget());
        let m = self.p_of_e(arena, v, rel, e as u64)?;
        self.tables
            .cons_witness(arena, v, m, pres)
            .ok_or(StrategyError::Undefined(Configuration::new(v, pres)))
    }

    /// `ψ(e) = Σ_{i=0..k} P(e_i)` with `e_{i+1} = e_i + W·P(e_i)`, where `P`
    /// is maximised over vertices and trimmed budgets.
    pub fn psi(&mut self, arena: &Arena, e: u64) -> Result<u64, StrategyError> {
        let k = arena.total_budget();
        let mut total = 0u64;
        let mut cur = e;
        for _ in 0..=k {
            let mut p = 0;
            for v in 0..arena.num_vertices() {
                if self.th_cons.is_top(v) {
                    continue;
                }
                let base = self.th_cons.get(v);
                for b in [base, base.succ()] {
                    if b <= Budget::total(k) {
                        p = p.max(self.p_of_e(arena, v, b, cur)?);
                    }
                }
            }
            total = total.saturating_add(p);
            cur = cur.saturating_add(arena.max_weight().saturating_mul(p));
        }
        Ok(total)
    }
}

pub fn tau_agn(arena: &Arena, fp: &FixedPointResult, th_cons: &ThresholdMap) -> TauAgn {
    TauAgn {
        tables: HorizonTables::new(arena),
        th_cons: th_cons.clone(),
        level: skip_level(arena, fp),
        history: Vec::new(),
        excisions: 0,
        resets: 0,
    }
}

/// `τ_agn` with `Th'` computed from the fixed point.
pub fn tau_agn_from(arena: &Arena, fp: &FixedPointResult) -> TauAgn {
    tau_agn(arena, fp, &complement(&thresholds(arena, fp)))
}

impl Strategy for TauAgn {
    fn player(&self) -> Player {
        Player::Cons
    }

    fn kind(&self) -> StrategyKind {
        StrategyKind::Memoryful
    }

    fn decide(&mut self, arena: &Arena, cfg: &Configuration, _energy: i64) -> Result<Action, StrategyError> {
        if self.history.last().map(|h| h.0) != Some(*cfg) {
            self.history.clear();
            self.history.push((*cfg, self.start_energy()));
        }
        let e = self.simulated_energy();
        self.act(arena, cfg.vertex, e, cfg.cons_budget(arena.total_budget()))
    }

    fn observe(&mut self, _arena: &Arena, _from: &Configuration, t: &Transition) {
        let e = self.simulated_energy() + t.weight;
        match self.history.iter().rposition(|h| h.0 == t.next) {
            Some(j) if self.history[j].1 > e => {
                self.history.truncate(j + 1);
                self.excisions += 1;
            }
            _ if e <= self.level as i64 => {
                self.history.clear();
                self.history.push((t.next, self.start_energy()));
                self.resets += 1;
            }
            _ => self.history.push((t.next, e)),
        }
    }

    fn memory_key(&self) -> Option<u64> {
        let mut h = DefaultHasher::new();
        self.history.hash(&mut h);
        Some(h.finish())
    }
}

/// Spare change `|B_i ⊖ T(v_i)|` of `player` along a sequence of configurations.
pub fn spare_changes(
    arena: &Arena,
    t: &ThresholdMap,
    player: Player,
    configs: impl IntoIterator<Item = Configuration>,
) -> Result<Vec<u64>, ThresholdError> {
    let k = arena.total_budget();
    configs
        .into_iter()
        .map(|c| crate::thresholds::spare_change(t, c.vertex, c.budget_of(player, k)))
        .collect()
}

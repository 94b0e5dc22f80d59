//! Threshold budgets, the average property, and the budget-agnostic bid rule.

use thiserror::Error;

use crate::arena::Arena;
use crate::budget::Budget;
use crate::fixpoint::FixedPointResult;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThresholdError {
    #[error("budget {budget} at vertex {vertex} is below the threshold {threshold}")]
    BelowThreshold {
        vertex: usize,
        budget: Budget,
        threshold: Budget,
    },
    #[error("vertex {0} has an unwinnable threshold")]
    Unwinnable(usize),
    #[error("threshold map violates the average property at vertex {0}")]
    NotAverage(usize),
    #[error("threshold map has {got} entries, arena has {want} vertices")]
    WrongSize { got: usize, want: usize },
    #[error("threshold {value} at vertex {vertex} exceeds k+1")]
    OutOfRange { vertex: usize, value: Budget },
}

/// A map `V -> [k] ∪ {k+1}`; `k+1` is stored as the plain budget `k+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThresholdMap {
    k: u64,
    values: Vec<Budget>,
}

impl ThresholdMap {
    pub fn new(k: u64, values: Vec<Budget>) -> Result<ThresholdMap, ThresholdError> {
        let top = Budget::top(k);
        for (vertex, &value) in values.iter().enumerate() {
            if value > top {
                return Err(ThresholdError::OutOfRange { vertex, value });
            }
        }
        Ok(ThresholdMap { k, values })
    }

    /// Checks the map against the arena's shape.
    pub fn for_arena(arena: &Arena, values: Vec<Budget>) -> Result<ThresholdMap, ThresholdError> {
        if values.len() != arena.num_vertices() {
            return Err(ThresholdError::WrongSize {
                got: values.len(),
                want: arena.num_vertices(),
            });
        }
        ThresholdMap::new(arena.total_budget(), values)
    }

    pub fn total_budget(&self) -> u64 {
        self.k
    }

    pub fn get(&self, v: usize) -> Budget {
        self.values[v]
    }

    pub fn top(&self) -> Budget {
        Budget::top(self.k)
    }

    pub fn is_top(&self, v: usize) -> bool {
        self.values[v] == self.top()
    }

    pub fn values(&self) -> &[Budget] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn thresholds(arena: &Arena, fp: &FixedPointResult) -> ThresholdMap {
    let values = (0..arena.num_vertices())
        .map(|v| {
            arena
                .budgets()
                .find(|&b| fp.get(v, b).is_finite())
                .unwrap_or_else(|| arena.top())
        })
        .collect();
    ThresholdMap::new(arena.total_budget(), values).expect("values within range")
}

/// Neighbors with the largest and the smallest threshold, lowest index on ties.
pub fn extremes(arena: &Arena, t: &ThresholdMap, v: usize) -> (usize, usize) {
    let mut plus = None;
    let mut minus = None;
    for e in arena.neighbors(v) {
        let u = e.target;
        if plus.is_none_or(|p| t.get(u) > t.get(p)) {
            plus = Some(u);
        }
        if minus.is_none_or(|m| t.get(u) < t.get(m)) {
            minus = Some(u);
        }
    }
    (plus.unwrap(), minus.unwrap())
}

/// The value the average property prescribes at `v`.
pub fn average_value(arena: &Arena, t: &ThresholdMap, v: usize) -> Budget {
    let (plus, minus) = extremes(arena, t, v);
    let low = t.get(minus);
    let sum = t.get(plus).integral() + low.integral();
    let half = sum / 2;
    match (sum.is_multiple_of(2), low.has_advantage()) {
        (true, false) => Budget::new(half, false),
        (false, true) => Budget::new(half + 1, false),
        _ => Budget::new(half, true),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AverageViolation {
    pub vertex: usize,
    pub expected: Budget,
    pub actual: Budget,
}

/// Checks the average property at every vertex; reports the first failure.
pub fn check_average(arena: &Arena, t: &ThresholdMap) -> Result<(), AverageViolation> {
    for v in 0..arena.num_vertices() {
        let expected = average_value(arena, t, v);
        if expected != t.get(v) {
            return Err(AverageViolation {
                vertex: v,
                expected,
                actual: t.get(v),
            });
        }
    }
    Ok(())
}

/// `T'(v) = (k+1) ⊖ T(v)`, the thresholds from the opponent's side.
pub fn complement(t: &ThresholdMap) -> ThresholdMap {
    let top = t.top().ordinal();
    ThresholdMap {
        k: t.k,
        values: t
            .values
            .iter()
            .map(|b| Budget::from_ordinal(top - b.ordinal()))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BidPlan {
    /// `b^T(v)`. `None` when the prescribed bid falls one ordinal below zero,
    /// which happens when `T(v) = T(v⁻)` is starred; the holder then bids a
    /// plain 0 and lets the opponent move.
    pub base_bid: Option<Budget>,
    pub allowed: Vec<usize>,
    pub plus: usize,
    pub minus: usize,
}

pub fn bid_plan(arena: &Arena, t: &ThresholdMap, v: usize) -> Result<BidPlan, ThresholdError> {
    if t.is_top(v) {
        return Err(ThresholdError::Unwinnable(v));
    }
    let (plus, minus) = extremes(arena, t, v);
    let low = t.get(minus);
    let here = t.get(v).ordinal() as i64;
    let base = if low.has_advantage() {
        here - 2 * (low.integral() as i64 + 1)
    } else {
        here - low.ordinal() as i64
    };
    let base_bid = match base {
        b if b >= 0 => Some(Budget::from_ordinal(b as u64)),
        -1 if low.has_advantage() => None,
        _ => return Err(ThresholdError::NotAverage(v)),
    };
    let allowed = arena
        .neighbors(v)
        .iter()
        .map(|e| e.target)
        .filter(|&u| {
            if low.has_advantage() {
                t.get(u) <= low.succ()
            } else {
                t.get(u) == low
            }
        })
        .collect();
    Ok(BidPlan {
        base_bid,
        allowed,
        plus,
        minus,
    })
}

fn require_above(t: &ThresholdMap, v: usize, budget: Budget) -> Result<(), ThresholdError> {
    if t.is_top(v) {
        return Err(ThresholdError::Unwinnable(v));
    }
    if budget < t.get(v) {
        return Err(ThresholdError::BelowThreshold {
            vertex: v,
            budget,
            threshold: t.get(v),
        });
    }
    Ok(())
}

/// Whichever of `T(v)`, `succ(T(v))` has the advantage bit of `budget`.
pub fn relativebud(t: &ThresholdMap, v: usize, budget: Budget) -> Result<Budget, ThresholdError> {
    require_above(t, v, budget)?;
    Ok(t.get(v).matching_advantage(budget))
}

/// The bid of the budget-agnostic rule at `(v, budget)`.
pub fn optbid(arena: &Arena, t: &ThresholdMap, v: usize, budget: Budget) -> Result<Budget, ThresholdError> {
    require_above(t, v, budget)?;
    Ok(plan_bid(&bid_plan(arena, t, v)?, budget))
}

/// `optbid` from an already computed plan.
pub fn plan_bid(plan: &BidPlan, budget: Budget) -> Budget {
    match plan.base_bid {
        Some(b) => b.matching_advantage(budget),
        None => Budget::ZERO,
    }
}

/// `|B ⊖ T(v)|`.
pub fn spare_change(t: &ThresholdMap, v: usize, budget: Budget) -> Result<u64, ThresholdError> {
    require_above(t, v, budget)?;
    Ok((budget.ordinal() - t.get(v).ordinal()) / 2)
}

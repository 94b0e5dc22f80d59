//! Budgets with a tie-breaking advantage.
//!
//! A budget is a natural number that may carry the advantage marker `*`.
//! The chain `0 < 0* < 1 < 1* < ...` is encoded by its ordinal
//! `2·integral + adv`, so addition and subtraction of budgets are plain
//! integer addition and subtraction of ordinals.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BudgetError {
    #[error("budget subtraction {lhs} - {rhs} underflows (illegal bid)")]
    Underflow { lhs: Budget, rhs: Budget },
    #[error("budget arithmetic overflowed the machine word")]
    Overflow,
    #[error("cannot parse budget {0:?}: expected INT or INT*")]
    Parse(String),
}

/// A budget in `N*`, stored as its ordinal.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Budget(u64);

impl Budget {
    pub const ZERO: Budget = Budget(0);

    pub fn new(integral: u64, adv: bool) -> Budget {
        Budget(integral * 2 + adv as u64)
    }

    pub const fn from_ordinal(ordinal: u64) -> Budget {
        Budget(ordinal)
    }

    pub const fn ordinal(self) -> u64 {
        self.0
    }

    /// The `|B|` part.
    pub const fn integral(self) -> u64 {
        self.0 / 2
    }

    pub const fn has_advantage(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn succ(self) -> Budget {
        Budget(self.0 + 1)
    }

    pub fn pred(self) -> Option<Budget> {
        self.0.checked_sub(1).map(Budget)
    }

    /// `x ⊕ y`.
    pub fn checked_add(self, other: Budget) -> Result<Budget, BudgetError> {
        self.0
            .checked_add(other.0)
            .map(Budget)
            .ok_or(BudgetError::Overflow)
    }

    /// `x ⊖ y`; fails when `y` exceeds `x`.
    pub fn checked_sub(self, other: Budget) -> Result<Budget, BudgetError> {
        self.0
            .checked_sub(other.0)
            .map(Budget)
            .ok_or(BudgetError::Underflow { lhs: self, rhs: other })
    }

    /// The total budget `k*` shared by the two players.
    pub fn total(k: u64) -> Budget {
        Budget::new(k, true)
    }

    /// The sentinel `k+1` used for unwinnable thresholds.
    pub fn top(k: u64) -> Budget {
        Budget::new(k + 1, false)
    }

    /// Whether a player holding `self` may place `bid`.
    pub fn can_bid(self, bid: Budget) -> bool {
        bid.0 <= self.0 && (!bid.has_advantage() || self.has_advantage())
    }

    /// All legal bids for a player holding `self`, in ordinal order.
    pub fn legal_bids(self) -> impl Iterator<Item = Budget> {
        let adv = self.has_advantage();
        (0..=self.0)
            .filter(move |o| adv || o & 1 == 0)
            .map(Budget)
    }

    /// The least bid beating `bid` when the bidder holds `self`.
    pub fn trump(self, bid: Budget) -> Budget {
        if self.has_advantage() && !bid.has_advantage() {
            bid
        } else {
            bid.succ()
        }
    }

    /// The opponent's budget `k* ⊖ self`.
    pub fn complement(self, k: u64) -> Budget {
        Budget(2 * k + 1 - self.0)
    }

    /// The budget among `self` and `succ(self)` whose advantage bit matches `like`.
    pub fn matching_advantage(self, like: Budget) -> Budget {
        if self.has_advantage() == like.has_advantage() {
            self
        } else {
            self.succ()
        }
    }
}

/// Cons budget for a Pres budget `b` when the total is `k*`.
pub fn cons_budget(k: u64, b: Budget) -> Budget {
    b.complement(k)
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.has_advantage() {
            write!(f, "{}*", self.integral())
        } else {
            write!(f, "{}", self.integral())
        }
    }
}

impl fmt::Debug for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Budget {
    type Err = BudgetError;

    fn from_str(s: &str) -> Result<Budget, BudgetError> {
        let t = s.trim();
        let (digits, adv) = match t.strip_suffix('*') {
            Some(d) => (d, true),
            None => (t, false),
        };
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(BudgetError::Parse(s.to_string()));
        }
        let n: u64 = digits.parse().map_err(|_| BudgetError::Parse(s.to_string()))?;
        n.checked_mul(2)
            .and_then(|x| x.checked_add(adv as u64))
            .map(Budget)
            .ok_or_else(|| BudgetError::Parse(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> Budget {
        s.parse().unwrap()
    }

    #[test]
    fn addition_examples() {
        assert_eq!(b("2*").checked_add(b("3")).unwrap(), b("5*"));
        assert_eq!(b("0").checked_add(b("0")).unwrap(), b("0"));
        assert_eq!(b("2*").checked_add(b("3*")).unwrap(), b("6"));
    }

    #[test]
    fn subtraction_examples() {
        assert_eq!(b("4*").checked_sub(b("2*")).unwrap(), b("2"));
        assert_eq!(b("4").checked_sub(b("2*")).unwrap(), b("1*"));
        assert_eq!(b("5").checked_sub(b("0")).unwrap(), b("5"));
        assert!(matches!(
            b("1").checked_sub(b("1*")),
            Err(BudgetError::Underflow { .. })
        ));
    }

    #[test]
    fn trump_examples() {
        assert_eq!(b("3*").trump(b("2")), b("2"));
        assert_eq!(b("3").trump(b("2")), b("2*"));
        assert_eq!(b("3*").trump(b("2*")), b("3"));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(cons_budget(5, b("1")), b("4*"));
        assert_eq!(cons_budget(5, b("5*")), b("0"));
        assert_eq!(cons_budget(1, b("0*")), b("1"));
    }

    #[test]
    fn parse_and_display() {
        for s in ["0", "0*", "17", "17*"] {
            assert_eq!(b(s).to_string(), s);
        }
        for bad in ["", "*", "x", "-1", "1**", "1 *"] {
            assert!(bad.parse::<Budget>().is_err(), "{bad}");
        }
    }

    #[test]
    fn legal_bids_respect_advantage() {
        let plain: Vec<_> = b("2").legal_bids().collect();
        assert_eq!(plain, vec![b("0"), b("1"), b("2")]);
        let starred: Vec<_> = b("1*").legal_bids().collect();
        assert_eq!(starred, vec![b("0"), b("0*"), b("1"), b("1*")]);
    }
}

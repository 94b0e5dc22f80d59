use std::collections::HashMap;

use thiserror::Error;

use crate::budget::Budget;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("arena has no vertices")]
    Empty,
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("vertex index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("duplicate edge {from:?} -> {to:?}")]
    DuplicateEdge { from: String, to: String },
    #[error("vertex {0:?} has no outgoing edge")]
    NoOutgoingEdge(String),
    #[error("total budget {0} is too large")]
    BudgetTooLarge(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub target: usize,
    pub weight: i64,
}

/// A weighted graph together with the total budget `k`.
///
/// Vertices are dense indices; successor lists are sorted by target index,
/// which is what every tie-break in the crate relies on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arena {
    names: Vec<String>,
    succ: Vec<Vec<Edge>>,
    k: u64,
    max_weight: u64,
}

/// Largest supported total budget. Tables have `2k+2` columns per vertex.
pub const MAX_TOTAL_BUDGET: u64 = 1 << 40;

impl Arena {
    pub fn new(
        names: Vec<String>,
        edges: &[(usize, usize, i64)],
        total_budget: u64,
    ) -> Result<Arena, ArenaError> {
        if names.is_empty() {
            return Err(ArenaError::Empty);
        }
        if total_budget > MAX_TOTAL_BUDGET {
            return Err(ArenaError::BudgetTooLarge(total_budget));
        }
        let mut seen = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if seen.insert(n.clone(), i).is_some() {
                return Err(ArenaError::DuplicateVertex(n.clone()));
            }
        }
        let n = names.len();
        let mut succ: Vec<Vec<Edge>> = vec![Vec::new(); n];
        let mut max_weight = 0u64;
        for &(from, to, weight) in edges {
            if from >= n {
                return Err(ArenaError::IndexOutOfRange(from));
            }
            if to >= n {
                return Err(ArenaError::IndexOutOfRange(to));
            }
            if succ[from].iter().any(|e| e.target == to) {
                return Err(ArenaError::DuplicateEdge {
                    from: names[from].clone(),
                    to: names[to].clone(),
                });
            }
            succ[from].push(Edge { target: to, weight });
            max_weight = max_weight.max(weight.unsigned_abs());
        }
        for (v, s) in succ.iter_mut().enumerate() {
            if s.is_empty() {
                return Err(ArenaError::NoOutgoingEdge(names[v].clone()));
            }
            s.sort_by_key(|e| e.target);
        }
        Ok(Arena {
            names,
            succ,
            k: total_budget,
            max_weight,
        })
    }

    /// Builds an arena from vertex names and named edges.
    pub fn from_named(
        vertices: &[&str],
        edges: &[(&str, &str, i64)],
        total_budget: u64,
    ) -> Result<Arena, ArenaError> {
        let names: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let index = |s: &str| {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| ArenaError::UnknownVertex(s.to_string()))
        };
        let mut idx = Vec::with_capacity(edges.len());
        for &(a, b, w) in edges {
            idx.push((index(a)?, index(b)?, w));
        }
        Arena::new(names, &idx, total_budget)
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn total_budget(&self) -> u64 {
        self.k
    }

    /// `W`, the largest absolute edge weight.
    pub fn max_weight(&self) -> u64 {
        self.max_weight
    }

    /// Number of Pres budgets `0, 0*, ..., k*`.
    pub fn num_budgets(&self) -> usize {
        (2 * self.k + 2) as usize
    }

    /// Number of configurations `|V|·(2k+2)`.
    pub fn num_configurations(&self) -> usize {
        self.num_vertices() * self.num_budgets()
    }

    pub fn total(&self) -> Budget {
        Budget::total(self.k)
    }

    pub fn top(&self) -> Budget {
        Budget::top(self.k)
    }

    pub fn budgets(&self) -> impl Iterator<Item = Budget> {
        (0..=2 * self.k + 1).map(Budget::from_ordinal)
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn neighbors(&self, v: usize) -> &[Edge] {
        &self.succ[v]
    }

    pub fn weight(&self, from: usize, to: usize) -> Option<i64> {
        self.succ[from]
            .iter()
            .find(|e| e.target == to)
            .map(|e| e.weight)
    }

    pub fn is_edge(&self, from: usize, to: usize) -> bool {
        self.weight(from, to).is_some()
    }

    /// All edges as `(from, to, weight)` in index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(v, s)| s.iter().map(move |e| (v, e.target, e.weight)))
    }

    /// The same arena with every weight replaced by `f(weight)`.
    pub fn map_weights(&self, f: impl Fn(i64) -> i64) -> Arena {
        let edges: Vec<_> = self.edges().map(|(a, b, w)| (a, b, f(w))).collect();
        Arena::new(self.names.clone(), &edges, self.k).expect("same shape as a valid arena")
    }
}

//! Game and threshold documents (JSON).
//!
//! ```json
//! {"vertices": ["v", "t"],
//!  "edges": [{"from": "v", "to": "t", "weight": -1}, {"from": "t", "to": "t", "weight": 0}],
//!  "total_budget": 2}
//! ```
//!
//! Threshold files map vertex names to budgets, with `none` for `k+1`:
//! `{"thresholds": {"v": "1*", "t": "none"}}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{Arena, ArenaError};
use crate::budget::Budget;
use crate::thresholds::{ThresholdError, ThresholdMap};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("total budget must be non-negative, got {0}")]
    NegativeBudget(i64),
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error("unknown vertex {0:?} in threshold file")]
    UnknownVertex(String),
    #[error("threshold file has no entry for vertex {0:?}")]
    MissingVertex(String),
    #[error("bad budget {value:?} for vertex {vertex:?}")]
    BadBudget { vertex: String, value: String },
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> FormatError {
        FormatError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub from: String,
    pub to: String,
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    pub total_budget: i64,
}

pub fn parse_game(text: &str) -> Result<Arena, FormatError> {
    let doc: GameDoc = serde_json::from_str(text)?;
    if doc.total_budget < 0 {
        return Err(FormatError::NegativeBudget(doc.total_budget));
    }
    let vertices: Vec<&str> = doc.vertices.iter().map(String::as_str).collect();
    let edges: Vec<(&str, &str, i64)> = doc
        .edges
        .iter()
        .map(|e| (e.from.as_str(), e.to.as_str(), e.weight))
        .collect();
    Ok(Arena::from_named(&vertices, &edges, doc.total_budget as u64)?)
}

pub fn game_doc(arena: &Arena) -> GameDoc {
    GameDoc {
        vertices: arena.names().to_vec(),
        edges: arena
            .edges()
            .map(|(a, b, w)| EdgeDoc {
                from: arena.name(a).to_string(),
                to: arena.name(b).to_string(),
                weight: w,
            })
            .collect(),
        total_budget: arena.total_budget() as i64,
    }
}

/// Pretty JSON with edges ordered by source, then target.
pub fn serialize_game(arena: &Arena) -> String {
    serde_json::to_string_pretty(&game_doc(arena)).expect("plain data")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdDoc {
    thresholds: BTreeMap<String, String>,
}

pub fn budget_text(t: &ThresholdMap, b: Budget) -> String {
    if b == t.top() {
        "none".to_string()
    } else {
        b.to_string()
    }
}

pub fn parse_thresholds(arena: &Arena, text: &str) -> Result<ThresholdMap, FormatError> {
    let doc: ThresholdDoc = serde_json::from_str(text)?;
    let top = arena.top();
    for name in doc.thresholds.keys() {
        if arena.vertex(name).is_none() {
            return Err(FormatError::UnknownVertex(name.clone()));
        }
    }
    let mut values = Vec::with_capacity(arena.num_vertices());
    for name in arena.names() {
        let raw = doc
            .thresholds
            .get(name)
            .ok_or_else(|| FormatError::MissingVertex(name.clone()))?;
        let b = if raw == "none" {
            top
        } else {
            raw.parse::<Budget>().map_err(|_| FormatError::BadBudget {
                vertex: name.clone(),
                value: raw.clone(),
            })?
        };
        values.push(b);
    }
    Ok(ThresholdMap::for_arena(arena, values)?)
}

pub fn serialize_thresholds(arena: &Arena, t: &ThresholdMap) -> String {
    let thresholds = (0..arena.num_vertices())
        .map(|v| (arena.name(v).to_string(), budget_text(t, t.get(v))))
        .collect();
    serde_json::to_string_pretty(&ThresholdDoc { thresholds }).expect("plain data")
}

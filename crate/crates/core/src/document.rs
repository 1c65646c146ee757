//! JSON presentation documents shared by the graph and k-graph readers.

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub id: String,
    pub source: String,
    pub range: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareRecord {
    pub first: [String; 2],
    pub second: [String; 2],
}

/// Raw document: `{"k", "vertices", "edges", "tails", "squares"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub k: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default)]
    pub tails: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub squares: Vec<SquareRecord>,
}

impl Document {
    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError::from_json(&e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

/// Reads only the rank field, so callers can dispatch between readers.
pub fn peek_rank(text: &str) -> Result<usize, ParseError> {
    #[derive(Deserialize)]
    struct Rank {
        k: usize,
    }
    serde_json::from_str::<Rank>(text)
        .map(|r| r.k)
        .map_err(|e| ParseError::from_json(&e))
}

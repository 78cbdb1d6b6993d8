//! JSON forms of causalities.
//!
//! ```json
//! {"points": ["a", "b"], "relation": [[1, 1], [0, 1]], "closure": "explicit"}
//! ```
//!
//! With `"closure": "cover"` the relation is a generating (Hasse) relation and
//! its reflexive-transitive closure is taken on load. Output is always
//! explicit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order::{Causality, OrderError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Closure {
    #[default]
    Explicit,
    Cover,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalityJson {
    pub points: Vec<String>,
    pub relation: Vec<Vec<u8>>,
    #[serde(default)]
    pub closure: Closure,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("malformed causality JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("relation entries must be 0 or 1, found {0}")]
    BadEntry(u8),
    #[error(transparent)]
    Order(#[from] OrderError),
}

impl CausalityJson {
    pub fn into_causality(self) -> Result<Causality, LoadError> {
        let relation = self
            .relation
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&e| match e {
                        0 => Ok(false),
                        1 => Ok(true),
                        other => Err(LoadError::BadEntry(other)),
                    })
                    .collect::<Result<Vec<bool>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let c = match self.closure {
            Closure::Explicit => crate::order::validate_causality(self.points, &relation)?,
            Closure::Cover => Causality::from_cover(self.points, &relation)?,
        };
        Ok(c)
    }
}

impl From<&Causality> for CausalityJson {
    fn from(c: &Causality) -> Self {
        CausalityJson {
            points: c.points().to_vec(),
            relation: c
                .relation_matrix()
                .into_iter()
                .map(|row| row.into_iter().map(u8::from).collect())
                .collect(),
            closure: Closure::Explicit,
        }
    }
}

pub fn causality_from_json(text: &str) -> Result<Causality, LoadError> {
    serde_json::from_str::<CausalityJson>(text)?.into_causality()
}

pub fn causality_to_json(c: &Causality) -> String {
    serde_json::to_string(&CausalityJson::from(c)).expect("serializable")
}

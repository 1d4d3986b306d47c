//! JSON network files.
//!
//! ```json
//! {
//!   "concepts": ["animal", "bird"],
//!   "relations": [
//!     { "type": "IsA", "source": "bird", "target": "animal", "score": 3 }
//!   ]
//! }
//! ```
//!
//! Relation endpoints need not be repeated in `concepts`; the list exists to
//! carry isolated concepts. `score` defaults to 1 when omitted.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Concept, GraphError, Relation, RelationType, SemanticNetwork};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed network document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid network content: {0}")]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationRecord {
    #[serde(rename = "type")]
    pub rel_type: RelationType,
    pub source: Concept,
    pub target: Concept,
    #[serde(default = "default_score")]
    pub score: i8,
}

fn default_score() -> i8 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    #[serde(default)]
    pub concepts: Vec<Concept>,
    #[serde(default)]
    pub relations: Vec<RelationRecord>,
}

impl NetworkDocument {
    pub fn from_network(net: &SemanticNetwork) -> Self {
        NetworkDocument {
            concepts: net.concepts().iter().cloned().collect(),
            relations: net
                .relations()
                .iter()
                .map(|r| RelationRecord {
                    rel_type: r.rel_type(),
                    source: r.source().clone(),
                    target: r.target().clone(),
                    score: r.score(),
                })
                .collect(),
        }
    }

    pub fn into_network(self) -> Result<SemanticNetwork, GraphError> {
        let relations = self
            .relations
            .into_iter()
            .map(|r| Relation::new(r.rel_type, r.source, r.target, r.score))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SemanticNetwork::from_parts(self.concepts, relations))
    }
}

pub fn network_from_json(text: &str) -> Result<SemanticNetwork, FormatError> {
    let doc: NetworkDocument = serde_json::from_str(text)?;
    Ok(doc.into_network()?)
}

pub fn network_to_json(net: &SemanticNetwork) -> String {
    let mut text = serde_json::to_string_pretty(&NetworkDocument::from_network(net))
        .expect("network documents always serialize");
    text.push('\n');
    text
}

pub fn read_network(path: impl AsRef<Path>) -> Result<SemanticNetwork, FormatError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    network_from_json(&text)
}

pub fn write_network(path: impl AsRef<Path>, net: &SemanticNetwork) -> Result<(), FormatError> {
    let path = path.as_ref();
    fs::write(path, network_to_json(net)).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

//! Store snapshots.
//!
//! A snapshot is the parsed, deduplicated assertion list of a set of dump
//! files, saved as JSON together with a key: the SHA-256 over the SHA-256 of
//! each dump's bytes, in order. A snapshot is only reused when its key matches
//! the dumps at hand and it was taken at or below the requested score
//! threshold; otherwise the dumps are parsed again.

use std::path::{Path, PathBuf};

use memevo_core::graph::{Relation, RelationType};
use memevo_core::{Assertion, Concept, KnowledgeStore, Origin};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Record {
    origin: Origin,
    #[serde(rename = "type")]
    rel_type: RelationType,
    source: Concept,
    target: Concept,
    score: i8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub key: String,
    pub score_min: i8,
    assertions: Vec<Record>,
}

pub fn file_sha256(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Content key of an ordered list of dump files.
pub fn dumps_key(dumps: &[PathBuf]) -> Result<String, CliError> {
    let mut h = Sha256::new();
    for d in dumps {
        h.update(file_sha256(d)?.as_bytes());
        h.update(b"\n");
    }
    Ok(hex::encode(h.finalize()))
}

impl Snapshot {
    pub fn of_store(store: &KnowledgeStore, key: String, score_min: i8) -> Self {
        let assertions = store
            .assertions()
            .iter()
            .map(|a| Record {
                origin: a.origin(),
                rel_type: a.rel_type(),
                source: a.start().clone(),
                target: a.end().clone(),
                score: a.score(),
            })
            .collect();
        Snapshot { key, score_min, assertions }
    }

    pub fn len(&self) -> usize {
        self.assertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assertions.is_empty()
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string(self).expect("snapshots always serialize");
        std::fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
    }

    pub fn into_store(self, score_min: i8) -> Result<KnowledgeStore, CliError> {
        let assertions = self
            .assertions
            .into_iter()
            .map(|r| {
                Relation::new(r.rel_type, r.source, r.target, r.score)
                    .map(|rel| Assertion::new(rel, r.origin))
                    .map_err(|e| CliError::Data(format!("snapshot: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(KnowledgeStore::from_assertions(assertions, score_min)?)
    }
}

/// Build the store for `dumps`, going through `snapshot` when one is given.
/// With no dumps the snapshot is taken as is.
pub fn load_store(dumps: &[PathBuf], snapshot: Option<&Path>, score_min: i8) -> Result<KnowledgeStore, CliError> {
    if dumps.is_empty() {
        let path = snapshot.ok_or_else(|| CliError::Config("need assertion dumps or a store snapshot".into()))?;
        return Snapshot::read(path)?.into_store(score_min);
    }
    let Some(path) = snapshot else {
        return Ok(KnowledgeStore::ingest(dumps, score_min)?);
    };
    let key = dumps_key(dumps)?;
    if path.is_file() {
        match Snapshot::read(path) {
            Ok(s) if s.key == key && s.score_min <= score_min => {
                log::info!("using store snapshot {}", path.display());
                return s.into_store(score_min);
            }
            Ok(_) => log::info!("store snapshot {} is stale, re-ingesting", path.display()),
            Err(e) => log::warn!("ignoring unreadable snapshot: {e}"),
        }
    }
    let store = KnowledgeStore::ingest(dumps, score_min)?;
    Snapshot::of_store(&store, key, score_min).write(path)?;
    Ok(store)
}

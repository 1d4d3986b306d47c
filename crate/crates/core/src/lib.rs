//! Evolutionary search over commonsense semantic networks.
//!
//! Individuals are [`SemanticNetwork`]s whose every relation is backed by a
//! [`KnowledgeStore`]. Populations are grown at random, varied by crossover
//! and mutation operators that never leave the store's commonsense, and
//! selected by analogical similarity to a fixed base network as measured by
//! a structure-mapping matcher.

pub mod engine;
pub mod fixtures;
pub mod format;
pub mod generation;
pub mod graph;
pub mod seed;
pub mod sme;
pub mod store;
pub mod variation;

pub use engine::{EvolutionParams, GenerationStats, PlateauRule, RunResult};
pub use graph::{Concept, Relation, RelationType, SemanticNetwork};
pub use sme::{AnalogyMapping, SmeWeights};
pub use store::{Assertion, KnowledgeStore, Origin};

//! Bundled example stores and networks.
//!
//! Each `*_STORE` constant is the text of an assertion dump; each network
//! constant is a JSON network document. The `fig*` sets rebuild the worked
//! examples for random growth, the two crossover types, and the astronomy
//! analogy; `TOY_*` is a small store for end-to-end runs.

use crate::format::network_from_json;
use crate::graph::SemanticNetwork;
use crate::store::KnowledgeStore;

pub const FIG1_STORE: &str = include_str!("../fixtures/fig1.tsv");
pub const FIG1_NETWORK: &str = include_str!("../fixtures/fig1_network.json");
pub const FIG3_STORE: &str = include_str!("../fixtures/fig3.tsv");
pub const FIG4_STORE: &str = include_str!("../fixtures/fig4.tsv");
pub const FIG4_PARENT1: &str = include_str!("../fixtures/fig4_parent1.json");
pub const FIG4_PARENT2: &str = include_str!("../fixtures/fig4_parent2.json");
pub const FIG4_OFFSPRING1: &str = include_str!("../fixtures/fig4_offspring1.json");
pub const FIG4_OFFSPRING2: &str = include_str!("../fixtures/fig4_offspring2.json");
pub const FIG5_STORE: &str = include_str!("../fixtures/fig5.tsv");
pub const FIG5_PARENT1: &str = include_str!("../fixtures/fig5_parent1.json");
pub const FIG5_PARENT2: &str = include_str!("../fixtures/fig5_parent2.json");
pub const FIG9_BASE: &str = include_str!("../fixtures/fig9_base.json");
pub const FIG10_TARGET: &str = include_str!("../fixtures/fig10_target.json");
pub const TOY_STORE: &str = include_str!("../fixtures/toy_store.tsv");
pub const TOY_REFERENCE: &str = include_str!("../fixtures/toy_reference.json");

/// Parse a bundled dump with no score filtering.
pub fn store(text: &str) -> KnowledgeStore {
    KnowledgeStore::from_dump_str(text, crate::graph::MIN_SCORE).expect("bundled dumps are valid")
}

pub fn network(text: &str) -> SemanticNetwork {
    network_from_json(text).expect("bundled networks are valid")
}

use std::collections::BTreeSet;

use memevo_core::fixtures;
use memevo_core::format::{network_from_json, network_to_json};
use memevo_core::graph::{Concept, Relation, RelationType, SemanticNetwork};
use memevo_core::store::{KnowledgeStore, Origin};
use proptest::prelude::*;

fn arb_relation() -> impl Strategy<Value = Relation> {
    (0..RelationType::ALL.len(), 0..8usize, 0..8usize, -10i8..=10)
        .prop_filter("no self loops", |(_, s, t, _)| s != t)
        .prop_map(|(k, s, t, score)| {
            Relation::new(
                RelationType::ALL[k],
                Concept::new(&format!("c{s}")).unwrap(),
                Concept::new(&format!("c{t}")).unwrap(),
                score,
            )
            .unwrap()
        })
}

fn closed(net: &SemanticNetwork) -> bool {
    net.relations()
        .iter()
        .all(|r| net.contains_concept(r.source()) && net.contains_concept(r.target()))
}

proptest! {
    #[test]
    fn edits_keep_networks_closed(rels in prop::collection::vec(arb_relation(), 0..20), drop in 0..8usize) {
        let mut net = SemanticNetwork::from_relations(rels.clone());
        prop_assert!(closed(&net));
        let victim = Concept::new(&format!("c{drop}")).unwrap();
        if net.contains_concept(&victim) {
            let removed = net.remove_concept(&victim).unwrap();
            prop_assert!(removed.iter().all(|r| r.involves(&victim)));
            prop_assert!(!net.relations().iter().any(|r| r.involves(&victim)));
        }
        prop_assert!(closed(&net));
    }

    #[test]
    fn duplicate_triples_keep_the_highest_score(rels in prop::collection::vec(arb_relation(), 1..30)) {
        let net = SemanticNetwork::from_relations(rels.clone());
        for r in &rels {
            let kept = net.get_relation(r.rel_type(), r.source(), r.target()).unwrap();
            let top = rels.iter().filter(|o| o.triple() == r.triple()).map(Relation::score).max().unwrap();
            prop_assert_eq!(kept.score(), top);
        }
    }

    #[test]
    fn clusters_partition_the_concepts(rels in prop::collection::vec(arb_relation(), 0..20)) {
        let net = SemanticNetwork::from_relations(rels);
        let clusters = net.clusters();
        let mut seen = BTreeSet::new();
        for c in &clusters {
            for k in c {
                prop_assert!(seen.insert(k.clone()));
            }
        }
        prop_assert_eq!(seen.len(), net.concept_count());
        // no relation crosses clusters
        for r in net.relations() {
            prop_assert!(clusters.iter().any(|c| c.contains(r.source()) && c.contains(r.target())));
        }
    }

    #[test]
    fn json_round_trip(rels in prop::collection::vec(arb_relation(), 0..20)) {
        let mut net = SemanticNetwork::from_relations(rels);
        net.add_concept(Concept::new("loner").unwrap());
        let back = network_from_json(&network_to_json(&net)).unwrap();
        prop_assert_eq!(&back, &net);
        let scores: Vec<i8> = back.relations().iter().map(Relation::score).collect();
        prop_assert_eq!(scores, net.relations().iter().map(Relation::score).collect::<Vec<_>>());
    }

    #[test]
    fn store_threshold_filters_exactly(rels in prop::collection::vec(arb_relation(), 1..30), score_min in -10i8..=10) {
        let text: String = rels
            .iter()
            .map(|r| format!("conceptnet\t{}\t{}\t{}\t{}\n", r.rel_type(), r.source(), r.target(), r.score()))
            .collect();
        let expected: BTreeSet<_> = SemanticNetwork::from_relations(rels)
            .relations()
            .iter()
            .filter(|r| r.score() >= score_min)
            .map(Relation::triple)
            .collect();
        match KnowledgeStore::from_dump_str(&text, score_min) {
            Ok(store) => {
                let got: BTreeSet<_> = store.assertions().iter().map(|a| a.relation().triple()).collect();
                prop_assert_eq!(got, expected);
            }
            Err(_) => prop_assert!(expected.is_empty()),
        }
    }
}

#[test]
fn fig4_dump_counts() {
    let store = fixtures::store(fixtures::FIG4_STORE);
    assert_eq!(store.len(), 13);
    assert_eq!(store.concept_count(), 11);
    assert_eq!(store.origin_counts().get(&Origin::Fixture), Some(&13));
}

#[test]
fn wordnet_rows_project_with_top_score() {
    let text = "wordnet\thypernym\tdog\tcanine\n\
                wordnet\tholonym\twheel\tautomobile\n\
                wordnet\tmeronym\tautomobile\twheel\n\
                wordnet\tattribute\tpear\tedible\n\
                wordnet\tentailment\tsnore\tsleep\n";
    let store = KnowledgeStore::from_dump_str(text, 10).unwrap();
    let got: BTreeSet<String> = store.assertions().iter().map(|a| a.relation().to_string()).collect();
    let want: BTreeSet<String> = [
        "IsA(dog, canine)",
        "PartOf(wheel, automobile)",
        "HasProperty(pear, edible)",
        "Causes(sleep, snore)",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(got, want);
    assert!(store.assertions().iter().all(|a| a.score() == 10 && a.origin() == Origin::WordNet));
}

#[test]
fn every_reference_relation_is_in_the_toy_store() {
    let store = fixtures::store(fixtures::TOY_STORE);
    let reference = fixtures::network(fixtures::TOY_REFERENCE);
    assert!(store.len() >= 210);
    assert!(store.validates(&reference, 2));
}

//! Commonsense crossover and mutation.
//!
//! Every operator only ever adds relations that the store holds at the
//! working score threshold, so offspring of valid parents are valid.
//!
//! Crossover tries the subgraph exchange (type I) around a randomly chosen
//! interchangeable concept pair and falls back to graph merging (type II) when
//! the parents have no such pair. Mutation draws one of six kinds uniformly,
//! redrawing while the drawn kind is infeasible, up to `count_timeout` draws.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::graph::{Concept, Relation, SemanticNetwork};
use crate::store::{relation_from_signature, signature_of, Assertion, KnowledgeStore, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MutationKind {
    /// I: attach a new concept through one stored relation.
    ConceptAttachment,
    /// IIa: add a stored relation between two member concepts.
    RelationAddition,
    /// IIb: delete a relation.
    RelationDeletion,
    /// IIIa: add an unconnected concept.
    ConceptAddition,
    /// IIIb: delete a concept and its relations.
    ConceptDeletion,
    /// IV: swap a concept for an interchangeable one.
    ConceptReplacement,
}

impl MutationKind {
    pub const ALL: [MutationKind; 6] = [
        MutationKind::ConceptAttachment,
        MutationKind::RelationAddition,
        MutationKind::RelationDeletion,
        MutationKind::ConceptAddition,
        MutationKind::ConceptDeletion,
        MutationKind::ConceptReplacement,
    ];
}

/// Which operator produced an offspring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operator {
    CrossoverI,
    CrossoverII,
    Mutation(MutationKind),
    None,
}

impl Operator {
    pub fn as_str(self) -> &'static str {
        match self {
            Operator::CrossoverI => "xover1",
            Operator::CrossoverII => "xover2",
            Operator::Mutation(MutationKind::ConceptAttachment) => "mutI",
            Operator::Mutation(MutationKind::RelationAddition) => "mutIIa",
            Operator::Mutation(MutationKind::RelationDeletion) => "mutIIb",
            Operator::Mutation(MutationKind::ConceptAddition) => "mutIIIa",
            Operator::Mutation(MutationKind::ConceptDeletion) => "mutIIIb",
            Operator::Mutation(MutationKind::ConceptReplacement) => "mutIV",
            Operator::None => "none",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VariationError {
    #[error("({0}, {1}) is not an interchangeable crossover pair for these parents")]
    InvalidPair(Concept, Concept),
    #[error("{0:?} is not feasible for this parent")]
    Infeasible(MutationKind),
}

/// Offspring of one variation event plus an audit trail.
#[derive(Debug, Clone)]
pub struct VariationOutcome {
    pub offspring: Vec<SemanticNetwork>,
    pub operator: Operator,
    pub detail: String,
}

fn pick<'a, T, R: Rng + ?Sized>(items: &'a [T], rng: &mut R) -> Option<&'a T> {
    if items.is_empty() {
        None
    } else {
        Some(&items[rng.random_range(0..items.len())])
    }
}

/// Drop relations the store does not back at `score_min`.
fn retain_valid(store: &KnowledgeStore, net: SemanticNetwork, score_min: i8) -> SemanticNetwork {
    if store.validates(&net, score_min) {
        return net;
    }
    let concepts = net.concepts().iter().cloned().collect::<Vec<_>>();
    let relations = net
        .relations()
        .iter()
        .filter(|r| store.contains_relation(r, score_min))
        .cloned()
        .collect::<Vec<_>>();
    SemanticNetwork::from_parts(concepts, relations)
}

/// Short `+added -removed` summary of what changed from `before` to `after`.
pub fn describe_change(before: &SemanticNetwork, after: &SemanticNetwork) -> String {
    let mut parts = Vec::new();
    for c in after.concepts().difference(before.concepts()) {
        parts.push(format!("+{c}"));
    }
    for c in before.concepts().difference(after.concepts()) {
        parts.push(format!("-{c}"));
    }
    for r in after.relations().difference(before.relations()) {
        parts.push(format!("+{r}"));
    }
    for r in before.relations().difference(after.relations()) {
        parts.push(format!("-{r}"));
    }
    if parts.is_empty() {
        "unchanged".to_string()
    } else {
        parts.join(" ")
    }
}

// ---------------------------------------------------------------------------
// Crossover
// ---------------------------------------------------------------------------

/// One parent cut around its crossover concept.
#[derive(Debug, Clone)]
pub struct CrossoverSplit {
    /// The crossover concept with everything specific to it.
    pub subgraph: SemanticNetwork,
    /// What stays behind when the subgraph is lifted out.
    pub remainder: SemanticNetwork,
    /// Relations from the crossover concept into the remainder; all of them
    /// carry a signature shared with the other crossover concept.
    pub links: Vec<Relation>,
    /// Relations that belong to neither part.
    pub severed: Vec<Relation>,
}

fn network_signatures(net: &SemanticNetwork, concept: &Concept) -> BTreeSet<Signature> {
    net.incident_relations(concept)
        .filter_map(|r| signature_of(r, concept))
        .collect()
}

/// Cut `net` around `pivot`, treating `common` as the signatures `pivot`
/// shares with the other crossover concept.
///
/// The subgraph holds the pivot, its relations outside `common` with their
/// concepts, and everything reachable from those concepts without passing
/// through the pivot or a concept the pivot reaches through `common`. Those
/// "common" concepts stay in the remainder; any relation joining subgraph
/// and remainder other than a `common` link is severed.
pub fn split_for_crossover(net: &SemanticNetwork, pivot: &Concept, common: &BTreeSet<Signature>) -> CrossoverSplit {
    let mut common_concepts = BTreeSet::new();
    for r in net.incident_relations(pivot) {
        let sig = signature_of(r, pivot).expect("incident");
        if common.contains(&sig) {
            common_concepts.insert(sig.2);
        }
    }

    let mut inside: BTreeSet<Concept> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for r in net.incident_relations(pivot) {
        let sig = signature_of(r, pivot).expect("incident");
        let other = sig.2.clone();
        if common.contains(&sig) || common_concepts.contains(&other) {
            continue;
        }
        if inside.insert(other.clone()) {
            queue.push_back(other);
        }
    }
    while let Some(c) = queue.pop_front() {
        for r in net.incident_relations(&c) {
            let other = r.other_endpoint(&c).expect("incident");
            if other == pivot || common_concepts.contains(other) {
                continue;
            }
            if inside.insert(other.clone()) {
                queue.push_back(other.clone());
            }
        }
    }

    let mut subgraph = SemanticNetwork::singleton(pivot.clone());
    let mut remainder = SemanticNetwork::new();
    let mut links = Vec::new();
    let mut severed = Vec::new();
    for c in net.concepts() {
        if c == pivot || inside.contains(c) {
            subgraph.add_concept(c.clone());
        } else {
            remainder.add_concept(c.clone());
        }
    }
    let in_sub = |c: &Concept| c == pivot || inside.contains(c);
    for r in net.relations() {
        match (in_sub(r.source()), in_sub(r.target())) {
            (true, true) => {
                subgraph.add_relation(r.clone());
            }
            (false, false) => {
                remainder.add_relation(r.clone());
            }
            _ => {
                let through_pivot = r.involves(pivot);
                if through_pivot && common.contains(&signature_of(r, pivot).expect("incident")) {
                    links.push(r.clone());
                } else {
                    severed.push(r.clone());
                }
            }
        }
    }
    CrossoverSplit { subgraph, remainder, links, severed }
}

/// Signatures `a` has in `net_a` that `b` also has in `net_b`.
pub fn common_signatures(net_a: &SemanticNetwork, a: &Concept, net_b: &SemanticNetwork, b: &Concept) -> BTreeSet<Signature> {
    let sa = network_signatures(net_a, a);
    let sb = network_signatures(net_b, b);
    sa.intersection(&sb).cloned().collect()
}

fn graft(
    remainder: &SemanticNetwork,
    links: &[Relation],
    old_pivot: &Concept,
    new_pivot: &Concept,
    donor: &SemanticNetwork,
    subgraph: &SemanticNetwork,
) -> SemanticNetwork {
    let mut child = remainder.merge(subgraph);
    for link in links {
        let sig = signature_of(link, old_pivot).expect("links touch the pivot");
        let Ok(moved) = relation_from_signature(new_pivot, &sig, link.score()) else {
            continue;
        };
        // Carry the donor's score for the relation it actually holds.
        let score = donor
            .get_relation(moved.rel_type(), moved.source(), moved.target())
            .map_or(moved.score(), Relation::score);
        if let Ok(moved) = Relation::new(moved.rel_type(), moved.source().clone(), moved.target().clone(), score) {
            child.add_relation(moved);
        }
    }
    child
}

/// Type I (subgraph) crossover around the given pair.
///
/// Offspring 1 is parent 1's remainder with parent 2's subgraph grafted in;
/// offspring 2 is the converse. Links from the old crossover concept to the
/// remainder are re-pointed at the incoming one.
pub fn crossover_type1(
    store: &KnowledgeStore,
    p1: &SemanticNetwork,
    p2: &SemanticNetwork,
    pair: (&Concept, &Concept),
    score_min: i8,
) -> Result<(SemanticNetwork, SemanticNetwork), VariationError> {
    let (x1, x2) = pair;
    let invalid = || VariationError::InvalidPair(x1.clone(), x2.clone());
    if x1 == x2 || !p1.contains_concept(x1) || !p2.contains_concept(x2) {
        return Err(invalid());
    }
    if store.shared_signatures(x1, x2, score_min).is_empty() {
        return Err(invalid());
    }

    let common = common_signatures(p1, x1, p2, x2);
    let split1 = split_for_crossover(p1, x1, &common);
    let split2 = split_for_crossover(p2, x2, &common);

    let o1 = graft(&split1.remainder, &split1.links, x1, x2, p2, &split2.subgraph);
    let o2 = graft(&split2.remainder, &split2.links, x2, x1, p1, &split1.subgraph);
    Ok((retain_valid(store, o1, score_min), retain_valid(store, o2, score_min)))
}

/// Type II (merging) crossover: the union of both parents plus one stored
/// relation joining them, drawn uniformly from all such relations. Without
/// any, the parents sit side by side as separate clusters. Also returns the
/// joining relation.
pub fn crossover_type2<R: Rng + ?Sized>(
    store: &KnowledgeStore,
    p1: &SemanticNetwork,
    p2: &SemanticNetwork,
    score_min: i8,
    rng: &mut R,
) -> (SemanticNetwork, Option<Assertion>) {
    let attachments = store.cross_attachments(p1, p2, score_min);
    let mut child = p1.merge(p2);
    let joint = pick(&attachments, rng).map(|a| (*a).clone());
    if let Some(a) = &joint {
        child.add_relation(a.relation().clone());
    }
    (retain_valid(store, child, score_min), joint)
}

/// Crossover with fallback: type I on a uniformly drawn interchangeable pair,
/// otherwise two independent type II merges.
pub fn crossover<R: Rng + ?Sized>(
    store: &KnowledgeStore,
    p1: &SemanticNetwork,
    p2: &SemanticNetwork,
    score_min: i8,
    rng: &mut R,
) -> VariationOutcome {
    let pairs = store.interchangeable_pairs(p1, p2, score_min);
    if let Some((a, b)) = pick(&pairs, rng) {
        let (o1, o2) = crossover_type1(store, p1, p2, (a, b), score_min).expect("pair drawn from the interchangeable set");
        return VariationOutcome {
            offspring: vec![o1, o2],
            operator: Operator::CrossoverI,
            detail: format!("xover1 pair=({a}, {b})"),
        };
    }
    let (o1, j1) = crossover_type2(store, p1, p2, score_min, rng);
    let (o2, j2) = crossover_type2(store, p1, p2, score_min, rng);
    let show = |j: &Option<Assertion>| j.as_ref().map_or("clusters".to_string(), |a| a.relation().to_string());
    VariationOutcome {
        offspring: vec![o1, o2],
        operator: Operator::CrossoverII,
        detail: format!("xover2 joins=[{}; {}]", show(&j1), show(&j2)),
    }
}

// ---------------------------------------------------------------------------
// Mutation
// ---------------------------------------------------------------------------

/// Type I: attach an outside concept through one stored relation.
pub fn mutate_concept_attachment<R: Rng + ?Sized>(
    store: &KnowledgeStore,
    parent: &SemanticNetwork,
    score_min: i8,
    rng: &mut R,
) -> Result<SemanticNetwork, VariationError> {
    let attachable = store.attachable_concepts(parent, score_min);
    let mut by_concept: BTreeMap<&Concept, Vec<&Assertion>> = BTreeMap::new();
    for (c, a) in &attachable {
        by_concept.entry(c).or_default().push(*a);
    }
    let concepts: Vec<_> = by_concept.keys().copied().collect();
    let chosen = pick(&concepts, rng).ok_or(VariationError::Infeasible(MutationKind::ConceptAttachment))?;
    let via = pick(&by_concept[chosen], rng).expect("every attachable concept has a relation");
    let mut child = parent.clone();
    child.add_relation(via.relation().clone());
    Ok(child)
}

/// Type IIa: add a stored relation between two member concepts.
pub fn mutate_relation_addition<R: Rng + ?Sized>(
    store: &KnowledgeStore,
    parent: &SemanticNetwork,
    score_min: i8,
    rng: &mut R,
) -> Result<SemanticNetwork, VariationError> {
    let missing = store.missing_internal_relations(parent, score_min);
    let chosen = pick(&missing, rng).ok_or(VariationError::Infeasible(MutationKind::RelationAddition))?;
    let mut child = parent.clone();
    child.add_relation(chosen.relation().clone());
    Ok(child)
}

/// Type IIb: delete a uniformly chosen relation, keeping its concepts.
pub fn mutate_relation_deletion<R: Rng + ?Sized>(
    parent: &SemanticNetwork,
    rng: &mut R,
) -> Result<SemanticNetwork, VariationError> {
    if parent.relation_count() == 0 {
        return Err(VariationError::Infeasible(MutationKind::RelationDeletion));
    }
    let idx = rng.random_range(0..parent.relation_count());
    let victim = parent.relations().iter().nth(idx).expect("index in range").clone();
    let mut child = parent.clone();
    child.remove_relation(&victim);
    Ok(child)
}

/// Type IIIa: add a random store concept as its own cluster.
pub fn mutate_concept_addition<R: Rng + ?Sized>(
    store: &KnowledgeStore,
    parent: &SemanticNetwork,
    score_min: i8,
    rng: &mut R,
) -> Result<SemanticNetwork, VariationError> {
    let fresh = store
        .random_concept_outside(parent, score_min, rng)
        .ok_or(VariationError::Infeasible(MutationKind::ConceptAddition))?;
    let mut child = parent.clone();
    child.add_concept(fresh);
    Ok(child)
}

/// Type IIIb: delete a uniformly chosen concept with its relations. Never
/// applies to single-concept networks.
pub fn mutate_concept_deletion<R: Rng + ?Sized>(
    parent: &SemanticNetwork,
    rng: &mut R,
) -> Result<SemanticNetwork, VariationError> {
    if parent.concept_count() < 2 {
        return Err(VariationError::Infeasible(MutationKind::ConceptDeletion));
    }
    let idx = rng.random_range(0..parent.concept_count());
    let victim = parent.concepts().iter().nth(idx).expect("index in range").clone();
    let mut child = parent.clone();
    child.remove_concept(&victim).expect("victim is a member");
    Ok(child)
}

/// Replacement candidates for each member concept: outside concepts sharing
/// at least one stored signature with it.
pub fn replacement_candidates(
    store: &KnowledgeStore,
    parent: &SemanticNetwork,
    score_min: i8,
) -> Vec<(Concept, Vec<Concept>)> {
    parent
        .concepts()
        .iter()
        .filter_map(|c| {
            let options: Vec<Concept> = store
                .interchangeable_with(c, score_min)
                .into_iter()
                .filter(|x| !parent.contains_concept(x))
                .collect();
            (!options.is_empty()).then(|| (c.clone(), options))
        })
        .collect()
}

/// Put `replacement` where `old` was. Relations the store does not hold for
/// the replacement are dropped.
pub fn replace_concept(
    store: &KnowledgeStore,
    parent: &SemanticNetwork,
    old: &Concept,
    replacement: &Concept,
    score_min: i8,
) -> SemanticNetwork {
    let mut child = parent.clone();
    let removed = child.remove_concept(old).unwrap_or_default();
    child.add_concept(replacement.clone());
    for r in removed {
        let Ok(moved) = r.map_concepts(|c| if c == old { replacement.clone() } else { c.clone() }) else {
            continue;
        };
        if let Some(a) = store.lookup(moved.rel_type(), moved.source(), moved.target()) {
            if a.score() >= score_min {
                child.add_relation(a.relation().clone());
            }
        }
    }
    child
}

/// Type IV: replace a member concept that has interchangeable outside
/// concepts with one of them.
pub fn mutate_concept_replacement<R: Rng + ?Sized>(
    store: &KnowledgeStore,
    parent: &SemanticNetwork,
    score_min: i8,
    rng: &mut R,
) -> Result<SemanticNetwork, VariationError> {
    let candidates = replacement_candidates(store, parent, score_min);
    let (old, options) = pick(&candidates, rng).ok_or(VariationError::Infeasible(MutationKind::ConceptReplacement))?;
    let replacement = pick(options, rng).expect("non-empty by construction");
    Ok(replace_concept(store, parent, old, replacement, score_min))
}

/// Apply one specific mutation kind.
pub fn apply_mutation<R: Rng + ?Sized>(
    kind: MutationKind,
    store: &KnowledgeStore,
    parent: &SemanticNetwork,
    score_min: i8,
    rng: &mut R,
) -> Result<SemanticNetwork, VariationError> {
    match kind {
        MutationKind::ConceptAttachment => mutate_concept_attachment(store, parent, score_min, rng),
        MutationKind::RelationAddition => mutate_relation_addition(store, parent, score_min, rng),
        MutationKind::RelationDeletion => mutate_relation_deletion(parent, rng),
        MutationKind::ConceptAddition => mutate_concept_addition(store, parent, score_min, rng),
        MutationKind::ConceptDeletion => mutate_concept_deletion(parent, rng),
        MutationKind::ConceptReplacement => mutate_concept_replacement(store, parent, score_min, rng),
    }
}

/// Mutate with a uniformly drawn kind, redrawing (with replacement) while the
/// drawn kind is infeasible. After `count_timeout` infeasible draws the
/// parent comes back unchanged.
pub fn mutate<R: Rng + ?Sized>(
    store: &KnowledgeStore,
    parent: &SemanticNetwork,
    score_min: i8,
    count_timeout: usize,
    rng: &mut R,
) -> VariationOutcome {
    for _ in 0..count_timeout {
        let kind = MutationKind::ALL[rng.random_range(0..MutationKind::ALL.len())];
        if let Ok(child) = apply_mutation(kind, store, parent, score_min, rng) {
            let operator = Operator::Mutation(kind);
            let detail = format!("{operator} {}", describe_change(parent, &child));
            return VariationOutcome { offspring: vec![child], operator, detail };
        }
    }
    VariationOutcome {
        offspring: vec![parent.clone()],
        operator: Operator::None,
        detail: format!("none after {count_timeout} infeasible draws"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::RelationType;
    use crate::seed::rng_from_seed;

    fn c(name: &str) -> Concept {
        Concept::new(name).unwrap()
    }

    fn rel(t: &str, s: &str, o: &str) -> Relation {
        Relation::parse(t, s, o, 3).unwrap()
    }

    fn triples(net: &SemanticNetwork) -> BTreeSet<String> {
        net.relations().iter().map(|r| r.to_string()).collect()
    }

    #[test]
    fn fig4_subgraph_of_parent1() {
        let p1 = fixtures::network(fixtures::FIG4_PARENT1);
        let p2 = fixtures::network(fixtures::FIG4_PARENT2);
        let common = common_signatures(&p1, &c("bird"), &p2, &c("airplane"));
        assert_eq!(common.len(), 2);
        let split = split_for_crossover(&p1, &c("bird"), &common);
        let expected: BTreeSet<String> = [
            "HasA(bird, feather)",
            "AtLocation(bird, forest)",
            "PartOf(feather, wing)",
            "PartOf(tree, forest)",
        ]
        .into_iter()
        .map(String::from)
        .collect();
        assert_eq!(triples(&split.subgraph), expected);
        assert!(split.subgraph.contains_concept(&c("bird")));
        assert!(!split.subgraph.contains_concept(&c("fly")));
        assert_eq!(split.severed.iter().map(|r| r.to_string()).collect::<Vec<_>>(), vec!["UsedFor(wing, fly)"]);
        assert_eq!(split.links.len(), 2);
    }

    #[test]
    fn type1_with_nothing_specific_to_swap_returns_the_parents() {
        let store = KnowledgeStore::from_dump_str(
            "fixture\tCapableOf\tbird\tfly\t3\nfixture\tCapableOf\tairplane\tfly\t3\n",
            0,
        )
        .unwrap();
        let p1 = SemanticNetwork::from_relations([rel("CapableOf", "bird", "fly")]);
        let p2 = SemanticNetwork::from_relations([rel("CapableOf", "airplane", "fly")]);
        let (o1, o2) = crossover_type1(&store, &p1, &p2, (&c("bird"), &c("airplane")), 0).unwrap();
        assert_eq!(o1, p2);
        assert_eq!(o2, p1);
    }

    #[test]
    fn type1_rejects_non_interchangeable_pair() {
        let store = fixtures::store(fixtures::FIG4_STORE);
        let p1 = fixtures::network(fixtures::FIG4_PARENT1);
        let p2 = fixtures::network(fixtures::FIG4_PARENT2);
        assert_eq!(
            crossover_type1(&store, &p1, &p2, (&c("feather"), &c("metal")), 0),
            Err(VariationError::InvalidPair(c("feather"), c("metal")))
        );
        assert!(crossover_type1(&store, &p1, &p2, (&c("fly"), &c("fly")), 0).is_err());
    }

    #[test]
    fn type2_without_attachments_keeps_parents_as_clusters() {
        let store = KnowledgeStore::from_dump_str("fixture\tIsA\ta\tb\t3\nfixture\tIsA\tc\td\t3\n", 0).unwrap();
        let p1 = SemanticNetwork::from_relations([rel("IsA", "a", "b")]);
        let p2 = SemanticNetwork::from_relations([rel("IsA", "c", "d")]);
        let (child, joint) = crossover_type2(&store, &p1, &p2, 0, &mut rng_from_seed(1));
        assert!(joint.is_none());
        assert_eq!(child.clusters().len(), p1.clusters().len() + p2.clusters().len());
        let outcome = crossover(&store, &p1, &p2, 0, &mut rng_from_seed(1));
        assert_eq!(outcome.operator, Operator::CrossoverII);
        assert!(outcome.offspring.iter().all(|o| o == &child));
    }

    #[test]
    fn concept_attachment_uses_created_by() {
        let store = fixtures::store(fixtures::FIG5_STORE);
        let parent = SemanticNetwork::singleton(c("art"));
        let mut seen_human = false;
        for s in 0..20 {
            let child = mutate_concept_attachment(&store, &parent, 2, &mut rng_from_seed(s)).unwrap();
            assert_eq!(child.size(), (2, 1));
            if child.contains_concept(&c("human")) {
                assert!(child.contains_triple(RelationType::CreatedBy, &c("art"), &c("human")));
                seen_human = true;
            }
        }
        assert!(seen_human);
    }

    #[test]
    fn relation_addition_joins_clusters() {
        let store = KnowledgeStore::from_dump_str(
            "fixture\tIsA\tbird\tanimal\t3\nfixture\tCapableOf\tbird\tfly\t3\n",
            0,
        )
        .unwrap();
        let parent = SemanticNetwork::from_parts([c("fly")], [rel("IsA", "bird", "animal")]);
        assert_eq!(parent.clusters().len(), 2);
        let child = mutate_relation_addition(&store, &parent, 0, &mut rng_from_seed(0)).unwrap();
        assert_eq!(child.clusters().len(), 1);
        assert_eq!(child.relation_count(), parent.relation_count() + 1);
        assert_eq!(child.concept_count(), parent.concept_count());
        assert_eq!(
            mutate_relation_addition(&store, &child, 0, &mut rng_from_seed(0)),
            Err(VariationError::Infeasible(MutationKind::RelationAddition))
        );
    }

    #[test]
    fn relation_deletion_keeps_concepts() {
        let parent = SemanticNetwork::from_relations([rel("IsA", "a", "b")]);
        let child = mutate_relation_deletion(&parent, &mut rng_from_seed(0)).unwrap();
        assert_eq!(child.size(), (2, 0));
        assert_eq!(child.clusters().len(), 2);
        assert!(mutate_relation_deletion(&child, &mut rng_from_seed(0)).is_err());

        let fig1 = fixtures::network(fixtures::FIG1_NETWORK);
        let child = mutate_relation_deletion(&fig1, &mut rng_from_seed(5)).unwrap();
        assert_eq!(child.size(), (11, 10));
    }

    #[test]
    fn concept_addition_adds_a_cluster() {
        let store = fixtures::store(fixtures::FIG1_STORE);
        let parent = fixtures::network(fixtures::FIG1_NETWORK);
        for s in 0..20 {
            let child = mutate_concept_addition(&store, &parent, 2, &mut rng_from_seed(s)).unwrap();
            assert_eq!(child.relations(), parent.relations());
            assert_eq!(child.clusters().len(), 2);
            let added = child.concepts().difference(parent.concepts()).next().unwrap().clone();
            assert!(store.concept_support(2).any(|x| x == &added));
        }
        let everything = SemanticNetwork::from_parts(store.concepts().cloned(), []);
        assert!(mutate_concept_addition(&store, &everything, -10, &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn concept_deletion_of_star_hub() {
        let star = SemanticNetwork::from_relations([
            rel("HasA", "hub", "a"),
            rel("HasA", "hub", "b"),
            rel("HasA", "hub", "c"),
        ]);
        let mut hub_seen = false;
        for s in 0..30 {
            let child = mutate_concept_deletion(&star, &mut rng_from_seed(s)).unwrap();
            if !child.contains_concept(&c("hub")) {
                assert_eq!(child.size(), (3, 0));
                hub_seen = true;
            }
        }
        assert!(hub_seen);
        let lone = SemanticNetwork::singleton(c("x"));
        assert!(mutate_concept_deletion(&lone, &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn concept_deletion_drops_the_degree() {
        let fig1 = fixtures::network(fixtures::FIG1_NETWORK);
        let bird = c("bird");
        let degree = fig1.degree(&bird);
        assert_eq!(degree, 7);
        let mut child = fig1.clone();
        child.remove_concept(&bird).unwrap();
        assert_eq!(child.relation_count(), 11 - degree);
    }

    #[test]
    fn replacement_drops_unsatisfied_relations() {
        let store = KnowledgeStore::from_dump_str(
            "fixture\tCapableOf\tbird\tfly\t3\n\
             fixture\tHasA\tbird\tfeather\t3\n\
             fixture\tCapableOf\tairplane\tfly\t3\n",
            0,
        )
        .unwrap();
        let parent = SemanticNetwork::from_relations([rel("CapableOf", "bird", "fly"), rel("HasA", "bird", "feather")]);
        let child = mutate_concept_replacement(&store, &parent, 0, &mut rng_from_seed(0)).unwrap();
        assert!(child.contains_triple(RelationType::CapableOf, &c("airplane"), &c("fly")));
        assert!(!child.contains_concept(&c("bird")));
        assert_eq!(child.relation_count(), 1);
        assert!(child.contains_concept(&c("feather")));
    }

    #[test]
    fn replacement_satisfying_every_signature_keeps_all_relations() {
        let store = KnowledgeStore::from_dump_str(
            "fixture\tCapableOf\tbird\tfly\t3\n\
             fixture\tHasA\tbird\twing\t3\n\
             fixture\tCapableOf\tbat\tfly\t3\n\
             fixture\tHasA\tbat\twing\t3\n",
            0,
        )
        .unwrap();
        let parent = SemanticNetwork::from_relations([rel("CapableOf", "bird", "fly"), rel("HasA", "bird", "wing")]);
        let child = replace_concept(&store, &parent, &c("bird"), &c("bat"), 0);
        assert_eq!(child.relation_count(), 2);
    }

    #[test]
    fn mutate_returns_parent_when_nothing_is_feasible() {
        // Every store concept is already in the parent and it has no relations
        // to add or delete; deletion is blocked for a single concept.
        let store = KnowledgeStore::from_dump_str("fixture\tIsA\tx\ty\t1\n", 0).unwrap();
        let parent = SemanticNetwork::singleton(c("z"));
        let outcome = mutate(&store, &parent, 5, 10, &mut rng_from_seed(0));
        assert_eq!(outcome.operator, Operator::None);
        assert_eq!(outcome.offspring, vec![parent]);
    }

    #[test]
    fn describe_change_lists_differences() {
        let a = SemanticNetwork::singleton(c("art"));
        let b = SemanticNetwork::from_relations([rel("CreatedBy", "art", "human")]);
        assert_eq!(describe_change(&a, &b), "+human +CreatedBy(art, human)");
        assert_eq!(describe_change(&a, &a), "unchanged");
    }
}

//! Offline commonsense knowledge store.
//!
//! Assertions are read from tab-separated dump files, one per line:
//!
//! ```text
//! origin <TAB> relation <TAB> start <TAB> end <TAB> score
//! ```
//!
//! `origin` is `conceptnet`, `wordnet`, or `fixture`. ConceptNet and fixture
//! rows use ConceptNet relation labels. WordNet rows use WordNet pointer names
//! and are projected onto ConceptNet relations at ingest, always with score 10
//! (the score column may be left out for them). A row `rel A B` reads "B is
//! the rel of A":
//!
//! | row                              | stored as                  |
//! |----------------------------------|----------------------------|
//! | `hypernym dog canine`            | `IsA(dog, canine)`         |
//! | `holonym wheel automobile`       | `PartOf(wheel, automobile)`|
//! | `meronym automobile wheel`       | `PartOf(wheel, automobile)`|
//! | `attribute pear edible`          | `HasProperty(pear, edible)`|
//! | `entailment snore sleep`         | `Causes(sleep, snore)`     |
//!
//! Lines starting with `#` and blank lines are ignored.
//!
//! The store is immutable once built. Randomized queries take the caller's
//! generator so parallel workers can each own one.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Concept, GraphError, Relation, RelationType, SemanticNetwork, Triple, MAX_SCORE};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("knowledge store is empty after filtering")]
    EmptyStore,
    #[error("no concept qualifies at score >= {score_min}")]
    Exhausted { score_min: i8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    ConceptNet,
    WordNet,
    Fixture,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::ConceptNet => "conceptnet",
            Origin::WordNet => "wordnet",
            Origin::Fixture => "fixture",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Origin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conceptnet" => Ok(Origin::ConceptNet),
            "wordnet" => Ok(Origin::WordNet),
            "fixture" => Ok(Origin::Fixture),
            other => Err(format!("unknown origin `{other}`")),
        }
    }
}

/// A scored commonsense fact and where it came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assertion {
    relation: Relation,
    origin: Origin,
}

impl Assertion {
    pub fn new(relation: Relation, origin: Origin) -> Self {
        Assertion { relation, origin }
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn rel_type(&self) -> RelationType {
        self.relation.rel_type()
    }

    pub fn start(&self) -> &Concept {
        self.relation.source()
    }

    pub fn end(&self) -> &Concept {
        self.relation.target()
    }

    pub fn score(&self) -> i8 {
        self.relation.score()
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{} {}]", self.relation, self.origin, self.score())
    }
}

/// Which end of a relation a concept sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Outgoing,
    Incoming,
}

/// How a concept takes part in a relation: `CapableOf(·, fly)` is
/// `(CapableOf, Outgoing, fly)`.
pub type Signature = (RelationType, Direction, Concept);

/// The signature `relation` gives to `concept`, if `concept` is an endpoint.
pub fn signature_of(relation: &Relation, concept: &Concept) -> Option<Signature> {
    if relation.source() == concept {
        Some((relation.rel_type(), Direction::Outgoing, relation.target().clone()))
    } else if relation.target() == concept {
        Some((relation.rel_type(), Direction::Incoming, relation.source().clone()))
    } else {
        None
    }
}

/// Put `concept` into `signature`, producing the relation it describes.
pub fn relation_from_signature(concept: &Concept, signature: &Signature, score: i8) -> Result<Relation, GraphError> {
    let (rel_type, direction, other) = signature;
    match direction {
        Direction::Outgoing => Relation::new(*rel_type, concept.clone(), other.clone(), score),
        Direction::Incoming => Relation::new(*rel_type, other.clone(), concept.clone(), score),
    }
}

fn wordnet_projection(label: &str, start: Concept, end: Concept) -> Option<(RelationType, Concept, Concept)> {
    match label {
        "hypernym" => Some((RelationType::IsA, start, end)),
        "holonym" => Some((RelationType::PartOf, start, end)),
        "meronym" => Some((RelationType::PartOf, end, start)),
        "attribute" => Some((RelationType::HasProperty, start, end)),
        "entailment" => Some((RelationType::Causes, end, start)),
        _ => None,
    }
}

/// Parse one dump. `file` only labels error messages.
pub fn parse_dump(text: &str, file: &str) -> Result<Vec<Assertion>, StoreError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| StoreError::Parse {
            file: file.to_string(),
            line,
            message,
        };
        let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
        if !(4..=5).contains(&fields.len()) {
            return Err(err(format!("expected 5 tab-separated fields, found {}", fields.len())));
        }
        let origin: Origin = fields[0].parse().map_err(err)?;
        let start = Concept::new(fields[2]).map_err(|e| err(e.to_string()))?;
        let end = Concept::new(fields[3]).map_err(|e| err(e.to_string()))?;
        let score_field = fields.get(4).copied().unwrap_or("");

        let (rel_type, start, end, score) = if origin == Origin::WordNet {
            let (rel_type, s, e) = match wordnet_projection(fields[1], start.clone(), end.clone()) {
                Some(projected) => projected,
                None => (fields[1].parse().map_err(|e: GraphError| err(e.to_string()))?, start, end),
            };
            (rel_type, s, e, MAX_SCORE)
        } else {
            if score_field.is_empty() {
                return Err(err("missing score".to_string()));
            }
            let rel_type: RelationType = fields[1].parse().map_err(|e: GraphError| err(e.to_string()))?;
            let score: i64 = score_field
                .parse()
                .map_err(|_| err(format!("score `{score_field}` is not an integer")))?;
            if !(-10..=10).contains(&score) {
                return Err(err(format!("score {score} outside [-10, 10]")));
            }
            (rel_type, start, end, score as i8)
        };
        let relation = Relation::new(rel_type, start, end, score).map_err(|e| err(e.to_string()))?;
        out.push(Assertion::new(relation, origin));
    }
    Ok(out)
}

/// Indexed, read-only collection of assertions.
#[derive(Debug, Clone)]
pub struct KnowledgeStore {
    assertions: Vec<Assertion>,
    by_triple: HashMap<Triple, usize>,
    by_concept: HashMap<Concept, Vec<usize>>,
    by_pair: HashMap<(Concept, Concept), Vec<usize>>,
    // Concepts ordered by their best incident score (descending), then name.
    // The concepts usable at a threshold form a prefix of this list.
    ranked_concepts: Vec<(Concept, i8)>,
}

fn pair_key(a: &Concept, b: &Concept) -> (Concept, Concept) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

impl KnowledgeStore {
    /// Build a store from parsed assertions, keeping those with
    /// `score >= score_min`. A triple seen more than once keeps its
    /// highest-scoring copy.
    pub fn from_assertions(assertions: impl IntoIterator<Item = Assertion>, score_min: i8) -> Result<Self, StoreError> {
        let mut best: BTreeMap<Relation, Assertion> = BTreeMap::new();
        for a in assertions {
            if a.score() < score_min {
                continue;
            }
            match best.get(&a.relation) {
                Some(existing) if existing.score() >= a.score() => {}
                _ => {
                    best.insert(a.relation.clone(), a);
                }
            }
        }
        if best.is_empty() {
            return Err(StoreError::EmptyStore);
        }
        let assertions: Vec<Assertion> = best.into_values().collect();

        let mut by_triple = HashMap::with_capacity(assertions.len());
        let mut by_concept: HashMap<Concept, Vec<usize>> = HashMap::new();
        let mut by_pair: HashMap<(Concept, Concept), Vec<usize>> = HashMap::new();
        let mut top_score: BTreeMap<Concept, i8> = BTreeMap::new();
        for (i, a) in assertions.iter().enumerate() {
            by_triple.insert(a.relation.triple(), i);
            for c in [a.start(), a.end()] {
                by_concept.entry(c.clone()).or_default().push(i);
                let entry = top_score.entry(c.clone()).or_insert(a.score());
                *entry = (*entry).max(a.score());
            }
            by_pair.entry(pair_key(a.start(), a.end())).or_default().push(i);
        }
        let mut ranked_concepts: Vec<(Concept, i8)> = top_score.into_iter().collect();
        ranked_concepts.sort_by(|(ca, sa), (cb, sb)| sb.cmp(sa).then_with(|| ca.cmp(cb)));

        Ok(KnowledgeStore {
            assertions,
            by_triple,
            by_concept,
            by_pair,
            ranked_concepts,
        })
    }

    /// Read and merge dump files.
    pub fn ingest<P: AsRef<Path>>(files: &[P], score_min: i8) -> Result<Self, StoreError> {
        let mut all = Vec::new();
        for path in files {
            let path = path.as_ref();
            let text = fs::read_to_string(path).map_err(|source| StoreError::Io {
                path: path.display().to_string(),
                source,
            })?;
            all.extend(parse_dump(&text, &path.display().to_string())?);
        }
        Self::from_assertions(all, score_min)
    }

    /// Build from in-memory dump text.
    pub fn from_dump_str(text: &str, score_min: i8) -> Result<Self, StoreError> {
        Self::from_assertions(parse_dump(text, "<memory>")?, score_min)
    }

    pub fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }

    pub fn len(&self) -> usize {
        self.assertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assertions.is_empty()
    }

    pub fn concept_count(&self) -> usize {
        self.ranked_concepts.len()
    }

    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.ranked_concepts.iter().map(|(c, _)| c)
    }

    pub fn contains_concept(&self, concept: &Concept) -> bool {
        self.by_concept.contains_key(concept)
    }

    pub fn origin_counts(&self) -> BTreeMap<Origin, usize> {
        let mut counts = BTreeMap::new();
        for a in &self.assertions {
            *counts.entry(a.origin()).or_insert(0) += 1;
        }
        counts
    }

    /// Concepts taking part in at least one assertion scored `>= score_min`.
    pub fn concept_support(&self, score_min: i8) -> impl ExactSizeIterator<Item = &Concept> {
        let n = self.ranked_concepts.partition_point(|(_, s)| *s >= score_min);
        self.ranked_concepts[..n].iter().map(|(c, _)| c)
    }

    /// Uniform draw from [`concept_support`](Self::concept_support).
    pub fn random_concept<R: Rng + ?Sized>(&self, score_min: i8, rng: &mut R) -> Result<Concept, StoreError> {
        let n = self.ranked_concepts.partition_point(|(_, s)| *s >= score_min);
        if n == 0 {
            return Err(StoreError::Exhausted { score_min });
        }
        Ok(self.ranked_concepts[rng.random_range(0..n)].0.clone())
    }

    /// Uniform draw from the supported concepts missing from `net`.
    pub fn random_concept_outside<R: Rng + ?Sized>(
        &self,
        net: &SemanticNetwork,
        score_min: i8,
        rng: &mut R,
    ) -> Option<Concept> {
        let n = self.ranked_concepts.partition_point(|(_, s)| *s >= score_min);
        let support = &self.ranked_concepts[..n];
        // Rejection sampling is uniform over the complement; fall back to an
        // explicit listing when the network covers most of the support.
        for _ in 0..32 {
            if n == 0 {
                return None;
            }
            let c = &support[rng.random_range(0..n)].0;
            if !net.contains_concept(c) {
                return Some(c.clone());
            }
        }
        let outside: Vec<&Concept> = support.iter().map(|(c, _)| c).filter(|c| !net.contains_concept(c)).collect();
        if outside.is_empty() {
            None
        } else {
            Some(outside[rng.random_range(0..outside.len())].clone())
        }
    }

    /// Assertions touching `concept` (either end) scored `>= score_min`, in
    /// store order.
    pub fn involved_relations(&self, concept: &Concept, score_min: i8) -> Vec<&Assertion> {
        self.by_concept
            .get(concept)
            .map(|ids| {
                ids.iter()
                    .map(|&i| &self.assertions[i])
                    .filter(|a| a.score() >= score_min)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Assertions between two concepts, in either direction.
    pub fn relations_between(&self, a: &Concept, b: &Concept, score_min: i8) -> Vec<&Assertion> {
        self.by_pair
            .get(&pair_key(a, b))
            .map(|ids| {
                ids.iter()
                    .map(|&i| &self.assertions[i])
                    .filter(|x| x.score() >= score_min)
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn lookup(&self, rel_type: RelationType, source: &Concept, target: &Concept) -> Option<&Assertion> {
        self.by_triple
            .get(&(rel_type, source.clone(), target.clone()))
            .map(|&i| &self.assertions[i])
    }

    /// True iff exactly this directed triple is stored with `score >= score_min`.
    pub fn relation_exists(&self, rel_type: RelationType, source: &Concept, target: &Concept, score_min: i8) -> bool {
        self.lookup(rel_type, source, target)
            .is_some_and(|a| a.score() >= score_min)
    }

    pub fn contains_relation(&self, relation: &Relation, score_min: i8) -> bool {
        self.relation_exists(relation.rel_type(), relation.source(), relation.target(), score_min)
    }

    /// Every relation of `net` is backed by the store at `score_min`.
    pub fn validates(&self, net: &SemanticNetwork, score_min: i8) -> bool {
        net.relations().iter().all(|r| self.contains_relation(r, score_min))
    }

    /// `(c, a)` for every concept `c` outside `net` and assertion `a` linking
    /// `c` to a member of `net`. Sorted by concept, then assertion.
    pub fn attachable_concepts(&self, net: &SemanticNetwork, score_min: i8) -> Vec<(Concept, &Assertion)> {
        let mut out = Vec::new();
        for member in net.concepts() {
            for a in self.involved_relations(member, score_min) {
                let other = a.relation.other_endpoint(member).expect("indexed by endpoint");
                if !net.contains_concept(other) {
                    out.push((other.clone(), a));
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Assertions linking a concept of `a` with a different concept of `b`
    /// (either direction) that neither network already holds. Sorted.
    pub fn cross_attachments(&self, a: &SemanticNetwork, b: &SemanticNetwork, score_min: i8) -> Vec<&Assertion> {
        let mut out = Vec::new();
        for ca in a.concepts() {
            for asr in self.involved_relations(ca, score_min) {
                let other = asr.relation.other_endpoint(ca).expect("indexed by endpoint");
                if !b.contains_concept(other) {
                    continue;
                }
                let (s, t) = (asr.start(), asr.end());
                if a.contains_triple(asr.rel_type(), s, t) || b.contains_triple(asr.rel_type(), s, t) {
                    continue;
                }
                out.push(asr);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Stored assertions with both endpoints in `net` that `net` lacks. Sorted.
    pub fn missing_internal_relations(&self, net: &SemanticNetwork, score_min: i8) -> Vec<&Assertion> {
        let mut out = Vec::new();
        for c in net.concepts() {
            for a in self.involved_relations(c, score_min) {
                // Visit each assertion from its start concept only.
                if a.start() == c
                    && net.contains_concept(a.end())
                    && !net.contains_triple(a.rel_type(), a.start(), a.end())
                {
                    out.push(a);
                }
            }
        }
        out.sort();
        out
    }

    /// All signatures `concept` has in the store at `score_min`.
    pub fn signatures(&self, concept: &Concept, score_min: i8) -> BTreeSet<Signature> {
        self.involved_relations(concept, score_min)
            .into_iter()
            .filter_map(|a| signature_of(&a.relation, concept))
            .collect()
    }

    /// Concepts other than `concept` sharing at least one stored signature
    /// with it.
    pub fn interchangeable_with(&self, concept: &Concept, score_min: i8) -> BTreeSet<Concept> {
        let mut out = BTreeSet::new();
        for (rel_type, direction, other) in self.signatures(concept, score_min) {
            for a in self.involved_relations(&other, score_min) {
                if a.rel_type() != rel_type {
                    continue;
                }
                // `other` must sit on the opposite end from where `concept` sits.
                let candidate = match direction {
                    Direction::Outgoing if a.end() == &other => a.start(),
                    Direction::Incoming if a.start() == &other => a.end(),
                    _ => continue,
                };
                if candidate != concept {
                    out.insert(candidate.clone());
                }
            }
        }
        out
    }

    /// Signatures shared by `a` and `b` in the store.
    pub fn shared_signatures(&self, a: &Concept, b: &Concept, score_min: i8) -> BTreeSet<Signature> {
        let sa = self.signatures(a, score_min);
        let sb = self.signatures(b, score_min);
        sa.intersection(&sb).cloned().collect()
    }

    /// Pairs `(a, b)` with `a` in `net_a`, `b` in `net_b`, `a != b`, that can
    /// stand in for each other in at least one stored relation signature.
    /// Sorted.
    pub fn interchangeable_pairs(
        &self,
        net_a: &SemanticNetwork,
        net_b: &SemanticNetwork,
        score_min: i8,
    ) -> Vec<(Concept, Concept)> {
        let mut out = Vec::new();
        for a in net_a.concepts() {
            for b in self.interchangeable_with(a, score_min) {
                if net_b.contains_concept(&b) {
                    out.push((a.clone(), b));
                }
            }
        }
        out.sort();
        out
    }
}

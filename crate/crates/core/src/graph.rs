//! Semantic networks: concepts joined by typed, directed commonsense relations.
//!
//! A [`SemanticNetwork`] is a set of [`Concept`]s and a set of [`Relation`]s
//! whose endpoints are always members of the concept set. Relation identity is
//! the `(type, source, target)` triple; the reliability score rides along as
//! metadata and never takes part in equality, ordering, or hashing.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Lowest reliability score an assertion can carry.
pub const MIN_SCORE: i8 = -10;
/// Highest reliability score an assertion can carry.
pub const MAX_SCORE: i8 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown relation type `{0}`")]
    UnknownRelationType(String),
    #[error("concept name is empty after normalization")]
    EmptyConcept,
    #[error("self-loop relation {rel_type}({concept}, {concept}) is not allowed")]
    SelfLoop { rel_type: RelationType, concept: Concept },
    #[error("score {0} outside [-10, 10]")]
    ScoreOutOfRange(i64),
    #[error("no such concept `{0}`")]
    NoSuchConcept(Concept),
}

macro_rules! relation_types {
    ($($variant:ident),+ $(,)?) => {
        /// The closed vocabulary of ConceptNet 4 relation labels.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum RelationType {
            $($variant),+
        }

        impl RelationType {
            pub const ALL: &'static [RelationType] = &[$(RelationType::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(RelationType::$variant => stringify!($variant)),+
                }
            }
        }

        impl FromStr for RelationType {
            type Err = GraphError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $(stringify!($variant) => Ok(RelationType::$variant),)+
                    other => Err(GraphError::UnknownRelationType(other.to_string())),
                }
            }
        }
    };
}

relation_types!(
    IsA,
    HasA,
    PartOf,
    UsedFor,
    AtLocation,
    CapableOf,
    MadeOf,
    CreatedBy,
    HasSubevent,
    HasFirstSubevent,
    HasLastSubevent,
    HasPrerequisite,
    MotivatedByGoal,
    Causes,
    Desires,
    CausesDesire,
    HasProperty,
    ReceivesAction,
    DefinedAs,
    SymbolOf,
    LocatedNear,
    ObstructedBy,
    ConceptuallyRelatedTo,
    InheritsFrom,
);

impl RelationType {
    /// `IsA` and `HasProperty` play the role of attributes in structure mapping.
    pub fn is_attribute_like(self) -> bool {
        matches!(self, RelationType::IsA | RelationType::HasProperty)
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for RelationType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for RelationType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A concept name: lowercase words joined by single spaces.
///
/// Cloning is cheap; the name is shared.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Concept(Arc<str>);

impl Concept {
    pub fn new(raw: &str) -> Result<Self, GraphError> {
        let normalized = raw
            .split_whitespace()
            .map(str::to_lowercase)
            .collect::<Vec<_>>()
            .join(" ");
        if normalized.is_empty() {
            return Err(GraphError::EmptyConcept);
        }
        Ok(Concept(normalized.into()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Concept {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Concept::new(s)
    }
}

impl Serialize for Concept {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Concept {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Concept::new(&s).map_err(serde::de::Error::custom)
    }
}

/// The identity of a relation, independent of its score.
pub type Triple = (RelationType, Concept, Concept);

/// A directed, typed relation between two distinct concepts.
#[derive(Clone)]
pub struct Relation {
    rel_type: RelationType,
    source: Concept,
    target: Concept,
    score: i8,
}

impl Relation {
    pub fn new(
        rel_type: RelationType,
        source: Concept,
        target: Concept,
        score: i8,
    ) -> Result<Self, GraphError> {
        if source == target {
            return Err(GraphError::SelfLoop { rel_type, concept: source });
        }
        if !(MIN_SCORE..=MAX_SCORE).contains(&score) {
            return Err(GraphError::ScoreOutOfRange(score.into()));
        }
        Ok(Relation { rel_type, source, target, score })
    }

    /// Convenience constructor from raw strings, mostly for fixtures and tests.
    pub fn parse(rel_type: &str, source: &str, target: &str, score: i8) -> Result<Self, GraphError> {
        Relation::new(rel_type.parse()?, Concept::new(source)?, Concept::new(target)?, score)
    }

    pub fn rel_type(&self) -> RelationType {
        self.rel_type
    }

    pub fn source(&self) -> &Concept {
        &self.source
    }

    pub fn target(&self) -> &Concept {
        &self.target
    }

    pub fn score(&self) -> i8 {
        self.score
    }

    pub fn triple(&self) -> Triple {
        (self.rel_type, self.source.clone(), self.target.clone())
    }

    pub fn involves(&self, concept: &Concept) -> bool {
        &self.source == concept || &self.target == concept
    }

    /// The endpoint opposite to `concept`, if `concept` is an endpoint.
    pub fn other_endpoint(&self, concept: &Concept) -> Option<&Concept> {
        if &self.source == concept {
            Some(&self.target)
        } else if &self.target == concept {
            Some(&self.source)
        } else {
            None
        }
    }

    /// Rename endpoints through `f`. Fails when the renaming collapses the
    /// relation into a self-loop.
    pub fn map_concepts(&self, mut f: impl FnMut(&Concept) -> Concept) -> Result<Self, GraphError> {
        Relation::new(self.rel_type, f(&self.source), f(&self.target), self.score)
    }

    fn key(&self) -> (RelationType, &Concept, &Concept) {
        (self.rel_type, &self.source, &self.target)
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Relation {}

impl PartialOrd for Relation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Relation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl Hash for Relation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})#{}", self.rel_type, self.source, self.target, self.score)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.rel_type, self.source, self.target)
    }
}

/// A semantic network. Concepts and relations are kept sorted so that every
/// traversal, serialization, and random pick by index is deterministic.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct SemanticNetwork {
    concepts: BTreeSet<Concept>,
    relations: BTreeSet<Relation>,
}

impl SemanticNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build a network from relations plus any extra (possibly isolated) concepts.
    pub fn from_parts(
        concepts: impl IntoIterator<Item = Concept>,
        relations: impl IntoIterator<Item = Relation>,
    ) -> Self {
        let mut net = SemanticNetwork::new();
        for c in concepts {
            net.add_concept(c);
        }
        for r in relations {
            net.add_relation(r);
        }
        net
    }

    pub fn from_relations(relations: impl IntoIterator<Item = Relation>) -> Self {
        Self::from_parts(std::iter::empty(), relations)
    }

    pub fn singleton(concept: Concept) -> Self {
        Self::from_parts([concept], std::iter::empty())
    }

    pub fn concepts(&self) -> &BTreeSet<Concept> {
        &self.concepts
    }

    pub fn relations(&self) -> &BTreeSet<Relation> {
        &self.relations
    }

    pub fn concept_count(&self) -> usize {
        self.concepts.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    /// `(concept_count, relation_count)`. The relation count is the network
    /// size used in run statistics.
    pub fn size(&self) -> (usize, usize) {
        (self.concepts.len(), self.relations.len())
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn contains_concept(&self, concept: &Concept) -> bool {
        self.concepts.contains(concept)
    }

    pub fn contains_triple(&self, rel_type: RelationType, source: &Concept, target: &Concept) -> bool {
        self.get_relation(rel_type, source, target).is_some()
    }

    pub fn get_relation(&self, rel_type: RelationType, source: &Concept, target: &Concept) -> Option<&Relation> {
        // Score is not part of the ordering, so any probe score finds the stored one.
        let probe = Relation {
            rel_type,
            source: source.clone(),
            target: target.clone(),
            score: 0,
        };
        self.relations.get(&probe)
    }

    pub fn add_concept(&mut self, concept: Concept) -> bool {
        self.concepts.insert(concept)
    }

    /// Insert `relation` and its endpoints. Returns `true` when the triple was
    /// new. Re-adding a known triple keeps the higher of the two scores.
    pub fn add_relation(&mut self, relation: Relation) -> bool {
        self.concepts.insert(relation.source.clone());
        self.concepts.insert(relation.target.clone());
        match self.relations.get(&relation) {
            Some(existing) if existing.score >= relation.score => false,
            Some(_) => {
                self.relations.replace(relation);
                false
            }
            None => self.relations.insert(relation),
        }
    }

    pub fn remove_relation(&mut self, relation: &Relation) -> bool {
        self.relations.remove(relation)
    }

    /// Remove `concept` and every relation it takes part in. Returns the
    /// removed relations.
    pub fn remove_concept(&mut self, concept: &Concept) -> Result<Vec<Relation>, GraphError> {
        if !self.concepts.remove(concept) {
            return Err(GraphError::NoSuchConcept(concept.clone()));
        }
        let removed: Vec<Relation> = self
            .relations
            .iter()
            .filter(|r| r.involves(concept))
            .cloned()
            .collect();
        for r in &removed {
            self.relations.remove(r);
        }
        Ok(removed)
    }

    /// Relations with `concept` as source or target, in relation order.
    pub fn incident_relations<'a>(&'a self, concept: &'a Concept) -> impl Iterator<Item = &'a Relation> + 'a {
        self.relations.iter().filter(move |r| r.involves(concept))
    }

    pub fn degree(&self, concept: &Concept) -> usize {
        self.incident_relations(concept).count()
    }

    /// Weakly connected components, each sorted, ordered by smallest member.
    pub fn clusters(&self) -> Vec<BTreeSet<Concept>> {
        let index: BTreeMap<&Concept, usize> =
            self.concepts.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut parent: Vec<usize> = (0..index.len()).collect();

        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }

        for r in &self.relations {
            let a = find(&mut parent, index[&r.source]);
            let b = find(&mut parent, index[&r.target]);
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }

        // Roots are always the smallest index of their component, and concepts
        // iterate in sorted order, so components come out ordered by their
        // smallest member.
        let mut by_root: BTreeMap<usize, BTreeSet<Concept>> = BTreeMap::new();
        for (i, c) in self.concepts.iter().enumerate() {
            let root = find(&mut parent, i);
            by_root.entry(root).or_default().insert(c.clone());
        }
        by_root.into_values().collect()
    }

    /// Union of two networks.
    pub fn merge(&self, other: &SemanticNetwork) -> SemanticNetwork {
        let mut merged = self.clone();
        for c in &other.concepts {
            merged.add_concept(c.clone());
        }
        for r in &other.relations {
            merged.add_relation(r.clone());
        }
        merged
    }

    /// Check the closure invariant. Always holds for networks built through
    /// this API; exposed for property tests.
    pub fn is_closed(&self) -> bool {
        self.relations
            .iter()
            .all(|r| self.concepts.contains(&r.source) && self.concepts.contains(&r.target))
    }

    /// Graphviz DOT rendering: one edge per relation, labelled with its type.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph {} {{\n", dot_quote(name));
        for c in &self.concepts {
            out.push_str(&format!("  {};\n", dot_quote(c.as_str())));
        }
        for r in &self.relations {
            out.push_str(&format!(
                "  {} -> {} [label={}];\n",
                dot_quote(r.source.as_str()),
                dot_quote(r.target.as_str()),
                dot_quote(r.rel_type.as_str())
            ));
        }
        out.push_str("}\n");
        out
    }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

impl fmt::Debug for SemanticNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemanticNetwork")
            .field("concepts", &self.concepts)
            .field("relations", &self.relations)
            .finish()
    }
}

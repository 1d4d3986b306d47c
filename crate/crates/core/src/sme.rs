//! Structure mapping between semantic networks.
//!
//! Concepts play the part of entities and relations the part of relational
//! predicates. A match hypothesis pairs a base relation with a target relation
//! of the same type, which in turn pairs up their sources and their targets.
//! A mapping is a set of hypotheses whose concept pairs form a one-to-one
//! correspondence; its structural evaluation score is
//!
//! ```text
//! score = base_weight * matched + trickle_factor * connected
//! ```
//!
//! where `matched` counts matched relation pairs and `connected` counts those
//! sharing a concept correspondence with another matched pair. Concept names
//! never enter the comparison.
//!
//! Up to `exhaustive_cutoff` hypotheses the best mapping is found by exact
//! branch-and-bound search; beyond that, mappings are grown greedily from the
//! best-supported seed hypotheses.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::graph::{Concept, Relation, RelationType, SemanticNetwork};

const SCORE_EPS: f64 = 1e-12;

/// Scoring constants and search limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmeWeights {
    pub base_weight: f64,
    pub trickle_factor: f64,
    /// Largest hypothesis count solved exactly.
    pub exhaustive_cutoff: usize,
    /// How many seed hypotheses the greedy search grows from.
    pub greedy_seeds: usize,
}

impl Default for SmeWeights {
    fn default() -> Self {
        SmeWeights {
            base_weight: 0.3,
            trickle_factor: 0.1,
            exhaustive_cutoff: 16,
            greedy_seeds: 32,
        }
    }
}

impl SmeWeights {
    /// Score of a mapping with `matched` relation pairs, `connected` of which
    /// share a concept correspondence with another pair.
    pub fn ses(&self, matched: usize, connected: usize) -> f64 {
        self.base_weight * matched as f64 + self.trickle_factor * connected as f64
    }
}

/// A base relation paired with a same-typed target relation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatchHypothesis {
    pub base_rel: Relation,
    pub target_rel: Relation,
}

impl MatchHypothesis {
    /// The two concept correspondences the pairing implies.
    pub fn implied(&self) -> [(Concept, Concept); 2] {
        [
            (self.base_rel.source().clone(), self.target_rel.source().clone()),
            (self.base_rel.target().clone(), self.target_rel.target().clone()),
        ]
    }

    /// `IsA` and `HasProperty` pairings stand in for attribute matches.
    pub fn is_attribute(&self) -> bool {
        self.base_rel.rel_type().is_attribute_like()
    }
}

/// Every same-type pairing of a base relation with a target relation, in base
/// then target relation order.
pub fn match_hypotheses(base: &SemanticNetwork, target: &SemanticNetwork) -> Vec<MatchHypothesis> {
    let mut by_type: BTreeMap<RelationType, Vec<&Relation>> = BTreeMap::new();
    for r in target.relations() {
        by_type.entry(r.rel_type()).or_default().push(r);
    }
    let mut out = Vec::new();
    for b in base.relations() {
        if let Some(ts) = by_type.get(&b.rel_type()) {
            for t in ts {
                out.push(MatchHypothesis {
                    base_rel: b.clone(),
                    target_rel: (*t).clone(),
                });
            }
        }
    }
    out
}

/// A one-to-one correspondence between base and target structure.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalogyMapping {
    /// Base concept to target concept.
    pub concept_pairs: BTreeMap<Concept, Concept>,
    /// Base relation to target relation.
    pub relation_pairs: BTreeMap<Relation, Relation>,
    pub score: f64,
}

impl AnalogyMapping {
    pub fn is_empty(&self) -> bool {
        self.relation_pairs.is_empty()
    }

    /// Both invariants: concept and relation correspondences are one-to-one,
    /// and every matched relation's endpoints correspond.
    pub fn is_consistent(&self) -> bool {
        let targets: BTreeSet<&Concept> = self.concept_pairs.values().collect();
        if targets.len() != self.concept_pairs.len() {
            return false;
        }
        let target_rels: BTreeSet<&Relation> = self.relation_pairs.values().collect();
        if target_rels.len() != self.relation_pairs.len() {
            return false;
        }
        self.relation_pairs.iter().all(|(b, t)| {
            b.rel_type() == t.rel_type()
                && self.concept_pairs.get(b.source()) == Some(t.source())
                && self.concept_pairs.get(b.target()) == Some(t.target())
        })
    }
}

/// Structural evaluation score of `mapping` under `weights`.
pub fn score(mapping: &AnalogyMapping, weights: &SmeWeights) -> f64 {
    let mut usage: HashMap<&Concept, usize> = HashMap::new();
    for b in mapping.relation_pairs.keys() {
        *usage.entry(b.source()).or_default() += 1;
        *usage.entry(b.target()).or_default() += 1;
    }
    let connected = mapping
        .relation_pairs
        .keys()
        .filter(|b| usage[b.source()] > 1 || usage[b.target()] > 1)
        .count();
    weights.ses(mapping.relation_pairs.len(), connected)
}

/// Hypotheses over dense concept ids.
struct Problem {
    // (base source, base target, target source, target target, base relation index)
    hyps: Vec<[u32; 5]>,
    base_concepts: usize,
    target_concepts: usize,
}

impl Problem {
    fn new(base: &SemanticNetwork, target: &SemanticNetwork, hyps: &[MatchHypothesis]) -> Self {
        let base_ids: HashMap<&Concept, u32> = base.concepts().iter().zip(0..).collect();
        let target_ids: HashMap<&Concept, u32> = target.concepts().iter().zip(0..).collect();
        let rel_ids: HashMap<&Relation, u32> = base.relations().iter().zip(0..).collect();
        let hyps = hyps
            .iter()
            .map(|h| {
                [
                    base_ids[h.base_rel.source()],
                    base_ids[h.base_rel.target()],
                    target_ids[h.target_rel.source()],
                    target_ids[h.target_rel.target()],
                    rel_ids[&h.base_rel],
                ]
            })
            .collect();
        Problem {
            hyps,
            base_concepts: base.concept_count(),
            target_concepts: target.concept_count(),
        }
    }
}

/// Partial mapping under construction, with undo support.
struct State {
    b2t: Vec<Option<u32>>,
    t2b: Vec<Option<u32>>,
    // matched relations touching each base concept
    usage: Vec<u32>,
    chosen: Vec<usize>,
}

impl State {
    fn new(p: &Problem) -> Self {
        State {
            b2t: vec![None; p.base_concepts],
            t2b: vec![None; p.target_concepts],
            usage: vec![0; p.base_concepts],
            chosen: Vec::new(),
        }
    }

    fn pair_ok(&self, b: u32, t: u32) -> bool {
        let forward = self.b2t[b as usize];
        let backward = self.t2b[t as usize];
        forward.is_none_or(|x| x == t) && backward.is_none_or(|x| x == b)
    }

    fn consistent(&self, h: &[u32; 5]) -> bool {
        self.pair_ok(h[0], h[2]) && self.pair_ok(h[1], h[3])
    }

    fn push(&mut self, p: &Problem, idx: usize) {
        let h = p.hyps[idx];
        for (b, t) in [(h[0], h[2]), (h[1], h[3])] {
            self.b2t[b as usize] = Some(t);
            self.t2b[t as usize] = Some(b);
            self.usage[b as usize] += 1;
        }
        self.chosen.push(idx);
    }

    fn pop(&mut self, p: &Problem) {
        let idx = self.chosen.pop().expect("pop after push");
        let h = p.hyps[idx];
        for (b, t) in [(h[0], h[2]), (h[1], h[3])] {
            self.usage[b as usize] -= 1;
            if self.usage[b as usize] == 0 {
                self.b2t[b as usize] = None;
                self.t2b[t as usize] = None;
            }
        }
    }

    fn connected(&self, p: &Problem) -> usize {
        self.chosen
            .iter()
            .filter(|&&i| {
                let h = p.hyps[i];
                self.usage[h[0] as usize] > 1 || self.usage[h[1] as usize] > 1
            })
            .count()
    }

    fn score(&self, p: &Problem, w: &SmeWeights) -> f64 {
        w.ses(self.chosen.len(), self.connected(p))
    }

    fn sorted_key(&self) -> Vec<usize> {
        let mut key = self.chosen.clone();
        key.sort_unstable();
        key
    }
}

/// Higher score wins; equal scores go to the lexicographically smaller
/// hypothesis list. Hypotheses are indexed in (base, target) relation order,
/// so index order is correspondence-list order.
fn better(score: f64, key: &[usize], best_score: f64, best_key: &[usize]) -> bool {
    if score > best_score + SCORE_EPS {
        return true;
    }
    if score < best_score - SCORE_EPS {
        return false;
    }
    key.cmp(best_key) == Ordering::Less
}

fn exact_search(p: &Problem, w: &SmeWeights) -> Vec<usize> {
    // Group hypotheses by base relation; each base relation is matched at most once.
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, h) in p.hyps.iter().enumerate() {
        groups.entry(h[4]).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();

    struct Search<'a> {
        p: &'a Problem,
        w: &'a SmeWeights,
        groups: &'a [Vec<usize>],
        state: State,
        best_score: f64,
        best_key: Vec<usize>,
    }

    impl Search<'_> {
        fn run(&mut self, g: usize) {
            let remaining = self.groups.len() - g;
            let n = self.state.chosen.len();
            let bound = self.w.ses(n + remaining, n + remaining);
            if bound < self.best_score - SCORE_EPS {
                return;
            }
            if g == self.groups.len() {
                let s = self.state.score(self.p, self.w);
                let key = self.state.sorted_key();
                if better(s, &key, self.best_score, &self.best_key) {
                    self.best_score = s;
                    self.best_key = key;
                }
                return;
            }
            for &i in &self.groups[g] {
                if self.state.consistent(&self.p.hyps[i]) {
                    self.state.push(self.p, i);
                    self.run(g + 1);
                    self.state.pop(self.p);
                }
            }
            self.run(g + 1);
        }
    }

    let mut search = Search {
        p,
        w,
        groups: &groups,
        state: State::new(p),
        best_score: 0.0,
        best_key: Vec::new(),
    };
    search.run(0);
    search.best_key
}

fn greedy_search(p: &Problem, w: &SmeWeights) -> Vec<usize> {
    // Support: how many other hypotheses imply one of the same concept pairs.
    let mut pair_count: HashMap<(u32, u32), usize> = HashMap::new();
    for h in &p.hyps {
        *pair_count.entry((h[0], h[2])).or_default() += 1;
        *pair_count.entry((h[1], h[3])).or_default() += 1;
    }
    let mut seeds: Vec<(usize, usize)> = p
        .hyps
        .iter()
        .enumerate()
        .map(|(i, h)| (pair_count[&(h[0], h[2])] + pair_count[&(h[1], h[3])], i))
        .collect();
    seeds.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    seeds.truncate(w.greedy_seeds.max(1));

    let mut best_score = f64::NEG_INFINITY;
    let mut best_key = Vec::new();
    for &(_, seed) in &seeds {
        let mut state = State::new(p);
        state.push(p, seed);
        loop {
            let mut pick: Option<(f64, usize)> = None;
            for i in 0..p.hyps.len() {
                let h = &p.hyps[i];
                // A base relation matched elsewhere would need different
                // endpoint images, so consistency rules it out.
                if state.chosen.contains(&i) || !state.consistent(h) {
                    continue;
                }
                state.push(p, i);
                let s = state.score(p, w);
                state.pop(p);
                if pick.is_none_or(|(best, _)| s > best + SCORE_EPS) {
                    pick = Some((s, i));
                }
            }
            match pick {
                Some((_, i)) => state.push(p, i),
                None => break,
            }
        }
        let s = state.score(p, w);
        let key = state.sorted_key();
        if better(s, &key, best_score, &best_key) {
            best_score = s;
            best_key = key;
        }
    }
    best_key
}

/// Best structurally consistent mapping from `base` to `target`.
pub fn best_mapping(base: &SemanticNetwork, target: &SemanticNetwork, weights: &SmeWeights) -> AnalogyMapping {
    let hyps = match_hypotheses(base, target);
    if hyps.is_empty() {
        return AnalogyMapping::default();
    }
    let problem = Problem::new(base, target, &hyps);
    let chosen = if hyps.len() <= weights.exhaustive_cutoff {
        exact_search(&problem, weights)
    } else {
        greedy_search(&problem, weights)
    };
    let mut mapping = AnalogyMapping::default();
    for i in chosen {
        let h = &hyps[i];
        for (b, t) in h.implied() {
            mapping.concept_pairs.insert(b, t);
        }
        mapping.relation_pairs.insert(h.base_rel.clone(), h.target_rel.clone());
    }
    mapping.score = score(&mapping, weights);
    mapping
}

/// Analogical similarity of `individual` to `base`.
pub fn fitness(base: &SemanticNetwork, individual: &SemanticNetwork, weights: &SmeWeights) -> f64 {
    best_mapping(base, individual, weights).score
}

/// Marker for a base element without a counterpart.
pub const UNMATCHED: &str = "\u{2014}";

/// Base elements next to their counterparts, concepts first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrespondenceTable {
    pub concepts: Vec<(String, Option<String>)>,
    pub relations: Vec<(String, Option<String>)>,
}

/// Lay out `mapping` against every concept and relation of `base`.
pub fn correspondence_table(base: &SemanticNetwork, mapping: &AnalogyMapping) -> CorrespondenceTable {
    CorrespondenceTable {
        concepts: base
            .concepts()
            .iter()
            .map(|c| (c.to_string(), mapping.concept_pairs.get(c).map(Concept::to_string)))
            .collect(),
        relations: base
            .relations()
            .iter()
            .map(|r| (r.to_string(), mapping.relation_pairs.get(r).map(Relation::to_string)))
            .collect(),
    }
}

impl CorrespondenceTable {
    fn rows(&self) -> impl Iterator<Item = (&str, &str)> {
        self.concepts
            .iter()
            .chain(&self.relations)
            .map(|(b, t)| (b.as_str(), t.as_deref().unwrap_or(UNMATCHED)))
    }

    /// Aligned plain text with `Concepts` and `Relations` sections.
    pub fn to_text(&self) -> String {
        let width = self.rows().map(|(b, _)| b.chars().count()).max().unwrap_or(0).max(4) + 2;
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}Target", "Base");
        for (title, rows) in [("Concepts", &self.concepts), ("Relations", &self.relations)] {
            let _ = writeln!(out, "{title}");
            for (b, t) in rows {
                let _ = writeln!(out, "{:<width$}{}", b, t.as_deref().unwrap_or(UNMATCHED));
            }
        }
        out
    }

    /// Two-column CSV (`base,target`), concepts then relations.
    pub fn to_csv(&self) -> String {
        fn quote(s: &str) -> String {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        }
        let mut out = String::from("base,target\n");
        for (b, t) in self.rows() {
            let _ = writeln!(out, "{},{}", quote(b), quote(t));
        }
        out
    }
}

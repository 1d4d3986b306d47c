//! Random network growth and initial populations.

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Concept, SemanticNetwork};
use crate::seed;
use crate::store::{KnowledgeStore, StoreError};

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("generation budget fields must be >= 1 (size_network={size_network}, count_timeout={count_timeout})")]
    InvalidBudget { size_network: usize, count_timeout: usize },
    #[error("population size must be >= 1")]
    EmptyPopulation,
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Target concept count and trial limit for one random network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationBudget {
    size_network: usize,
    count_timeout: usize,
}

impl GenerationBudget {
    pub fn new(size_network: usize, count_timeout: usize) -> Result<Self, GenerationError> {
        if size_network == 0 || count_timeout == 0 {
            return Err(GenerationError::InvalidBudget { size_network, count_timeout });
        }
        Ok(GenerationBudget { size_network, count_timeout })
    }

    pub fn size_network(&self) -> usize {
        self.size_network
    }

    pub fn count_timeout(&self) -> usize {
        self.count_timeout
    }
}

/// Grow a random network out of store relations.
///
/// A seed concept is drawn until one with at least `size_network` involved
/// relations turns up or `count_timeout` draws are spent; on timeout the last
/// draw is used. Growth then repeatedly picks a member concept and appends one
/// of its stored relations (with the other endpoint) until the network holds
/// `size_network` concepts or `count_timeout` growth trials have been spent.
/// Drawing a relation the network already has uses up a trial.
///
/// `start` skips the seed search and grows from the given concept.
pub fn random_network<R: Rng + ?Sized>(
    store: &KnowledgeStore,
    budget: GenerationBudget,
    score_min: i8,
    rng: &mut R,
    start: Option<&Concept>,
) -> Result<SemanticNetwork, StoreError> {
    let seed_concept = match start {
        Some(c) => c.clone(),
        None => {
            let mut pick = store.random_concept(score_min, rng)?;
            for trial in 0..budget.count_timeout {
                if trial > 0 {
                    pick = store.random_concept(score_min, rng)?;
                }
                // Relation count against the concept budget, as in the original
                // procedure; it only biases the seed towards busier concepts.
                if store.involved_relations(&pick, score_min).len() >= budget.size_network {
                    break;
                }
            }
            pick
        }
    };

    let mut net = SemanticNetwork::singleton(seed_concept);
    let mut trials = 0;
    while net.concept_count() < budget.size_network && trials < budget.count_timeout {
        let idx = rng.random_range(0..net.concept_count());
        let concept = net.concepts().iter().nth(idx).expect("index in range").clone();
        let involved = store.involved_relations(&concept, score_min);
        if !involved.is_empty() {
            let pick = involved[rng.random_range(0..involved.len())];
            net.add_relation(pick.relation().clone());
        }
        trials += 1;
    }
    Ok(net)
}

/// `size_pop` independent random networks. Member `i` grows from its own
/// generator seeded with `seed::derive(population_seed, i)`, so the result is
/// the same however the work is spread over threads.
pub fn initialize_population(
    store: &KnowledgeStore,
    size_pop: usize,
    budget: GenerationBudget,
    score_min: i8,
    population_seed: u64,
) -> Result<Vec<SemanticNetwork>, GenerationError> {
    if size_pop == 0 {
        return Err(GenerationError::EmptyPopulation);
    }
    (0..size_pop)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::rng_from_seed(seed::derive(population_seed, i as u64));
            random_network(store, budget, score_min, &mut rng, None).map_err(GenerationError::from)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::seed::rng_from_seed;

    #[test]
    fn budget_must_be_positive() {
        assert!(GenerationBudget::new(0, 5).is_err());
        assert!(GenerationBudget::new(5, 0).is_err());
        assert!(GenerationBudget::new(1, 1).is_ok());
    }

    #[test]
    fn size_one_gives_a_lone_concept() {
        let store = fixtures::store(fixtures::FIG3_STORE);
        let budget = GenerationBudget::new(1, 10).unwrap();
        for s in 0..20 {
            let net = random_network(&store, budget, 2, &mut rng_from_seed(s), None).unwrap();
            assert_eq!(net.size(), (1, 0));
        }
    }

    #[test]
    fn grows_five_connected_concepts_around_human() {
        let store = fixtures::store(fixtures::FIG3_STORE);
        let budget = GenerationBudget::new(5, 10).unwrap();
        let human = Concept::new("human").unwrap();
        let mut reached = 0;
        for s in 0..50 {
            let net = random_network(&store, budget, 2, &mut rng_from_seed(s), Some(&human)).unwrap();
            assert!(net.contains_concept(&human));
            assert!(net.concept_count() <= 5);
            assert_eq!(net.clusters().len(), 1);
            assert!(store.validates(&net, 2));
            if net.concept_count() == 5 {
                reached += 1;
            }
        }
        assert!(reached > 25, "only {reached} of 50 runs reached five concepts");
    }

    #[test]
    fn exhausted_threshold_is_an_error() {
        let store = fixtures::store(fixtures::FIG3_STORE);
        let budget = GenerationBudget::new(3, 10).unwrap();
        assert!(matches!(
            random_network(&store, budget, 9, &mut rng_from_seed(0), None),
            Err(StoreError::Exhausted { .. })
        ));
    }

    #[test]
    fn population_has_requested_size() {
        let store = fixtures::store(fixtures::FIG3_STORE);
        let budget = GenerationBudget::new(5, 10).unwrap();
        assert_eq!(initialize_population(&store, 1, budget, 2, 7).unwrap().len(), 1);
        assert_eq!(initialize_population(&store, 200, budget, 2, 7).unwrap().len(), 200);
        assert!(matches!(
            initialize_population(&store, 0, budget, 2, 7),
            Err(GenerationError::EmptyPopulation)
        ));
    }
}

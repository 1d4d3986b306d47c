//! The generational loop.
//!
//! Each generation evaluates every member against the base network, then
//! builds the next population from `c` crossover events (two offspring each),
//! `r - 1` selected reproductions that are mutated with probability
//! `prob_mut`, and one copy of the current best member, in that order:
//!
//! ```text
//! c = floor(size_pop * prob_rec / 2), capped so that r >= 1
//! r = size_pop - 2c
//! ```
//!
//! Tournament draws happen serially on the generation's selection stream;
//! variation of each slot runs in parallel on its own stream (see [`crate::seed`]).

use std::fmt;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::NetworkDocument;
use crate::generation::{initialize_population, GenerationBudget, GenerationError};
use crate::graph::{GraphError, SemanticNetwork, MAX_SCORE, MIN_SCORE};
use crate::seed;
use crate::sme::{self, AnalogyMapping, SmeWeights};
use crate::store::KnowledgeStore;
use crate::variation::{self, MutationKind, Operator};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid parameter {name}: {message}")]
    InvalidParam { name: &'static str, message: String },
    #[error(transparent)]
    Generation(#[from] GenerationError),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn invalid(name: &'static str, message: impl Into<String>) -> EngineError {
    EngineError::InvalidParam { name, message: message.into() }
}

/// Algorithm parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionParams {
    pub size_pop: usize,
    pub prob_rec: f64,
    pub prob_mut: f64,
    pub size_network: usize,
    pub score_min: i8,
    pub count_timeout: usize,
    pub size_tourn: usize,
    pub prob_win: f64,
    pub max_generations: usize,
    pub master_seed: u64,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        EvolutionParams {
            size_pop: 200,
            prob_rec: 0.85,
            prob_mut: 0.15,
            size_network: 5,
            score_min: 2,
            count_timeout: 10,
            size_tourn: 8,
            prob_win: 0.8,
            max_generations: 50,
            master_seed: 0,
        }
    }
}

impl EvolutionParams {
    pub fn validate(&self) -> Result<(), EngineError> {
        fn unit(name: &'static str, p: f64) -> Result<(), EngineError> {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(invalid(name, format!("{p} is outside [0, 1]")))
            }
        }
        if self.size_pop == 0 {
            return Err(invalid("size_pop", "must be >= 1"));
        }
        unit("prob_rec", self.prob_rec)?;
        unit("prob_mut", self.prob_mut)?;
        unit("prob_win", self.prob_win)?;
        if self.size_network == 0 {
            return Err(invalid("size_network", "must be >= 1"));
        }
        if !(MIN_SCORE..=MAX_SCORE).contains(&self.score_min) {
            return Err(invalid("score_min", format!("{} is outside [{MIN_SCORE}, {MAX_SCORE}]", self.score_min)));
        }
        if self.count_timeout == 0 {
            return Err(invalid("count_timeout", "must be >= 1"));
        }
        if self.size_tourn == 0 || self.size_tourn > self.size_pop {
            return Err(invalid("size_tourn", format!("{} is outside [1, size_pop={}]", self.size_tourn, self.size_pop)));
        }
        Ok(())
    }

    pub fn budget(&self) -> Result<GenerationBudget, EngineError> {
        Ok(GenerationBudget::new(self.size_network, self.count_timeout)?)
    }

    /// How the next population is made up.
    pub fn composition(&self) -> Composition {
        // The epsilon keeps products such as 200 * 0.85 from flooring one short.
        let raw = (self.size_pop as f64 * self.prob_rec / 2.0 + 1e-9).floor() as usize;
        let crossover_events = raw.min((self.size_pop - 1) / 2);
        let reproductions = self.size_pop - 2 * crossover_events;
        Composition {
            crossover_events,
            crossover_offspring: 2 * crossover_events,
            reproductions: reproductions - 1,
            elite: 1,
        }
    }
}

/// Slot counts of one generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Composition {
    pub crossover_events: usize,
    pub crossover_offspring: usize,
    /// Selected members subject to mutation (`r - 1`).
    pub reproductions: usize,
    pub elite: usize,
}

impl Composition {
    pub fn total(&self) -> usize {
        self.crossover_offspring + self.reproductions + self.elite
    }
}

/// Stop once the best fitness has moved by no more than `epsilon` over the
/// last `window` generations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlateauRule {
    pub epsilon: f64,
    pub window: usize,
}

impl Default for PlateauRule {
    fn default() -> Self {
        PlateauRule { epsilon: 1e-9, window: 15 }
    }
}

impl PlateauRule {
    /// `best[t]` is the best fitness of generation `t`.
    pub fn reached(&self, best: &[f64]) -> bool {
        if self.window == 0 || best.len() <= self.window {
            return false;
        }
        let last = best.len() - 1;
        (best[last] - best[last - self.window]).abs() <= self.epsilon
    }

    /// First generation at which the rule fires, if any.
    pub fn first_reached(&self, best: &[f64]) -> Option<usize> {
        (0..best.len()).find(|&t| self.reached(&best[..=t]))
    }
}

/// Summary of one evaluated generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub avg_fitness: f64,
    /// Relation count of the best member.
    pub best_size: usize,
    /// Mean relation count.
    pub avg_size: f64,
}

pub const STATS_HEADER: &str = "generation,best_fitness,avg_fitness,best_size,avg_size";

impl GenerationStats {
    pub fn compute(generation: usize, population: &[SemanticNetwork], fitness: &[f64]) -> Self {
        let best = best_index(fitness);
        let n = population.len() as f64;
        GenerationStats {
            generation,
            best_fitness: fitness[best],
            avg_fitness: fitness.iter().sum::<f64>() / n,
            best_size: population[best].relation_count(),
            avg_size: population.iter().map(|m| m.relation_count()).sum::<usize>() as f64 / n,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.generation, self.best_fitness, self.avg_fitness, self.best_size, self.avg_size
        )
    }
}

/// Whole stats series as CSV text.
pub fn stats_csv(stats: &[GenerationStats]) -> String {
    let mut out = String::from(STATS_HEADER);
    out.push('\n');
    for s in stats {
        out.push_str(&s.csv_row());
        out.push('\n');
    }
    out
}

/// Fitness of every member, evaluated in parallel.
pub fn evaluate_fitnesses(base: &SemanticNetwork, population: &[SemanticNetwork], weights: &SmeWeights) -> Vec<f64> {
    population.par_iter().map(|m| sme::fitness(base, m, weights)).collect()
}

/// Index of the highest fitness; ties go to the lowest index.
pub fn best_index(fitness: &[f64]) -> usize {
    let mut best = 0;
    for (i, &f) in fitness.iter().enumerate() {
        if f > fitness[best] {
            best = i;
        }
    }
    best
}

/// Tournament selection. A random first winner meets `size_tourn - 1`
/// random opponents; an opponent at least as fit takes over with probability
/// `prob_win`. Returns a member index.
pub fn select<R: Rng + ?Sized>(fitness: &[f64], size_tourn: usize, prob_win: f64, rng: &mut R) -> usize {
    let n = fitness.len();
    let mut winner = rng.random_range(0..n);
    for _ in 1..size_tourn {
        let opponent = rng.random_range(0..n);
        if fitness[opponent] >= fitness[winner] && rng.random::<f64>() <= prob_win {
            winner = opponent;
        }
    }
    winner
}

/// What happened while building one population.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub crossover_offspring: usize,
    pub reproductions: usize,
    pub elite: usize,
    pub xover1: usize,
    pub xover2: usize,
    /// Reproductions that drew a mutation.
    pub mutated: usize,
    /// Per mutation kind, in [`MutationKind::ALL`] order.
    pub mutation_kinds: [usize; 6],
    /// Mutations that found no feasible kind.
    pub mutation_failures: usize,
    pub elite_index: usize,
}

enum Slot {
    Crossover(usize, usize),
    Reproduce(usize),
}

/// Build `P(t+1)` from an evaluated `P(t)`.
pub fn next_generation(
    store: &KnowledgeStore,
    population: &[SemanticNetwork],
    fitness: &[f64],
    params: &EvolutionParams,
    generation_seed: u64,
) -> (Vec<SemanticNetwork>, GenerationReport) {
    assert_eq!(population.len(), fitness.len(), "fitness table out of step with population");
    let comp = params.composition();
    let mut sel = seed::rng_from_seed(seed::derive(generation_seed, seed::SELECTION_STREAM));
    let mut slots = Vec::with_capacity(comp.crossover_events + comp.reproductions);
    for _ in 0..comp.crossover_events {
        let p1 = select(fitness, params.size_tourn, params.prob_win, &mut sel);
        let p2 = select(fitness, params.size_tourn, params.prob_win, &mut sel);
        slots.push(Slot::Crossover(p1, p2));
    }
    for _ in 0..comp.reproductions {
        slots.push(Slot::Reproduce(select(fitness, params.size_tourn, params.prob_win, &mut sel)));
    }

    let outcomes: Vec<(Vec<SemanticNetwork>, Option<Operator>)> = slots
        .par_iter()
        .enumerate()
        .map(|(k, slot)| {
            let mut rng = seed::rng_from_seed(seed::derive(generation_seed, k as u64));
            match *slot {
                Slot::Crossover(a, b) => {
                    let out = variation::crossover(store, &population[a], &population[b], params.score_min, &mut rng);
                    (out.offspring, Some(out.operator))
                }
                Slot::Reproduce(m) => {
                    if rng.random::<f64>() < params.prob_mut {
                        let out = variation::mutate(store, &population[m], params.score_min, params.count_timeout, &mut rng);
                        (out.offspring, Some(out.operator))
                    } else {
                        (vec![population[m].clone()], None)
                    }
                }
            }
        })
        .collect();

    let mut report = GenerationReport::default();
    let mut next = Vec::with_capacity(population.len());
    for (offspring, op) in outcomes {
        match op {
            Some(Operator::CrossoverI) => report.xover1 += 1,
            Some(Operator::CrossoverII) => report.xover2 += 1,
            Some(Operator::Mutation(kind)) => {
                report.mutated += 1;
                let i = MutationKind::ALL.iter().position(|k| *k == kind).expect("listed kind");
                report.mutation_kinds[i] += 1;
            }
            Some(Operator::None) => {
                report.mutated += 1;
                report.mutation_failures += 1;
            }
            None => {}
        }
        if matches!(op, Some(Operator::CrossoverI | Operator::CrossoverII)) {
            report.crossover_offspring += offspring.len();
        } else {
            report.reproductions += offspring.len();
        }
        next.extend(offspring);
    }
    report.elite_index = best_index(fitness);
    next.push(population[report.elite_index].clone());
    report.elite = 1;
    debug_assert_eq!(next.len(), population.len());
    (next, report)
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxGenerations,
    Plateau,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::MaxGenerations => "max_generations",
            StopReason::Plateau => "plateau",
        })
    }
}

/// Everything needed to continue a run from generation `generation`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub params: EvolutionParams,
    pub generation: usize,
    /// Seed of the generator that will build the next population.
    pub next_generation_seed: u64,
    pub population: Vec<NetworkDocument>,
    pub stats: Vec<GenerationStats>,
}

impl Checkpoint {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), EngineError> {
        let text = serde_json::to_string(self).map_err(|e| EngineError::Checkpoint(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EngineError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| EngineError::Checkpoint(e.to_string()))
    }
}

/// Outcome of a finished run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub best: SemanticNetwork,
    pub best_fitness: f64,
    pub mapping: AnalogyMapping,
    pub stats: Vec<GenerationStats>,
    pub stop: StopReason,
}

/// A run in progress, always holding an evaluated population.
pub struct Evolution<'a> {
    store: &'a KnowledgeStore,
    base: &'a SemanticNetwork,
    params: EvolutionParams,
    weights: SmeWeights,
    plateau: PlateauRule,
    generation: usize,
    population: Vec<SemanticNetwork>,
    fitness: Vec<f64>,
    stats: Vec<GenerationStats>,
}

impl<'a> Evolution<'a> {
    /// Initialize and evaluate generation 0.
    pub fn new(
        store: &'a KnowledgeStore,
        base: &'a SemanticNetwork,
        params: EvolutionParams,
        weights: SmeWeights,
        plateau: PlateauRule,
    ) -> Result<Self, EngineError> {
        params.validate()?;
        let init_seed = seed::derive(params.master_seed, seed::INIT_STREAM);
        let population = initialize_population(store, params.size_pop, params.budget()?, params.score_min, init_seed)?;
        let fitness = evaluate_fitnesses(base, &population, &weights);
        let stats = vec![GenerationStats::compute(0, &population, &fitness)];
        log::debug!("generation 0: {}", stats[0].csv_row());
        Ok(Evolution { store, base, params, weights, plateau, generation: 0, population, fitness, stats })
    }

    /// Continue from a checkpoint taken with the same parameters.
    pub fn resume(
        store: &'a KnowledgeStore,
        base: &'a SemanticNetwork,
        weights: SmeWeights,
        plateau: PlateauRule,
        checkpoint: Checkpoint,
    ) -> Result<Self, EngineError> {
        checkpoint.params.validate()?;
        if checkpoint.population.len() != checkpoint.params.size_pop {
            return Err(EngineError::Checkpoint(format!(
                "population has {} members, expected {}",
                checkpoint.population.len(),
                checkpoint.params.size_pop
            )));
        }
        if checkpoint.stats.len() != checkpoint.generation + 1 {
            return Err(EngineError::Checkpoint("stats do not cover every generation".into()));
        }
        let population = checkpoint
            .population
            .into_iter()
            .map(NetworkDocument::into_network)
            .collect::<Result<Vec<_>, _>>()?;
        let fitness = evaluate_fitnesses(base, &population, &weights);
        Ok(Evolution {
            store,
            base,
            params: checkpoint.params,
            weights,
            plateau,
            generation: checkpoint.generation,
            population,
            fitness,
            stats: checkpoint.stats,
        })
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn population(&self) -> &[SemanticNetwork] {
        &self.population
    }

    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn stats(&self) -> &[GenerationStats] {
        &self.stats
    }

    pub fn params(&self) -> &EvolutionParams {
        &self.params
    }

    pub fn stop_reason(&self) -> Option<StopReason> {
        if self.generation >= self.params.max_generations {
            return Some(StopReason::MaxGenerations);
        }
        let best: Vec<f64> = self.stats.iter().map(|s| s.best_fitness).collect();
        self.plateau.reached(&best).then_some(StopReason::Plateau)
    }

    /// Advance one generation and evaluate it.
    pub fn step(&mut self) -> GenerationReport {
        let gseed = seed::generation_seed(self.params.master_seed, self.generation);
        let (next, report) = next_generation(self.store, &self.population, &self.fitness, &self.params, gseed);
        self.generation += 1;
        self.population = next;
        self.fitness = evaluate_fitnesses(self.base, &self.population, &self.weights);
        let stats = GenerationStats::compute(self.generation, &self.population, &self.fitness);
        log::debug!(
            "generation {}: {} | xover1={} xover2={} mutated={} failed={} elite={}",
            self.generation,
            stats.csv_row(),
            report.xover1,
            report.xover2,
            report.mutated,
            report.mutation_failures,
            report.elite_index
        );
        self.stats.push(stats);
        report
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            params: self.params.clone(),
            generation: self.generation,
            next_generation_seed: seed::generation_seed(self.params.master_seed, self.generation),
            population: self.population.iter().map(NetworkDocument::from_network).collect(),
            stats: self.stats.clone(),
        }
    }

    pub fn best(&self) -> (&SemanticNetwork, f64) {
        let i = best_index(&self.fitness);
        (&self.population[i], self.fitness[i])
    }

    /// Best member of the current generation with its mapping.
    pub fn finish(self, stop: StopReason) -> RunResult {
        let i = best_index(&self.fitness);
        let best = self.population[i].clone();
        let mapping = sme::best_mapping(self.base, &best, &self.weights);
        RunResult { best, best_fitness: self.fitness[i], mapping, stats: self.stats, stop }
    }
}

/// Run to a stop criterion. `observe` sees every evaluated generation,
/// including generation 0.
pub fn run(
    store: &KnowledgeStore,
    base: &SemanticNetwork,
    params: EvolutionParams,
    weights: SmeWeights,
    plateau: PlateauRule,
    mut observe: impl FnMut(&Evolution),
) -> Result<RunResult, EngineError> {
    let evo = Evolution::new(store, base, params, weights, plateau)?;
    observe(&evo);
    Ok(drive(evo, &mut observe))
}

/// Run an already started evolution to a stop criterion.
pub fn drive(mut evo: Evolution, observe: &mut impl FnMut(&Evolution)) -> RunResult {
    loop {
        if let Some(stop) = evo.stop_reason() {
            log::info!("stopping at generation {}: {stop}", evo.generation());
            return evo.finish(stop);
        }
        evo.step();
        observe(&evo);
    }
}

//! The `memevo` command line.
//!
//! ```text
//! memevo ingest DUMP... [--snapshot FILE] [--score-min N]
//! memevo evolve --config run.toml [--seed N] [--generations N] [--score-min N] [--out-dir DIR] [--resume CHECKPOINT]
//! memevo score BASE TARGET [--csv]
//! memevo generate-random (--dumps FILE... | --snapshot FILE) [--size N] [--seed N] [--out FILE]
//! ```
//!
//! `--workers N` sizes the thread pool; results do not depend on it.
//! Exit codes: 0 success, 2 configuration error, 3 data error, 1 anything else.

pub mod config;
pub mod snapshot;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use memevo_core::engine::{self, Checkpoint, EngineError, Evolution, StopReason};
use memevo_core::format::{self, FormatError};
use memevo_core::generation::{random_network, GenerationBudget, GenerationError};
use memevo_core::graph::MIN_SCORE;
use memevo_core::sme::{self, correspondence_table};
use memevo_core::store::StoreError;
use memevo_core::{seed, Concept, SemanticNetwork, SmeWeights};
use serde::Serialize;
use thiserror::Error;

pub use config::{ExportToggles, RunConfig};
use snapshot::{dumps_key, file_sha256, load_store, Snapshot};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::InvalidParam { .. } | EngineError::Generation(GenerationError::InvalidBudget { .. }) => {
                CliError::Config(e.to_string())
            }
            EngineError::Io(source) => CliError::io("checkpoint", source),
            other => CliError::Data(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "memevo", version, about = "Evolve commonsense semantic networks towards an analogy with a base network")]
pub struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse assertion dumps, print a summary and write a store snapshot.
    Ingest(IngestArgs),
    /// Run the evolutionary algorithm.
    Evolve(EvolveArgs),
    /// Print the best correspondence between two networks and its score.
    Score(ScoreArgs),
    /// Grow one random network from the store.
    GenerateRandom(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(required = true)]
    pub dumps: Vec<PathBuf>,
    /// Drop assertions scored below this.
    #[arg(long, default_value_t = MIN_SCORE, allow_hyphen_values = true)]
    pub score_min: i8,
    /// Snapshot file (default: store.snapshot.json in --out-dir).
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub score_min: Option<i8>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Continue from a checkpoint written by an earlier run.
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    pub base: PathBuf,
    pub target: PathBuf,
    /// Print the table as CSV.
    #[arg(long)]
    pub csv: bool,
    /// Take SME weights from this run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, num_args = 1..)]
    pub dumps: Vec<PathBuf>,
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    /// Target concept count.
    #[arg(long, default_value_t = 5)]
    pub size: usize,
    #[arg(long, default_value_t = 10)]
    pub timeout: usize,
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    pub score_min: i8,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grow from this concept instead of a random one.
    #[arg(long)]
    pub start: Option<String>,
    /// Output file (JSON); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Run a parsed command line, returning what should go to stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be >= 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Ingest(a) => cmd_ingest(&a),
        Command::Evolve(a) => cmd_evolve(&a),
        Command::Score(a) => cmd_score(&a),
        Command::GenerateRandom(a) => cmd_generate_random(&a),
    })
}

fn read_network(path: &Path) -> Result<SemanticNetwork, CliError> {
    format::read_network(path).map_err(|e| match e {
        FormatError::Io { .. } => CliError::Data(e.to_string()),
        other => CliError::Data(format!("{}: {other}", path.display())),
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn cmd_ingest(args: &IngestArgs) -> Result<String, CliError> {
    for d in &args.dumps {
        if !d.is_file() {
            return Err(CliError::Config(format!("dump file {} does not exist", d.display())));
        }
    }
    let store = memevo_core::KnowledgeStore::ingest(&args.dumps, args.score_min)?;
    let snapshot_path = args.snapshot.clone().unwrap_or_else(|| args.out_dir.join("store.snapshot.json"));
    if let Some(dir) = snapshot_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    }
    Snapshot::of_store(&store, dumps_key(&args.dumps)?, args.score_min).write(&snapshot_path)?;

    let mut out = format!("assertions: {}\nconcepts: {}\n", store.len(), store.concept_count());
    for (origin, n) in store.origin_counts() {
        out.push_str(&format!("  {origin}: {n}\n"));
    }
    out.push_str(&format!("snapshot: {}\n", snapshot_path.display()));
    Ok(out)
}

pub fn cmd_score(args: &ScoreArgs) -> Result<String, CliError> {
    let weights = match &args.config {
        Some(p) => RunConfig::load(p)?.sme,
        None => SmeWeights::default(),
    };
    let base = read_network(&args.base)?;
    let target = read_network(&args.target)?;
    let mapping = sme::best_mapping(&base, &target, &weights);
    let table = correspondence_table(&base, &mapping);
    let mut out = if args.csv { table.to_csv() } else { table.to_text() };
    if !args.csv {
        out.push_str(&format!("score: {}\n", mapping.score));
    }
    Ok(out)
}

pub fn cmd_generate_random(args: &GenerateArgs) -> Result<String, CliError> {
    let budget = GenerationBudget::new(args.size, args.timeout).map_err(|e| CliError::Config(e.to_string()))?;
    for d in &args.dumps {
        if !d.is_file() {
            return Err(CliError::Config(format!("dump file {} does not exist", d.display())));
        }
    }
    let store = load_store(&args.dumps, args.snapshot.as_deref(), args.score_min)?;
    let start = args
        .start
        .as_deref()
        .map(|s| Concept::new(s).map_err(|e| CliError::Config(e.to_string())))
        .transpose()?;
    let mut rng = seed::rng_from_seed(args.seed);
    let net = random_network(&store, budget, args.score_min, &mut rng, start.as_ref())?;
    let json = format::network_to_json(&net);
    let (concepts, relations) = net.size();
    match &args.out {
        Some(path) => {
            write_file(path, &json)?;
            Ok(format!("concepts: {concepts}\nrelations: {relations}\nwritten: {}\n", path.display()))
        }
        None => {
            eprintln!("concepts: {concepts}, relations: {relations}");
            Ok(json)
        }
    }
}

/// Record of an `evolve` invocation, written next to its artifacts.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub version: &'static str,
    /// Config file that reproduces this run (`memevo evolve --config <it>`).
    pub config_file: String,
    pub config: RunConfig,
    pub master_seed: u64,
    pub dump_sha256: Vec<String>,
    pub base_sha256: String,
    pub resumed_from: Option<String>,
    pub generations: usize,
    pub stop_reason: StopReason,
    pub best_fitness: f64,
    pub best_concepts: usize,
    pub best_relations: usize,
    pub artifacts: Vec<String>,
    pub wall_time_seconds: f64,
}

pub const BEST_NETWORK_FILE: &str = "best_network.json";
pub const STATS_FILE: &str = "stats.csv";
pub const TABLE_TEXT_FILE: &str = "correspondence.txt";
pub const TABLE_CSV_FILE: &str = "correspondence.csv";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const RESOLVED_CONFIG_FILE: &str = "run.toml";

/// Config file contents with command-line overrides applied; flags win.
pub fn effective_config(args: &EvolveArgs) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(s) = args.seed {
        config.evolution.master_seed = s;
    }
    if let Some(g) = args.generations {
        config.evolution.max_generations = g;
    }
    if let Some(s) = args.score_min {
        config.evolution.score_min = s;
    }
    if let Some(d) = &args.out_dir {
        config.out_dir = d.clone();
    }
    config.validate()?;
    Ok(config)
}

pub fn cmd_evolve(args: &EvolveArgs) -> Result<String, CliError> {
    let started = Instant::now();
    let config = effective_config(args)?;
    let mut checkpoint = args.resume.as_deref().map(Checkpoint::load).transpose()?;
    if let Some(cp) = checkpoint.as_mut() {
        // Only the generation limit may change on resume.
        cp.params.max_generations = config.evolution.max_generations;
        if cp.params != config.evolution {
            return Err(CliError::Config("checkpoint was taken with different evolution parameters".into()));
        }
    }
    let base = read_network(&config.base)?;
    let store = load_store(&config.dumps, config.snapshot.as_deref(), config.evolution.score_min)?;
    let out_dir = &config.out_dir;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(format!("creating {}", out_dir.display()), e))?;

    let evo = match checkpoint {
        Some(cp) => Evolution::resume(&store, &base, config.sme, config.plateau, cp)?,
        None => Evolution::new(&store, &base, config.evolution.clone(), config.sme, config.plateau)?,
    };
    let every = config.checkpoint_every;
    let checkpoint_path = out_dir.join(CHECKPOINT_FILE);
    let mut checkpoint_error = None;
    let mut observe = |evo: &Evolution| {
        if let Some(s) = evo.stats().last() {
            log::info!("generation {} best {} avg {}", s.generation, s.best_fitness, s.avg_fitness);
        }
        if every > 0 && evo.generation() > 0 && evo.generation() % every == 0 && checkpoint_error.is_none() {
            if let Err(e) = evo.checkpoint().save(&checkpoint_path) {
                checkpoint_error = Some(e);
            }
        }
    };
    let result = engine::drive(evo, &mut observe);
    if let Some(e) = checkpoint_error {
        return Err(e.into());
    }

    let mut artifacts = Vec::new();
    let mut emit = |name: &str, text: &str| -> Result<(), CliError> {
        write_file(&out_dir.join(name), text)?;
        artifacts.push(name.to_string());
        Ok(())
    };
    emit(BEST_NETWORK_FILE, &format::network_to_json(&result.best))?;
    if config.export.csv {
        emit(STATS_FILE, &engine::stats_csv(&result.stats))?;
    }
    if config.export.table {
        let table = correspondence_table(&base, &result.mapping);
        emit(TABLE_TEXT_FILE, &format!("{}score: {}\n", table.to_text(), result.mapping.score))?;
        emit(TABLE_CSV_FILE, &table.to_csv())?;
    }
    if config.export.dot {
        emit("base.dot", &base.to_dot("base"))?;
        emit("best_network.dot", &result.best.to_dot("best"))?;
    }
    // Resolved paths, overrides folded in.
    let mut resolved = config.clone();
    resolved.dumps = resolved.dumps.iter().map(|p| absolute(p)).collect();
    resolved.base = absolute(&resolved.base);
    resolved.out_dir = absolute(&resolved.out_dir);
    resolved.snapshot = resolved.snapshot.as_deref().map(absolute);
    emit(RESOLVED_CONFIG_FILE, &resolved.to_toml())?;

    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        config_file: out_dir.join(RESOLVED_CONFIG_FILE).display().to_string(),
        master_seed: resolved.evolution.master_seed,
        dump_sha256: config.dumps.iter().map(|d| file_sha256(d)).collect::<Result<_, _>>()?,
        base_sha256: file_sha256(&config.base)?,
        resumed_from: args.resume.as_ref().map(|p| p.display().to_string()),
        generations: result.stats.len() - 1,
        stop_reason: result.stop,
        best_fitness: result.best_fitness,
        best_concepts: result.best.concept_count(),
        best_relations: result.best.relation_count(),
        artifacts,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        config: resolved,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifests always serialize") + "\n";
    write_file(&out_dir.join(MANIFEST_FILE), &text)?;

    Ok(format!(
        "generations: {}\nstop: {}\nbest fitness: {}\nbest size: {} concepts, {} relations\noutput: {}\n",
        manifest.generations,
        manifest.stop_reason,
        manifest.best_fitness,
        manifest.best_concepts,
        manifest.best_relations,
        out_dir.display()
    ))
}

fn absolute(p: &Path) -> PathBuf {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf())
}

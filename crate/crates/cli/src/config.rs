//! Run configuration files.
//!
//! A run is described by one TOML file. Top-level keys name the inputs and
//! the output directory; the `[evolution]`, `[sme]`, `[plateau]` and
//! `[export]` tables hold everything else, each defaulting field by field.
//! Relative paths are resolved against the file's own directory.

use std::path::{Path, PathBuf};

use memevo_core::{EvolutionParams, PlateauRule, SmeWeights};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Assertion dump files.
    pub dumps: Vec<PathBuf>,
    /// Base network (JSON).
    pub base: PathBuf,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Indexed store cache; rebuilt when missing or stale.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot: Option<PathBuf>,
    /// Write a checkpoint every this many generations (0 = never).
    #[serde(default)]
    pub checkpoint_every: usize,
    #[serde(default)]
    pub evolution: EvolutionParams,
    #[serde(default)]
    pub sme: SmeWeights,
    #[serde(default)]
    pub plateau: PlateauRule,
    #[serde(default)]
    pub export: ExportToggles,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportToggles {
    /// Graphviz files for the base and best networks.
    pub dot: bool,
    /// Per-generation statistics.
    pub csv: bool,
    /// Correspondence table, text and CSV.
    pub table: bool,
}

impl Default for ExportToggles {
    fn default() -> Self {
        ExportToggles { dot: true, csv: true, table: true }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }

    /// Read a config file, resolving relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let dir = path.parent().unwrap_or(Path::new(""));
        config.resolve_paths(dir);
        Ok(config)
    }

    pub fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        self.dumps.iter_mut().for_each(fix);
        fix(&mut self.base);
        fix(&mut self.out_dir);
        if let Some(s) = self.snapshot.as_mut() {
            fix(s);
        }
    }

    /// Parameter ranges and input presence, checked before any work starts.
    pub fn validate(&self) -> Result<(), CliError> {
        self.evolution.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let w = &self.sme;
        if !(w.base_weight.is_finite() && w.base_weight >= 0.0 && w.trickle_factor.is_finite() && w.trickle_factor >= 0.0) {
            return Err(CliError::Config("sme weights must be finite and >= 0".into()));
        }
        if !(self.plateau.epsilon.is_finite() && self.plateau.epsilon >= 0.0) {
            return Err(CliError::Config("plateau.epsilon must be finite and >= 0".into()));
        }
        if self.dumps.is_empty() {
            return Err(CliError::Config("no assertion dumps listed".into()));
        }
        for p in self.dumps.iter().chain([&self.base]) {
            if !p.is_file() {
                return Err(CliError::Config(format!("input file {} does not exist", p.display())));
            }
        }
        Ok(())
    }
}

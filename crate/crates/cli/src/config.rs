//! Run configuration, read from JSON and overridden by flags.

use std::fs;
use std::path::{Path, PathBuf};

use lil_core::bitstream::CheckpointSet;
use lil_core::evaluator::Thresholds;
use lil_core::generators::GeneratorSpec;
use lil_core::Engine;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Tables,
    Generate,
    Analyze,
    Evaluate,
}

/// Theoretical tables default to `2^26 .. 2^34`.
pub const TABLE_BASE_EXP: u32 = 26;
pub const TABLE_COUNT: u32 = 9;
/// Commands that touch data default to `2^16 .. 2^20`.
pub const DESK_BASE_EXP: u32 = 16;
pub const DESK_COUNT: u32 = 5;

/// Optional overrides of the probability engine's numerical settings.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub quadrature: Option<f64>,
    pub tail_sigma: Option<f64>,
    pub pair_route: Option<f64>,
    pub strong_route: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub alpha: f64,
    /// Checkpoints are `2^(base + i)` for `0 <= i < count`.
    pub checkpoint_base_exp: Option<u32>,
    pub checkpoint_count: Option<u32>,
    pub generator: GeneratorSpec,
    /// Number of sequences in the corpus.
    pub m: u64,
    /// Root of all outputs.
    pub out: PathBuf,
    /// Corpus directory; defaults to `<out>/corpus`.
    pub corpus: Option<PathBuf>,
    /// Sequences included in the fine-grained plot trace.
    pub plot_sequences: u64,
    pub strong_pair: Option<(u64, u64)>,
    pub thresholds: Thresholds,
    pub tolerances: ToleranceOverrides,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            alpha: 0.1,
            checkpoint_base_exp: None,
            checkpoint_count: None,
            generator: GeneratorSpec::preset("drbg-sha256").expect("built-in preset"),
            m: 1000,
            out: PathBuf::from("liltest-out"),
            corpus: None,
            plot_sequences: 100,
            strong_pair: None,
            thresholds: Thresholds::default(),
            tolerances: ToleranceOverrides::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 0.25) {
            return Err(CliError::Usage(format!(
                "alpha = {} is outside (0, 0.25]",
                self.alpha
            )));
        }
        if self.m == 0 {
            return Err(CliError::Usage("corpus size m must be at least 1".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("quadrature", t.quadrature),
            ("tail_sigma", t.tail_sigma),
            ("pair_route", t.pair_route),
            ("strong_route", t.strong_route),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Usage(format!(
                        "tolerance {name} = {v} must be positive"
                    )));
                }
            }
        }
        self.checkpoints(Command::Tables)?;
        Ok(())
    }

    fn defaults_for(command: Command) -> (u32, u32) {
        match command {
            Command::Tables => (TABLE_BASE_EXP, TABLE_COUNT),
            _ => (DESK_BASE_EXP, DESK_COUNT),
        }
    }

    pub fn checkpoints(&self, command: Command) -> Result<CheckpointSet> {
        let (base, count) = Self::defaults_for(command);
        let base = self.checkpoint_base_exp.unwrap_or(base);
        let count = self.checkpoint_count.unwrap_or(count);
        if base < 16 || count == 0 || base + count > 41 {
            return Err(CliError::Usage(format!(
                "checkpoints 2^{base} .. 2^{} must lie within 2^16 .. 2^40",
                base + count.max(1) - 1
            )));
        }
        Ok(CheckpointSet::powers_of_two(base, count)?)
    }

    pub fn engine(&self) -> Engine {
        let mut e = Engine::default();
        let t = &self.tolerances;
        if let Some(v) = t.quadrature {
            e.tolerance = v;
        }
        if let Some(v) = t.tail_sigma {
            e.tail_sigma = v;
        }
        if let Some(v) = t.pair_route {
            e.pair_route_tolerance = v;
        }
        if let Some(v) = t.strong_route {
            e.strong_route_tolerance = v;
        }
        e
    }

    pub fn corpus_dir(&self) -> PathBuf {
        self.corpus
            .clone()
            .unwrap_or_else(|| self.out.join("corpus"))
    }

    pub fn tables_dir(&self) -> PathBuf {
        self.out.join("tables")
    }

    pub fn analysis_dir(&self) -> PathBuf {
        self.out.join("analysis")
    }

    pub fn evaluation_dir(&self) -> PathBuf {
        self.out.join("evaluation")
    }
}

//! The `liltest` pipeline: tables, corpus generation, analysis and evaluation.

pub mod analyze;
pub mod config;
pub mod error;
pub mod evaluate;
pub mod generate;
pub mod output;
pub mod tables;

use std::path::PathBuf;

use lil_core::evaluator::Verdict;

pub use config::{Command, RunConfig};
pub use error::{CliError, Result};

/// Files written by a command and, for `evaluate`, the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub verdict: Option<Verdict>,
}

pub fn run(command: Command, config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let (files, verdict) = match command {
        Command::Tables => (tables::run(config)?, None),
        Command::Generate => {
            let dir = config.corpus_dir();
            let manifest = generate::run(config)?;
            let files = manifest
                .files
                .iter()
                .map(|e| lil_core::generators::corpus::entry_path(&dir, e))
                .chain([dir.join(lil_core::generators::corpus::MANIFEST_FILE)])
                .collect();
            (files, None)
        }
        Command::Analyze => (analyze::run(config)?.files, None),
        Command::Evaluate => {
            let e = evaluate::run(config)?;
            (e.files, Some(e.report.verdict))
        }
    };
    Ok(Outcome { files, verdict })
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lil_cli::error::exit;
use lil_cli::{CliError, Command, RunConfig};
use lil_core::evaluator::Verdict;
use lil_core::generators::{GeneratorSpec, PRESETS};

/// Law-of-the-iterated-logarithm tests for pseudorandom generators.
#[derive(Debug, Parser)]
#[command(name = "liltest", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Significance level of the weak and strong tests.
    #[arg(long, global = true)]
    alpha: Option<f64>,

    /// Checkpoints start at 2^BASE_EXP bits.
    #[arg(long, global = true)]
    base_exp: Option<u32>,

    /// Number of power-of-two checkpoints.
    #[arg(long, global = true)]
    count: Option<u32>,

    /// Number of sequences.
    #[arg(long, global = true)]
    m: Option<u64>,

    /// Generator preset.
    #[arg(long, global = true, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    generator: Option<String>,

    /// Output root.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Theoretical probability tables.
    Tables,
    /// Write a corpus of generator output.
    Generate,
    /// Trace every sequence of the corpus.
    Analyze,
    /// Score the traces and print a verdict.
    Evaluate,
}

impl Sub {
    fn command(&self) -> Command {
        match self {
            Sub::Tables => Command::Tables,
            Sub::Generate => Command::Generate,
            Sub::Analyze => Command::Analyze,
            Sub::Evaluate => Command::Evaluate,
        }
    }
}

fn config_from(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut c = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(a) = cli.alpha {
        c.alpha = a;
    }
    if cli.base_exp.is_some() {
        c.checkpoint_base_exp = cli.base_exp;
    }
    if cli.count.is_some() {
        c.checkpoint_count = cli.count;
    }
    if let Some(m) = cli.m {
        c.m = m;
    }
    if let Some(g) = &cli.generator {
        c.generator = GeneratorSpec::preset(g)?;
    }
    if let Some(o) = &cli.out {
        c.out = o.clone();
    }
    c.command = Some(cli.command.command());
    Ok(c)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE
            } else {
                exit::SUCCESS
            } as u8);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let result = config_from(&cli).and_then(|c| lil_cli::run(cli.command.command(), &c));
    match result {
        Ok(outcome) => {
            for f in &outcome.files {
                log::debug!("wrote {}", f.display());
            }
            match outcome.verdict {
                Some(v) => {
                    println!(
                        "{}",
                        serde_json::to_string(&v)
                            .unwrap_or_default()
                            .trim_matches('"')
                    );
                    let code = if v == Verdict::Fail {
                        exit::VERDICT_FAIL
                    } else {
                        exit::SUCCESS
                    };
                    ExitCode::from(code as u8)
                }
                None => ExitCode::from(exit::SUCCESS as u8),
            }
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! `analyze`: per-sequence traces and empirical snapshots.

use std::path::PathBuf;

use lil_core::bitstream::CheckpointSet;
use lil_core::bitstream::SequenceSource;
use lil_core::evaluator::traces::{plot_checkpoints, trace_source, PLOT_UNIT_BITS};
use lil_core::evaluator::{restrict, snapshot};
use lil_core::generators::corpus::entry_path;
use lil_core::generators::{GeneratorKind, HashAlgorithm, Manifest};
use lil_core::probcalc::{PartitionB, PARTITION_CELLS};
use lil_core::Trace;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{csv, header, write_json, write_text};

pub const TRACES_FILE: &str = "traces.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusInfo {
    pub generator: GeneratorKind,
    pub hash: HashAlgorithm,
    pub seed_pattern: String,
    pub count: u64,
    pub bits_each: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceTrace {
    pub index: u64,
    pub seed: String,
    pub trace: Trace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub index: u64,
    pub file: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub config: RunConfig,
    pub corpus: CorpusInfo,
    pub checkpoints: Vec<u64>,
    pub sequences: Vec<SequenceTrace>,
    pub failures: Vec<Failure>,
}

impl TraceFile {
    pub fn generator_label(&self) -> String {
        lil_core::generators::GeneratorSpec {
            kind: self.corpus.generator.clone(),
            hash: self.corpus.hash,
            seed_pattern: self.corpus.seed_pattern.clone(),
        }
        .label()
    }

    pub fn traces(&self) -> Vec<Trace> {
        self.sequences.iter().map(|s| s.trace.clone()).collect()
    }
}

pub struct Analysis {
    pub traces: TraceFile,
    pub files: Vec<PathBuf>,
}

type PlotRow = Vec<Option<f64>>;

pub fn run(config: &RunConfig) -> Result<Analysis> {
    let checkpoints = config.checkpoints(Command::Analyze)?;
    let corpus_dir = config.corpus_dir();
    let manifest = Manifest::load(&corpus_dir)?;
    let plot_set = plot_checkpoints(manifest.bits_each);
    let with_plot = plot_set
        .as_ref()
        .map(|p| checkpoints.merge(p))
        .unwrap_or_else(|| checkpoints.clone());
    log::info!(
        "analyzing {} sequences from {} at {} checkpoints",
        manifest.files.len(),
        corpus_dir.display(),
        checkpoints.len()
    );

    let results: Vec<std::result::Result<(SequenceTrace, Option<Trace>), Failure>> = manifest
        .files
        .par_iter()
        .map(|e| {
            let plotted = e.index < config.plot_sequences && plot_set.is_some();
            let set: &CheckpointSet = if plotted { &with_plot } else { &checkpoints };
            let fail = |err: lil_core::LilError| Failure {
                index: e.index,
                file: e.file.clone(),
                error: err.to_string(),
            };
            let full: Trace = SequenceSource::open_file(entry_path(&corpus_dir, e))
                .and_then(|s| trace_source(s, set))
                .map_err(fail)?;
            let trace = restrict(&full, checkpoints.points()).map_err(fail)?;
            let plot = plotted.then_some(full);
            Ok((
                SequenceTrace {
                    index: e.index,
                    seed: e.seed.clone(),
                    trace,
                },
                plot,
            ))
        })
        .collect();

    let mut sequences = Vec::new();
    let mut plots = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok((s, plot)) => {
                if let Some(p) = plot {
                    plots.push((s.index, p));
                }
                sequences.push(s);
            }
            Err(f) => {
                log::error!("sequence {} ({}): {}", f.index, f.file, f.error);
                failures.push(f);
            }
        }
    }
    if sequences.is_empty() {
        return Err(CliError::Usage(format!(
            "no sequence in {} could be analyzed",
            corpus_dir.display()
        )));
    }

    let trace_file = TraceFile {
        config: config.clone(),
        corpus: CorpusInfo {
            generator: manifest.generator.clone(),
            hash: manifest.hash,
            seed_pattern: manifest.seed_pattern.clone(),
            count: manifest.count,
            bits_each: manifest.bits_each,
        },
        checkpoints: checkpoints.points().to_vec(),
        sequences,
        failures,
    };

    let dir = config.analysis_dir();
    let mut files = vec![write_json(&dir.join(TRACES_FILE), &trace_file)?];
    let traces = trace_file.traces();
    let mut counts = Vec::new();
    let mut masses = Vec::new();
    for &n in checkpoints.points() {
        let s = snapshot(&traces, n)?;
        masses.push(s.distribution::<f64>().mass);
        counts.push(s.counts);
    }
    let head = header("cell", checkpoints.points());
    files.push(write_text(
        &dir.join("snapshot_counts.csv"),
        &csv(&head, &cell_rows(&counts)),
    )?);
    files.push(write_text(
        &dir.join("snapshot.csv"),
        &csv(&head, &cell_rows(&masses)),
    )?);

    if let (Some(plot_set), false) = (&plot_set, plots.is_empty()) {
        let head = header("k,bits", plots.iter().map(|(i, _)| format!("seq{i}")));
        let rows: Vec<(String, PlotRow)> = plot_set
            .points()
            .iter()
            .map(|&n| {
                let k = ((n / PLOT_UNIT_BITS) as f64).sqrt().round() as u64;
                (
                    format!("{k},{n}"),
                    plots.iter().map(|(_, t)| t.s_lil_at(n)).collect(),
                )
            })
            .collect();
        let text = csv(
            &head,
            &rows
                .into_iter()
                .map(|(l, v)| {
                    (
                        l,
                        v.into_iter()
                            .map(|x| x.map(|x| x.to_string()).unwrap_or_default())
                            .collect(),
                    )
                })
                .collect::<Vec<(String, Vec<String>)>>(),
        );
        files.push(write_text(&dir.join("plot.csv"), &text)?);
    }
    Ok(Analysis {
        traces: trace_file,
        files,
    })
}

fn cell_rows<V: Copy>(cols: &[Vec<V>]) -> Vec<(String, Vec<V>)> {
    (0..PARTITION_CELLS)
        .map(|k| (PartitionB::label(k), cols.iter().map(|c| c[k]).collect()))
        .collect()
}

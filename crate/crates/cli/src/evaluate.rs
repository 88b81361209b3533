//! `evaluate`: scores analyzed traces against theory.

use std::path::PathBuf;

use lil_core::evaluator::{
    delta_wlil, evaluate, restrict, rmsd_wlil, run_pairs, run_weak, EvaluationOptions,
    EvaluationReport,
};
use lil_core::probcalc::{PartitionB, PARTITION_CELLS};
use lil_core::Trace;

use crate::analyze::{TraceFile, TRACES_FILE};
use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{csv, header, read_json, write_json, write_text};
use crate::tables::TABLE_ALPHAS;

pub const REPORT_FILE: &str = "report.json";

pub struct Evaluation {
    pub report: EvaluationReport,
    pub files: Vec<PathBuf>,
}

/// `alpha`, then `delta_wlil` and `rmsd_wlil` for that level.
pub type Score = (f64, f64, f64);

pub fn scores(config: &RunConfig, traces: &[Trace], checkpoints: &[u64]) -> Result<Vec<Score>> {
    let engine = config.engine();
    let mut alphas = TABLE_ALPHAS.to_vec();
    if !alphas.contains(&config.alpha) {
        alphas.push(config.alpha);
    }
    alphas
        .into_iter()
        .map(|alpha| {
            let theta = 1.0 - alpha;
            let theory = checkpoints
                .iter()
                .map(|&n| engine.weak_prob_1(theta, n))
                .collect::<lil_core::Result<Vec<_>>>()?;
            let delta = delta_wlil(&run_weak(traces, theta)?, &theory)?;
            let table = engine.weak_pair_table(alpha, checkpoints)?;
            let rmsd = rmsd_wlil(&run_pairs(traces, theta)?, &table)?;
            Ok((alpha, delta, rmsd))
        })
        .collect()
}

pub fn run(config: &RunConfig) -> Result<Evaluation> {
    let checkpoints = config.checkpoints(Command::Evaluate)?;
    let source = config.analysis_dir().join(TRACES_FILE);
    let trace_file: TraceFile = read_json(&source)?;
    let points = checkpoints.points();
    if let Some(n) = points.iter().find(|n| !trace_file.checkpoints.contains(n)) {
        return Err(CliError::Usage(format!(
            "{} has no values at {n} bits; rerun analyze with the same checkpoints",
            source.display()
        )));
    }
    let traces = trace_file
        .sequences
        .iter()
        .map(|s| restrict(&s.trace, points))
        .collect::<lil_core::Result<Vec<_>>>()?;
    let options = EvaluationOptions {
        thresholds: config.thresholds,
        strong_pair: config.strong_pair,
        ..EvaluationOptions::new(config.alpha, checkpoints.clone())
    };
    let engine = config.engine();
    let mut report = evaluate(&trace_file.generator_label(), &traces, &options, &engine)?;
    report.config = Some(
        serde_json::to_value(config).map_err(|source| CliError::Json {
            path: source_path(config),
            source,
        })?,
    );
    for w in &report.warnings {
        log::warn!("{w}");
    }
    if !trace_file.failures.is_empty() {
        report.warnings.push(format!(
            "{} sequences could not be analyzed and were left out",
            trace_file.failures.len()
        ));
    }

    let dir = config.evaluation_dir();
    let mut files = vec![write_json(&dir.join(REPORT_FILE), &report)?];

    let mut weak_rows: Vec<(String, Vec<String>)> = vec![(
        "lil_scale".into(),
        points
            .iter()
            .map(|&n| lil_core::lilstat::lil_scale(n as f64).to_string())
            .collect(),
    )];
    for alpha in TABLE_ALPHAS {
        let theta = 1.0 - alpha;
        let r = run_weak(&traces, theta)?;
        weak_rows.push((
            format!(">={theta}"),
            r.plus.iter().map(u64::to_string).collect(),
        ));
        weak_rows.push((
            format!("<=-{theta}"),
            r.minus.iter().map(u64::to_string).collect(),
        ));
    }
    files.push(write_text(
        &dir.join("weak_counts.csv"),
        &csv(&header("row", points), &weak_rows),
    )?);

    let d = |f: fn(&lil_core::Distances) -> f64| {
        report
            .snapshots
            .iter()
            .map(|s| f(&s.distances))
            .collect::<Vec<_>>()
    };
    let dist_rows = vec![
        ("tvd", d(|x| x.tvd)),
        ("hellinger", d(|x| x.hellinger)),
        ("rmsd", d(|x| x.rmsd)),
        (
            "expected_ideal_tvd",
            report
                .snapshots
                .iter()
                .map(|s| s.expected_ideal_tvd)
                .collect(),
        ),
    ];
    files.push(write_text(
        &dir.join("distances.csv"),
        &csv(&header("distance", points), &dist_rows),
    )?);

    let score_rows: Vec<(String, Vec<f64>)> = scores(config, &traces, points)?
        .into_iter()
        .map(|(a, delta, rmsd)| (a.to_string(), vec![delta, rmsd]))
        .collect();
    files.push(write_text(
        &dir.join("scores.csv"),
        &csv(&header("alpha", ["delta_wlil", "rmsd_wlil"]), &score_rows),
    )?);

    let empirical: Vec<_> = report
        .snapshots
        .iter()
        .map(|s| s.empirical.distribution::<f64>())
        .collect();
    let ideal = points
        .iter()
        .map(|&n| engine.mu_u(n))
        .collect::<lil_core::Result<Vec<_>>>()?;
    for (name, cols) in [("snapshot.csv", &empirical), ("ideal_snapshot.csv", &ideal)] {
        let rows: Vec<(String, Vec<f64>)> = (0..PARTITION_CELLS)
            .map(|k| {
                (
                    PartitionB::label(k),
                    cols.iter().map(|c| c.mass[k]).collect(),
                )
            })
            .collect();
        files.push(write_text(
            &dir.join(name),
            &csv(&header("cell", points), &rows),
        )?);
    }
    Ok(Evaluation { report, files })
}

fn source_path(config: &RunConfig) -> PathBuf {
    config.evaluation_dir().join(REPORT_FILE)
}

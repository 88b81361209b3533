//! `tables`: theoretical probabilities, independent of any corpus.

use std::path::PathBuf;

use lil_core::probcalc::strong::StrongRoutes;
use lil_core::probcalc::tables::{aleph, SnapshotTable, WeakPairTable};
use lil_core::probcalc::weak::ProbabilityBracket;
use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::error::Result;
use crate::output::{csv, header, write_json, write_text};

/// Significance levels always tabulated.
pub const TABLE_ALPHAS: [f64; 2] = [0.1, 0.05];

/// Decimals written to the weak-probability CSVs.
pub const DECIMALS: usize = 10;

const TRIPLES: [(f64, [usize; 3]); 5] = [
    (0.1, [0, 3, 6]),
    (0.1, [0, 3, 8]),
    (0.1, [0, 6, 8]),
    (0.1, [3, 6, 8]),
    (0.05, [0, 4, 8]),
];
const FOUR_POINT: (f64, [usize; 4]) = (0.1, [0, 3, 6, 8]);
const STRONG: [(f64, [usize; 2]); 2] = [(0.1, [0, 7]), (0.1, [0, 8])];

#[derive(Debug, Clone, Serialize)]
pub struct TripleEntry {
    pub alpha: f64,
    pub indices: [usize; 3],
    pub checkpoints: [u64; 3],
    pub probability: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FourPointEntry {
    pub alpha: f64,
    pub indices: [usize; 4],
    pub checkpoints: [u64; 4],
    pub bracket: ProbabilityBracket<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StrongEntry {
    pub alpha: f64,
    pub indices: [usize; 2],
    pub checkpoints: [u64; 2],
    pub routes: StrongRoutes<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TablesOutput {
    pub config: RunConfig,
    pub checkpoints: Vec<u64>,
    pub weak_pairs: Vec<WeakPairTable<f64>>,
    pub snapshot: SnapshotTable<f64>,
    pub triples: Vec<TripleEntry>,
    pub four_point: Option<FourPointEntry>,
    pub strong: Vec<StrongEntry>,
}

fn alphas(config: &RunConfig) -> Vec<f64> {
    let mut a = TABLE_ALPHAS.to_vec();
    if !a.contains(&config.alpha) {
        a.push(config.alpha);
    }
    a
}

pub fn compute(config: &RunConfig) -> Result<TablesOutput> {
    let engine = config.engine();
    let set = config.checkpoints(Command::Tables)?;
    let p = set.points();
    let fits = |idx: &[usize]| idx.iter().all(|&i| i < p.len());

    let weak_pairs = alphas(config)
        .into_iter()
        .map(|a| engine.weak_pair_table(a, p))
        .collect::<lil_core::Result<Vec<_>>>()?;
    let snapshot = engine.snapshot_table(p)?;

    let mut triples = Vec::new();
    for (alpha, idx) in TRIPLES.into_iter().filter(|(_, i)| fits(i)) {
        let checkpoints = idx.map(|i| p[i]);
        triples.push(TripleEntry {
            alpha,
            indices: idx,
            checkpoints,
            probability: engine.weak_prob_triple(1.0 - alpha, checkpoints)?,
        });
    }
    let four_point = match FOUR_POINT {
        (alpha, idx) if fits(&idx) => {
            let checkpoints = idx.map(|i| p[i]);
            Some(FourPointEntry {
                alpha,
                indices: idx,
                checkpoints,
                bracket: engine.weak_prob_4_bounds(1.0 - alpha, checkpoints)?,
            })
        }
        _ => None,
    };
    let mut strong = Vec::new();
    for (alpha, idx) in STRONG.into_iter().filter(|(_, i)| fits(i)) {
        let checkpoints = idx.map(|i| p[i]);
        strong.push(StrongEntry {
            alpha,
            indices: idx,
            checkpoints,
            routes: engine.strong_prob_routes(1.0 - alpha, checkpoints[0], checkpoints[1])?,
        });
    }
    Ok(TablesOutput {
        config: config.clone(),
        checkpoints: p.to_vec(),
        weak_pairs,
        snapshot,
        triples,
        four_point,
        strong,
    })
}

fn examples_csv(t: &TablesOutput) -> String {
    let join = |c: &[u64]| c.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    let labels = |i: &[usize]| i.iter().map(|&i| aleph(i)).collect::<Vec<_>>().join(" ");
    let mut out = String::from("kind,alpha,sets,checkpoints,value,lower,upper\n");
    for e in &t.triples {
        out += &format!(
            "weak-triple,{},{},{},{},,\n",
            e.alpha,
            labels(&e.indices),
            join(&e.checkpoints),
            e.probability
        );
    }
    if let Some(e) = &t.four_point {
        out += &format!(
            "weak-four-point,{},{},{},,{},{}\n",
            e.alpha,
            labels(&e.indices),
            join(&e.checkpoints),
            e.bracket.lower,
            e.bracket.upper
        );
    }
    for e in &t.strong {
        out += &format!(
            "strong,{},{},{},{},{},{}\n",
            e.alpha,
            labels(&e.indices),
            join(&e.checkpoints),
            e.routes.gaussian,
            e.routes.gaussian.min(e.routes.negative_binomial),
            e.routes.gaussian.max(e.routes.negative_binomial)
        );
    }
    out
}

pub fn run(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let t = compute(config)?;
    let dir = config.tables_dir();
    let mut files = Vec::new();
    for table in &t.weak_pairs {
        files.push(write_text(
            &dir.join(format!("weak_pairs_alpha_{}.csv", table.alpha)),
            &table.to_csv(DECIMALS),
        )?);
    }
    files.push(write_text(
        &dir.join("ideal_snapshot.csv"),
        &t.snapshot.to_csv(6, true),
    )?);
    let full: Vec<(String, Vec<f64>)> = (0..lil_core::probcalc::PARTITION_CELLS)
        .map(|k| {
            (
                lil_core::probcalc::PartitionB::label(k),
                t.snapshot.columns.iter().map(|c| c.mass[k]).collect(),
            )
        })
        .collect();
    files.push(write_text(
        &dir.join("ideal_snapshot_full.csv"),
        &csv(&header("cell", &t.checkpoints), &full),
    )?);
    files.push(write_text(&dir.join("examples.csv"), &examples_csv(&t))?);
    files.push(write_json(&dir.join("tables.json"), &t)?);
    Ok(files)
}

//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so every criterion is reported even when
//! an earlier one fails. The process exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lil_cli::{Command, RunConfig};
use lil_core::bitstream::{stream_count_with_buffer, CheckpointSet, SequenceSource};
use lil_core::evaluator::traces::trace_generator;
use lil_core::evaluator::{distances, evaluate, EvaluationOptions, Verdict};
use lil_core::generators::GeneratorSpec;
use lil_core::lilstat::{check_additivity, check_additivity_scaled};
use lil_core::probcalc::normal::{sf, tail_bounds};
use lil_core::probcalc::SnapshotDistribution;
use lil_core::{Engine, Snapshot};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
/// Labelled rows of numeric cells; `None` marks an empty cell.
type Rows = Vec<(String, Vec<Option<f64>>)>;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

/// Rows of a CSV file as `(label, cells)`, skipping the header.
fn read_rows(name: &str, label_columns: usize) -> (Vec<String>, Rows) {
    let text = fs::read_to_string(data(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            // Partition cell labels such as `[0.00,0.05)` contain a comma.
            let (label, rest) = match l.find(')') {
                Some(end) if l.starts_with(['[', '(']) => (l[..=end].to_string(), &l[end + 2..]),
                _ => {
                    let cells: Vec<&str> = l.splitn(label_columns + 1, ',').collect();
                    (cells[..label_columns].join(","), cells[label_columns])
                }
            };
            let values = rest
                .split(',')
                .map(|c| (!c.is_empty()).then(|| c.parse::<f64>().expect("numeric cell")))
                .collect();
            (label, values)
        })
        .collect();
    (header, rows)
}

fn table_checkpoints() -> Vec<u64> {
    (26..35).map(|e| 1u64 << e).collect()
}

fn tables_config() -> RunConfig {
    RunConfig {
        checkpoint_base_exp: Some(26),
        checkpoint_count: Some(9),
        ..RunConfig::default()
    }
}

fn weak_pair_cells() -> Outcome {
    let start = Instant::now();
    let tables = lil_cli::tables::compute(&tables_config()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let (_, rows) = read_rows("weak_pairs.csv", 2);
    let mut worst = 0.0f64;
    let mut cells = 0;
    for (label, values) in rows {
        let (alpha, row) = label.split_once(',').unwrap();
        let alpha: f64 = alpha.parse().unwrap();
        let i: usize = row.trim_start_matches('ℵ').parse().unwrap();
        let table = tables
            .weak_pairs
            .iter()
            .find(|t| t.alpha == alpha)
            .ok_or(format!("no table for alpha {alpha}"))?;
        for (j, want) in values.into_iter().enumerate() {
            let Some(want) = want else { continue };
            let got = table.get(i, j).ok_or(format!("missing cell ({i},{j})"))?;
            worst = worst.max((got - want).abs());
            cells += 1;
        }
    }
    let msg = format!(
        "{cells} cells, max |diff| {worst:.2e}, {:.1}s",
        elapsed.as_secs_f64()
    );
    if cells == 90 && worst <= 5e-5 && elapsed <= Duration::from_secs(600) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn triples() -> Outcome {
    let e = Engine::default();
    let p = table_checkpoints();
    let cases = [
        (0.1, [0, 3, 6], 0.07755),
        (0.1, [0, 3, 8], 0.07741),
        (0.1, [0, 6, 8], 0.07417),
        (0.1, [3, 6, 8], 0.06995),
        (0.05, [0, 4, 8], 0.05645),
    ];
    let mut worst = 0.0f64;
    for (alpha, idx, want) in cases {
        let got = e
            .weak_prob_triple(1.0 - alpha, idx.map(|i| p[i]))
            .map_err(|e| e.to_string())?;
        worst = worst.max((got - want).abs());
    }
    let msg = format!("5 triples, max |diff| {worst:.2e}");
    if worst <= 2e-4 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn four_point_bracket() -> Outcome {
    let p = table_checkpoints();
    let b = Engine::default()
        .weak_prob_4_bounds(0.9, [p[0], p[3], p[6], p[8]])
        .map_err(|e| e.to_string())?;
    let msg = format!("[{:.5}, {:.5}]", b.lower, b.upper);
    if (b.lower - 0.09630).abs() <= 2e-4 && (b.upper - 0.09662).abs() <= 2e-4 && b.lower <= b.upper
    {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn strong_routes() -> Outcome {
    let e = Engine::default();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (n2, want) in [(1u64 << 33, 0.0001981), (1u64 << 34, 0.0002335)] {
        let r = e
            .strong_prob_routes(0.9, 1 << 26, n2)
            .map_err(|e| e.to_string())?;
        worst = worst
            .max((r.gaussian - want).abs())
            .max((r.negative_binomial - want).abs());
        parts.push(format!("{:.7}/{:.7}", r.gaussian, r.negative_binomial));
    }
    let msg = format!("routes {}, max |diff| {worst:.2e}", parts.join(" "));
    if worst <= 1e-5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Published ideal distributions, mirrored to all 42 cells.
fn published_ideal() -> Vec<Snapshot> {
    let (header, rows) = read_rows("ideal_snapshot.csv", 1);
    (0..header.len() - 1)
        .map(|c| {
            let n: u64 = header[c + 1].parse().unwrap();
            let half: Vec<f64> = rows.iter().map(|(_, v)| v[c].unwrap()).collect();
            SnapshotDistribution::from_positive_half(n, &half).unwrap()
        })
        .collect()
}

fn ideal_snapshot() -> Outcome {
    let e = Engine::default();
    let mut worst = 0.0f64;
    let mut cells = 0;
    for published in published_ideal() {
        let mu = e.mu_u(published.checkpoint).map_err(|e| e.to_string())?;
        for (got, want) in mu.positive_half().iter().zip(published.positive_half()) {
            worst = worst.max((got - want).abs());
            cells += 1;
        }
    }
    let msg = format!("{cells} cells, max |diff| {worst:.2e}");
    if cells == 189 && worst <= 5e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn published_empirical(name: &str) -> Vec<Snapshot> {
    let (header, rows) = read_rows(name, 1);
    (0..header.len() - 1)
        .map(|c| {
            let n: u64 = header[c + 1].parse().unwrap();
            SnapshotDistribution::new(n, rows.iter().map(|(_, v)| v[c].unwrap()).collect()).unwrap()
        })
        .collect()
}

fn distance_table() -> Outcome {
    let ideal = published_ideal();
    let (_, expected) = read_rows("snapshot_distances.csv", 1);
    let expected: BTreeMap<String, Vec<Option<f64>>> = expected.into_iter().collect();
    let sources = [
        ("1", "snapshot_java_sha1.csv"),
        ("2", "snapshot_drbg_sha1.csv"),
        ("3", "snapshot_drbg_sha256.csv"),
        ("4", "snapshot_drbg_sha256_10k.csv"),
    ];
    let mut worst = 0.0f64;
    let mut entries = 0;
    for (suffix, file) in sources {
        for (c, empirical) in published_empirical(file).iter().enumerate() {
            let d = distances(empirical, &ideal[c]).map_err(|e| e.to_string())?;
            for (row, got) in [("d", d.tvd), ("H", d.hellinger), ("RMSD", d.rmsd)] {
                let want = expected[&format!("{row}{suffix}")][c].unwrap();
                worst = worst.max((got - want).abs());
                entries += 1;
            }
        }
    }
    let msg = format!("{entries} entries, max |diff| {worst:.4}");
    if entries == 108 && worst <= 0.003 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn entropy_baseline() -> Outcome {
    let start = Instant::now();
    let m = 1000;
    let alpha = 0.1;
    let checkpoints = CheckpointSet::powers_of_two(16, 9).map_err(|e| e.to_string())?;
    let spec = GeneratorSpec::preset("os-entropy").map_err(|e| e.to_string())?;
    let traces = trace_generator::<f64>(&spec, m, &checkpoints).map_err(|e| e.to_string())?;
    let engine = Engine::default();
    let report = evaluate(
        &spec.label(),
        &traces,
        &EvaluationOptions::new(alpha, checkpoints.clone()),
        &engine,
    )
    .map_err(|e| e.to_string())?;
    let mut worst_z = 0.0f64;
    for (k, &p) in report.weak_theory.iter().enumerate() {
        let passed = report.weak.plus[k] + report.weak.minus[k];
        let se = (p * (1.0 - p) / m as f64).sqrt();
        let z = (passed as f64 / m as f64 - p) / se;
        if z.abs() > worst_z.abs() {
            worst_z = z;
        }
    }
    let max_tvd = report
        .snapshots
        .iter()
        .map(|s| s.distances.tvd)
        .fold(0.0, f64::max);
    let expected_tvd = report
        .snapshots
        .iter()
        .map(|s| s.expected_ideal_tvd)
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    let msg = format!(
        "weak rates max |z| {:.2}; max TVD {max_tvd:.4} (expected for an ideal source {expected_tvd:.4}); {:.1}s",
        worst_z.abs(),
        elapsed.as_secs_f64()
    );
    if worst_z.abs() <= 3.0 && max_tvd < 0.05 && elapsed <= Duration::from_secs(900) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn pipeline(config: &RunConfig) -> Result<Option<Verdict>, String> {
    let mut verdict = None;
    for command in [Command::Generate, Command::Analyze, Command::Evaluate] {
        verdict = lil_cli::run(command, config)
            .map_err(|e| e.to_string())?
            .verdict;
    }
    Ok(verdict)
}

fn biased_detection() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = RunConfig {
        generator: GeneratorSpec::preset("biased").map_err(|e| e.to_string())?,
        out: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    let verdict = pipeline(&config)?;
    let report: lil_core::evaluator::EvaluationReport =
        lil_cli::output::read_json(&config.evaluation_dir().join("report.json"))
            .map_err(|e| e.to_string())?;
    let min_tvd = report
        .snapshots
        .iter()
        .map(|s| s.distances.tvd)
        .fold(f64::INFINITY, f64::min);
    let all_fail = report.snapshots.iter().all(|s| s.verdict == Verdict::Fail);
    let msg = format!(
        "verdict {verdict:?}, min TVD {min_tvd:.4} over {} checkpoints",
        report.snapshots.len()
    );
    if verdict == Some(Verdict::Fail) && all_fail && min_tvd > 0.5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn identities() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let check = if trial % 2 == 0 {
            let t = rng.random_range(2..=8);
            let len = rng.random_range(2..=64);
            let parts: Vec<Vec<u8>> = (0..t)
                .map(|_| {
                    let mut p = vec![0u8; len];
                    rng.fill_bytes(&mut p);
                    p
                })
                .collect();
            let refs: Vec<&[u8]> = parts.iter().map(Vec::as_slice).collect();
            check_additivity::<f64>(&refs)
        } else {
            let unit = rng.random_range(2..=16);
            let (s, t) = (rng.random_range(1..=6), rng.random_range(1..=6));
            let mut x1 = vec![0u8; unit * s];
            let mut x2 = vec![0u8; unit * t];
            rng.fill_bytes(&mut x1);
            rng.fill_bytes(&mut x2);
            check_additivity_scaled::<f64>(&x1, &x2, unit as u64 * 8)
        }
        .map_err(|e| e.to_string())?;
        worst = worst.max(check.relative_residual());
    }

    let sandwich_ok = (1..=8).all(|x| {
        let x = x as f64;
        let (lo, hi) = tail_bounds(x);
        lo < sf(x) && sf(x) < hi
    });

    let mismatches: u64 = (1..=3usize)
        .map(|len| {
            (0u32..1 << (8 * len))
                .into_par_iter()
                .filter(|&v| {
                    let bytes: Vec<u8> = (0..len).map(|i| (v >> (8 * i)) as u8).collect();
                    let points: Vec<u64> = (1..=len as u64).map(|b| 8 * b).collect();
                    let set = CheckpointSet::byte_aligned(points.clone()).unwrap();
                    let source = SequenceSource::from_bytes("exhaustive", &bytes).unwrap();
                    let got: Vec<u64> = stream_count_with_buffer(source, &set, 1)
                        .unwrap()
                        .entries
                        .iter()
                        .map(|e| e.ones)
                        .collect();
                    let naive: Vec<u64> = points
                        .iter()
                        .map(|&k| {
                            (0..k as usize)
                                .filter(|&i| bytes[i / 8] >> (7 - i % 8) & 1 == 1)
                                .count() as u64
                        })
                        .collect();
                    got != naive
                })
                .count() as u64
        })
        .sum();

    let msg = format!(
        "1000 decompositions, max relative residual {worst:.2e}; sandwich at 8 points {}; {mismatches} stream_count mismatches on all inputs up to 3 bytes",
        if sandwich_ok { "holds" } else { "violated" }
    );
    if worst <= 1e-9 && sandwich_ok && mismatches == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn snapshot_outputs(config: &RunConfig) -> Result<BTreeMap<PathBuf, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    for dir in [
        config.corpus_dir(),
        config.analysis_dir(),
        config.evaluation_dir(),
    ] {
        for entry in fs::read_dir(&dir).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            let bytes = fs::read(&path).map_err(|e| e.to_string())?;
            files.insert(path, bytes);
        }
    }
    Ok(files)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = RunConfig {
        generator: GeneratorSpec::preset("drbg-sha256").map_err(|e| e.to_string())?,
        m: 100,
        out: dir.path().join("run"),
        ..RunConfig::default()
    };
    pipeline(&config)?;
    let first = snapshot_outputs(&config)?;
    fs::remove_dir_all(&config.out).map_err(|e| e.to_string())?;
    pipeline(&config)?;
    let second = snapshot_outputs(&config)?;
    let differing: Vec<String> = first
        .keys()
        .chain(second.keys())
        .filter(|k| first.get(*k) != second.get(*k))
        .map(|k| k.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    let key = ["manifest.json", "traces.json", "report.json"];
    let present = key
        .iter()
        .all(|k| first.keys().any(|p| p.file_name().is_some_and(|f| f == *k)));
    let msg = format!("{} files compared, {} differ", first.len(), differing.len());
    if present && differing.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}: {}", differing.join(" ")))
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("weak-pair probability table", weak_pair_cells),
        ("three-point weak probabilities", triples),
        ("four-point bracket", four_point_bracket),
        ("strong probabilities by both routes", strong_routes),
        ("ideal snapshot distribution", ideal_snapshot),
        ("distances from published distributions", distance_table),
        ("OS-entropy baseline at desk scale", entropy_baseline),
        ("biased generator detection", biased_detection),
        ("identity suite", identities),
        ("pipeline determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

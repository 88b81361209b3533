//! Producing LIL traces for whole corpora, one sequence per task.

use std::io::Read;
use std::path::Path;

use rayon::prelude::*;

use crate::bitstream::{stream_count, CheckpointSet, SequenceSource};
use crate::error::Result;
use crate::generators::corpus::entry_path;
use crate::generators::{GeneratorSpec, Manifest};
use crate::lilstat::LilTrace;
use crate::scalar::Scalar;

/// Bits per unit of the plot scale: point `k` sits at `10000 k²` bits.
pub const PLOT_UNIT_BITS: u64 = 10_000;

pub fn trace_source<T: Scalar, R: Read>(
    source: SequenceSource<R>,
    checkpoints: &CheckpointSet,
) -> Result<LilTrace<T>> {
    LilTrace::from_counts(&stream_count(source, checkpoints)?)
}

/// Traces of every file listed in `manifest`, in index order.
pub fn trace_corpus<T: Scalar>(
    dir: &Path,
    manifest: &Manifest,
    checkpoints: &CheckpointSet,
) -> Result<Vec<LilTrace<T>>> {
    manifest
        .files
        .par_iter()
        .map(|e| trace_source(SequenceSource::open_file(entry_path(dir, e))?, checkpoints))
        .collect()
}

/// Traces of the first `count` sequences of `spec`, generated in memory.
pub fn trace_generator<T: Scalar>(
    spec: &GeneratorSpec,
    count: u64,
    checkpoints: &CheckpointSet,
) -> Result<Vec<LilTrace<T>>> {
    (0..count)
        .into_par_iter()
        .map(|i| trace_source(spec.source(i, checkpoints.max())?, checkpoints))
        .collect()
}

/// The lengths `10000 k²` for `k = 1, 2, ...` up to `max_bits`.
pub fn plot_checkpoints(max_bits: u64) -> Option<CheckpointSet> {
    let points: Vec<u64> = (1u64..)
        .map(|k| PLOT_UNIT_BITS * k * k)
        .take_while(|&n| n <= max_bits)
        .collect();
    CheckpointSet::byte_aligned(points).ok()
}

//! One-pass ingestion of byte-aligned binary sequences.
//!
//! Bits are numbered MSB-first within each byte: bit index 0 of a sequence is the
//! most significant bit of its first byte. Every generator in this crate emits
//! bytes under the same convention, so a byte string maps to exactly one bit
//! sequence. Because checkpoints are byte multiples, the ones-count of a prefix
//! never depends on the order of bits inside a byte, but [`bit_at`] and the
//! generators rely on it.

use std::fs::File;
use std::io::{self, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LilError, Result};
use crate::generators::BitGenerator;

/// Smallest checkpoint accepted by [`CheckpointSet::new`] (2^16 bits).
pub const MIN_LIL_CHECKPOINT: u64 = 1 << 16;

/// Default streaming buffer (1 MiB). Has no observable effect on results.
pub const DEFAULT_BUFFER_BYTES: usize = 1 << 20;

/// Returns bit `index` of `bytes` under MSB-first order.
///
/// # Panics
///
/// Panics if `index >= 8 * bytes.len()`.
#[inline]
pub fn bit_at(bytes: &[u8], index: usize) -> bool {
    (bytes[index / 8] >> (7 - index % 8)) & 1 == 1
}

/// Ordered sequence lengths (bits) at which counts are sampled.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct CheckpointSet {
    points: Vec<u64>,
}

impl CheckpointSet {
    /// Checkpoints usable for LIL statistics: strictly increasing byte
    /// multiples, each at least 2^16.
    pub fn new(points: Vec<u64>) -> Result<Self> {
        let set = Self::byte_aligned(points)?;
        if let Some(&p) = set.points.iter().find(|&&p| p < MIN_LIL_CHECKPOINT) {
            return Err(LilError::Precondition(format!(
                "checkpoint {p} is below the 2^16-bit minimum"
            )));
        }
        Ok(set)
    }

    /// Checkpoints for raw counting only: strictly increasing, nonzero byte
    /// multiples. Used for short test vectors and fine-grained plot traces.
    pub fn byte_aligned(points: Vec<u64>) -> Result<Self> {
        if points.is_empty() {
            return Err(LilError::Precondition("checkpoint set is empty".into()));
        }
        for &p in &points {
            if p == 0 || p % 8 != 0 {
                return Err(LilError::Precondition(format!(
                    "checkpoint {p} is not a positive multiple of 8 bits"
                )));
            }
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LilError::Precondition(
                "checkpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self { points })
    }

    /// `{2^(base_exp + i) : 0 <= i < count}`.
    pub fn powers_of_two(base_exp: u32, count: u32) -> Result<Self> {
        if count == 0 || base_exp + count > 63 {
            return Err(LilError::Precondition(format!(
                "cannot build {count} power-of-two checkpoints from 2^{base_exp}"
            )));
        }
        Self::new((0..count).map(|i| 1u64 << (base_exp + i)).collect())
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max(&self) -> u64 {
        *self.points.last().expect("checkpoint set is never empty")
    }

    pub fn position(&self, checkpoint: u64) -> Option<usize> {
        self.points.binary_search(&checkpoint).ok()
    }

    /// Sorted union of two sets.
    pub fn merge(&self, other: &CheckpointSet) -> CheckpointSet {
        let mut points: Vec<u64> = self.points.iter().chain(&other.points).copied().collect();
        points.sort_unstable();
        points.dedup();
        CheckpointSet { points }
    }
}

impl TryFrom<Vec<u64>> for CheckpointSet {
    type Error = LilError;

    fn try_from(points: Vec<u64>) -> Result<Self> {
        CheckpointSet::byte_aligned(points)
    }
}

impl From<CheckpointSet> for Vec<u64> {
    fn from(set: CheckpointSet) -> Self {
        set.points
    }
}

/// Ones-count of each checkpoint prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTrace {
    pub entries: Vec<CountEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountEntry {
    pub checkpoint: u64,
    pub ones: u64,
}

impl CountTrace {
    pub fn ones_at(&self, checkpoint: u64) -> Option<u64> {
        self.entries
            .iter()
            .find(|e| e.checkpoint == checkpoint)
            .map(|e| e.ones)
    }

    pub fn checkpoints(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.checkpoint)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    FilePath,
    GeneratorHandle,
}

/// A byte-aligned sequence to be counted, together with its reader.
pub struct SequenceSource<R> {
    kind: SourceKind,
    identifier: String,
    total_bits: u64,
    reader: R,
}

impl<R> std::fmt::Debug for SequenceSource<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SequenceSource")
            .field("kind", &self.kind)
            .field("identifier", &self.identifier)
            .field("total_bits", &self.total_bits)
            .finish()
    }
}

impl SequenceSource<BufReader<File>> {
    /// Opens a raw sequence file; its length in bytes defines `total_bits`.
    pub fn open_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| LilError::io(path, e))?;
        let bytes = file.metadata().map_err(|e| LilError::io(path, e))?.len();
        if bytes == 0 {
            return Err(LilError::Precondition(format!(
                "sequence file {} is empty",
                path.display()
            )));
        }
        Ok(Self {
            kind: SourceKind::FilePath,
            identifier: path.display().to_string(),
            total_bits: bytes * 8,
            reader: BufReader::with_capacity(DEFAULT_BUFFER_BYTES, file),
        })
    }
}

impl<G: BitGenerator> SequenceSource<GeneratorReader<G>> {
    /// Wraps a generator so that exactly `total_bits` bits are read from it.
    pub fn from_generator(
        identifier: impl Into<String>,
        generator: G,
        total_bits: u64,
    ) -> Result<Self> {
        if total_bits == 0 || !total_bits.is_multiple_of(8) {
            return Err(LilError::Precondition(format!(
                "generator length {total_bits} is not a positive multiple of 8 bits"
            )));
        }
        Ok(Self {
            kind: SourceKind::GeneratorHandle,
            identifier: identifier.into(),
            total_bits,
            reader: GeneratorReader::new(generator, total_bits / 8),
        })
    }
}

impl<'a> SequenceSource<&'a [u8]> {
    pub fn from_bytes(identifier: impl Into<String>, bytes: &'a [u8]) -> Result<Self> {
        if bytes.is_empty() {
            return Err(LilError::Precondition("empty byte sequence".into()));
        }
        Ok(Self {
            kind: SourceKind::GeneratorHandle,
            identifier: identifier.into(),
            total_bits: bytes.len() as u64 * 8,
            reader: bytes,
        })
    }
}

impl<R> SequenceSource<R> {
    pub fn kind(&self) -> SourceKind {
        self.kind
    }

    pub fn identifier(&self) -> &str {
        &self.identifier
    }

    pub fn total_bits(&self) -> u64 {
        self.total_bits
    }
}

/// Adapts a [`BitGenerator`] into a bounded [`Read`].
pub struct GeneratorReader<G> {
    generator: G,
    remaining: u64,
}

impl<G: BitGenerator> GeneratorReader<G> {
    pub fn new(generator: G, bytes: u64) -> Self {
        Self {
            generator,
            remaining: bytes,
        }
    }
}

impl<G: BitGenerator> Read for GeneratorReader<G> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = (buf.len() as u64).min(self.remaining) as usize;
        if n == 0 {
            return Ok(0);
        }
        self.generator.fill_bytes(&mut buf[..n])?;
        self.remaining -= n as u64;
        Ok(n)
    }
}

/// Population count of a byte slice, eight bytes at a time.
#[inline]
pub fn popcount(bytes: &[u8]) -> u64 {
    let mut chunks = bytes.chunks_exact(8);
    let mut total: u64 = 0;
    for chunk in &mut chunks {
        let word = u64::from_ne_bytes(chunk.try_into().expect("chunk of 8"));
        total += u64::from(word.count_ones());
    }
    total
        + chunks
            .remainder()
            .iter()
            .map(|b| u64::from(b.count_ones()))
            .sum::<u64>()
}

/// Counts ones at every checkpoint in a single pass over `source`.
pub fn stream_count<R: Read>(
    source: SequenceSource<R>,
    checkpoints: &CheckpointSet,
) -> Result<CountTrace> {
    stream_count_with_buffer(source, checkpoints, DEFAULT_BUFFER_BYTES)
}

/// [`stream_count`] with an explicit buffer size.
pub fn stream_count_with_buffer<R: Read>(
    mut source: SequenceSource<R>,
    checkpoints: &CheckpointSet,
    buffer_bytes: usize,
) -> Result<CountTrace> {
    let required = checkpoints.max();
    if source.total_bits < required {
        return Err(truncated(&source.identifier, source.total_bits, required));
    }

    let mut buffer = vec![0u8; buffer_bytes.max(8)];
    let mut entries = Vec::with_capacity(checkpoints.len());
    let mut consumed_bytes: u64 = 0;
    let mut ones: u64 = 0;
    let mut targets = checkpoints.points().iter().map(|&p| p / 8).peekable();

    while let Some(&target) = targets.peek() {
        let want = (target - consumed_bytes).min(buffer.len() as u64) as usize;
        let got = read_full(&mut source.reader, &mut buffer[..want])
            .map_err(|e| LilError::io(&source.identifier, e))?;
        ones += popcount(&buffer[..got]);
        consumed_bytes += got as u64;
        if got < want {
            return Err(truncated(&source.identifier, consumed_bytes * 8, required));
        }
        while targets.peek() == Some(&consumed_bytes) {
            entries.push(CountEntry {
                checkpoint: consumed_bytes * 8,
                ones,
            });
            targets.next();
        }
    }
    Ok(CountTrace { entries })
}

/// Counts ones of an in-memory byte string.
pub fn count_bytes(bytes: &[u8], checkpoints: &CheckpointSet) -> Result<CountTrace> {
    stream_count(SequenceSource::from_bytes("memory", bytes)?, checkpoints)
}

fn truncated(id: &str, available_bits: u64, required_bits: u64) -> LilError {
    LilError::TruncatedSource {
        source_id: id.to_string(),
        available_bits,
        required_bits,
        deficit_bits: required_bits - available_bits,
    }
}

fn read_full<R: Read>(reader: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match reader.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

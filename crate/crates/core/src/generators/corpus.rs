//! Corpus files on disk and their JSON manifest.
//!
//! Each sequence is written to `seq_<index>.bin` through a temporary file and
//! an atomic rename, so a file that exists under its final name is complete.
//! The manifest is rewritten after every batch of finished files. Rerunning
//! with the same inputs skips files whose content still matches the recorded
//! digest, which makes interrupted runs resumable.

use std::fs::{self, File};
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{GeneratorKind, GeneratorSpec, HashAlgorithm};
use crate::error::{LilError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

const CHUNK_BYTES: usize = 1 << 20;
const BATCH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: u64,
    pub seed: String,
    pub file: String,
    pub bytes: u64,
    /// SHA-256 of the file contents, lowercase hex.
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub generator: GeneratorKind,
    pub hash: HashAlgorithm,
    pub seed_pattern: String,
    pub count: u64,
    pub bits_each: u64,
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let path = dir.as_ref().join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| LilError::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn spec(&self) -> GeneratorSpec {
        GeneratorSpec {
            kind: self.generator.clone(),
            hash: self.hash,
            seed_pattern: self.seed_pattern.clone(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.files.len() as u64 == self.count
    }

    fn same_inputs(&self, spec: &GeneratorSpec, count: u64, bits_each: u64) -> bool {
        self.spec() == *spec && self.count == count && self.bits_each == bits_each
    }

    fn store(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let tmp = dir.join(format!("{MANIFEST_FILE}.tmp"));
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&tmp, text).map_err(|e| LilError::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| LilError::io(&path, e))
    }
}

pub fn file_name(index: u64) -> String {
    format!("seq_{index:06}.bin")
}

/// SHA-256 of a file, lowercase hex.
pub fn file_digest(path: &Path) -> io::Result<String> {
    let mut reader = BufReader::with_capacity(CHUNK_BYTES, File::open(path)?);
    let mut hasher = Sha256::new();
    let mut buf = vec![0; CHUNK_BYTES];
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            return Ok(hex::encode(hasher.finalize()));
        }
        hasher.update(&buf[..n]);
    }
}

fn write_one(
    spec: &GeneratorSpec,
    index: u64,
    bytes: u64,
    dir: &Path,
) -> io::Result<ManifestEntry> {
    let seed = spec.seed_for(index);
    let mut generator = spec
        .instantiate(seed.as_bytes())
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
    let file = file_name(index);
    let tmp = dir.join(format!("{file}.part"));
    let mut out = File::create(&tmp)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0; CHUNK_BYTES.min(bytes as usize)];
    let mut left = bytes;
    while left > 0 {
        let n = (left as usize).min(buf.len());
        generator.fill_bytes(&mut buf[..n])?;
        out.write_all(&buf[..n])?;
        hasher.update(&buf[..n]);
        left -= n as u64;
    }
    out.sync_all()?;
    drop(out);
    fs::rename(&tmp, dir.join(&file))?;
    Ok(ManifestEntry {
        index,
        seed,
        file,
        bytes,
        digest: hex::encode(hasher.finalize()),
    })
}

fn reusable(previous: Option<&ManifestEntry>, bytes: u64, dir: &Path) -> Option<ManifestEntry> {
    let entry = previous?;
    let path = dir.join(&entry.file);
    if entry.bytes != bytes || fs::metadata(&path).ok()?.len() != bytes {
        return None;
    }
    (file_digest(&path).ok()? == entry.digest).then(|| entry.clone())
}

/// How a corpus file came to be listed in the manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileStatus {
    Written,
    Reused,
}

/// Writes `count` sequences of `bits_each` bits into `dir` and returns the manifest.
pub fn write_corpus(
    spec: &GeneratorSpec,
    count: u64,
    bits_each: u64,
    dir: impl AsRef<Path>,
) -> Result<Manifest> {
    write_corpus_with_progress(spec, count, bits_each, dir, |_, _| {})
}

/// [`write_corpus`], calling `progress` once per finished file from the worker that finished it.
pub fn write_corpus_with_progress<F>(
    spec: &GeneratorSpec,
    count: u64,
    bits_each: u64,
    dir: impl AsRef<Path>,
    progress: F,
) -> Result<Manifest>
where
    F: Fn(&ManifestEntry, FileStatus) + Sync,
{
    let dir = dir.as_ref();
    if bits_each == 0 || !bits_each.is_multiple_of(8) {
        return Err(LilError::Precondition(format!(
            "sequence length {bits_each} is not a positive multiple of 8 bits"
        )));
    }
    // Catch bad parameters before touching the disk.
    spec.instantiate(spec.seed_for(0).as_bytes())?;
    fs::create_dir_all(dir).map_err(|e| LilError::io(dir, e))?;

    let previous: Vec<Option<ManifestEntry>> = match Manifest::load(dir) {
        Ok(m) if spec.is_deterministic() && m.same_inputs(spec, count, bits_each) => {
            let mut by_index = vec![None; count as usize];
            for e in m.files {
                if let Some(slot) = by_index.get_mut(e.index as usize) {
                    *slot = Some(e);
                }
            }
            by_index
        }
        _ => vec![None; count as usize],
    };

    let bytes = bits_each / 8;
    let mut manifest = Manifest {
        generator: spec.kind.clone(),
        hash: spec.hash,
        seed_pattern: spec.seed_pattern.clone(),
        count,
        bits_each,
        files: Vec::with_capacity(count as usize),
    };
    let indices: Vec<u64> = (0..count).collect();
    for batch in indices.chunks(BATCH) {
        let done = batch
            .par_iter()
            .map(|&index| {
                let (entry, status) = match reusable(previous[index as usize].as_ref(), bytes, dir)
                {
                    Some(entry) => (entry, FileStatus::Reused),
                    None => (
                        write_one(spec, index, bytes, dir)
                            .map_err(|source| LilError::CorpusIo { index, source })?,
                        FileStatus::Written,
                    ),
                };
                progress(&entry, status);
                Ok(entry)
            })
            .collect::<Result<Vec<_>>>()?;
        manifest.files.extend(done);
        manifest.store(dir)?;
    }
    if count == 0 {
        manifest.store(dir)?;
    }
    Ok(manifest)
}

/// Path of a manifest entry's sequence file.
pub fn entry_path(dir: impl AsRef<Path>, entry: &ManifestEntry) -> PathBuf {
    dir.as_ref().join(&entry.file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> GeneratorSpec {
        GeneratorSpec::preset("drbg-sha1").unwrap()
    }

    #[test]
    fn sizes_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_corpus(&spec(), 3, 1 << 16, dir.path()).unwrap();
        assert_eq!(m.files.len(), 3);
        for e in &m.files {
            let path = entry_path(dir.path(), e);
            assert_eq!(fs::metadata(&path).unwrap().len(), 8192);
            assert_eq!(file_digest(&path).unwrap(), e.digest);
        }
        assert_eq!(Manifest::load(dir.path()).unwrap(), m);
        assert_eq!(m.files[2].seed, "2th secret seed for NIST DRBG");
    }

    #[test]
    fn regeneration_is_identical() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        write_corpus(&spec(), 4, 1 << 13, a.path()).unwrap();
        write_corpus(&spec(), 4, 1 << 13, b.path()).unwrap();
        let read = |d: &Path| fs::read(d.join(MANIFEST_FILE)).unwrap();
        assert_eq!(read(a.path()), read(b.path()));
    }

    #[test]
    fn empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_corpus(&spec(), 0, 64, dir.path()).unwrap();
        assert!(m.files.is_empty() && m.is_complete());
        assert!(dir.path().join(MANIFEST_FILE).exists());
    }

    #[test]
    fn resume_repairs_damaged_files() {
        let dir = tempfile::tempdir().unwrap();
        let first = write_corpus(&spec(), 3, 1 << 12, dir.path()).unwrap();
        let victim = entry_path(dir.path(), &first.files[1]);
        fs::write(&victim, vec![0u8; 512]).unwrap();
        fs::remove_file(entry_path(dir.path(), &first.files[2])).unwrap();
        let written = std::sync::Mutex::new(Vec::new());
        let second = write_corpus_with_progress(&spec(), 3, 1 << 12, dir.path(), |e, status| {
            if status == FileStatus::Written {
                written.lock().unwrap().push(e.index);
            }
        })
        .unwrap();
        assert_eq!(first, second);
        let mut written = written.into_inner().unwrap();
        written.sort();
        assert_eq!(written, [1, 2]);
        assert_eq!(file_digest(&victim).unwrap(), first.files[1].digest);
    }

    #[test]
    fn rejects_partial_bytes() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_corpus(&spec(), 1, 12, dir.path()).is_err());
    }

    #[cfg(unix)]
    #[test]
    fn io_errors_carry_the_index() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("corpus");
        fs::create_dir(&target).unwrap();
        // Occupy the final name with a directory so the rename fails.
        fs::create_dir(target.join(file_name(0))).unwrap();
        let err = write_corpus(&spec(), 1, 64, &target).unwrap_err();
        assert!(matches!(err, LilError::CorpusIo { index: 0, .. }), "{err}");
    }
}

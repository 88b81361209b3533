//! `generate`: writes the corpus and its manifest.

use std::sync::atomic::{AtomicU64, Ordering};

use lil_core::generators::{write_corpus_with_progress, FileStatus, Manifest};

use crate::config::{Command, RunConfig};
use crate::error::Result;

pub fn run(config: &RunConfig) -> Result<Manifest> {
    let bits = config.checkpoints(Command::Generate)?.max();
    let dir = config.corpus_dir();
    let spec = &config.generator;
    log::info!(
        "generating {} sequences of {bits} bits with {} into {}",
        config.m,
        spec.label(),
        dir.display()
    );
    if !spec.is_deterministic() {
        log::warn!("{} is not reproducible from its seeds", spec.label());
    }
    let done = AtomicU64::new(0);
    let manifest = write_corpus_with_progress(spec, config.m, bits, &dir, |entry, status| {
        let n = done.fetch_add(1, Ordering::Relaxed) + 1;
        let how = match status {
            FileStatus::Written => "written",
            FileStatus::Reused => "kept",
        };
        log::info!(
            "[{n}/{}] {} {how} (seed {:?})",
            config.m,
            entry.file,
            entry.seed
        );
    })?;
    Ok(manifest)
}

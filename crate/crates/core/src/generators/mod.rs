//! Bit generators used to build test corpora.
//!
//! All generators write bytes in the MSB-first convention of
//! [`crate::bitstream`]. Every kind except the OS-entropy baseline is a pure
//! function of its spec and seed.

pub mod biased;
pub mod corpus;
pub mod counter;
pub mod drbg;
pub mod entropy;
pub mod hash;

use std::io;

use serde::{Deserialize, Serialize};

use crate::bitstream::{GeneratorReader, SequenceSource};
use crate::error::{LilError, Result};

pub use biased::BiasedWrapper;
pub use corpus::{write_corpus, write_corpus_with_progress, FileStatus, Manifest, ManifestEntry};
pub use counter::CounterPrng;
pub use drbg::HashDrbg;
pub use entropy::OsEntropy;
pub use hash::{HashAlgorithm, HashPrimitive};

/// A source of pseudorandom bytes.
pub trait BitGenerator {
    fn fill_bytes(&mut self, buf: &mut [u8]) -> io::Result<()>;
}

impl<G: BitGenerator + ?Sized> BitGenerator for Box<G> {
    fn fill_bytes(&mut self, buf: &mut [u8]) -> io::Result<()> {
        (**self).fill_bytes(buf)
    }
}

pub type DynGenerator = Box<dyn BitGenerator + Send>;

/// Generator construction and its kind-specific parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorKind {
    CounterPrng {
        out_bits_per_call: usize,
    },
    HashDrbg {
        v_bits: usize,
        uses_per_v: u64,
    },
    BiasedWrapper {
        block_bits: usize,
        inner: Box<GeneratorKind>,
    },
    OsEntropyBaseline,
}

/// Everything needed to reproduce a corpus: the construction, its hash and the
/// seed pattern, in which `{i}` is replaced by the sequence index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub hash: HashAlgorithm,
    pub seed_pattern: String,
}

/// Names accepted by [`GeneratorSpec::preset`].
pub const PRESETS: [&str; 5] = [
    "java-sha1",
    "drbg-sha1",
    "drbg-sha256",
    "biased",
    "os-entropy",
];

impl GeneratorSpec {
    /// Named configurations: a 64-bit-per-call SHA-1 counter generator, the
    /// DRBG over either hash, the biased wrapper over the SHA-1 counter
    /// generator, and OS entropy.
    pub fn preset(name: &str) -> Result<Self> {
        let java = GeneratorKind::CounterPrng {
            out_bits_per_call: 64,
        };
        let drbg = GeneratorKind::HashDrbg {
            v_bits: drbg::DEFAULT_V_BITS,
            uses_per_v: drbg::DEFAULT_USES_PER_V,
        };
        let (kind, hash, pattern) = match name {
            "java-sha1" => (java, HashAlgorithm::Sha1, "{i}th secret seed for SHA1PRNG"),
            "drbg-sha1" => (drbg, HashAlgorithm::Sha1, "{i}th secret seed for NIST DRBG"),
            "drbg-sha256" => (
                drbg,
                HashAlgorithm::Sha256,
                "{i}th secret seed for NIST DRBG",
            ),
            "biased" => (
                GeneratorKind::BiasedWrapper {
                    block_bits: 1024,
                    inner: Box::new(java),
                },
                HashAlgorithm::Sha1,
                "{i}th secret seed for SHA1PRNG",
            ),
            "os-entropy" => (
                GeneratorKind::OsEntropyBaseline,
                HashAlgorithm::Sha256,
                "{i}",
            ),
            other => {
                return Err(LilError::Precondition(format!(
                    "unknown generator {other:?}; expected one of {PRESETS:?}"
                )))
            }
        };
        Ok(Self {
            kind,
            hash,
            seed_pattern: pattern.to_string(),
        })
    }

    /// Short description such as `hash-drbg/SHA-256`.
    pub fn label(&self) -> String {
        fn name(k: &GeneratorKind) -> String {
            match k {
                GeneratorKind::CounterPrng { .. } => "counter-prng".into(),
                GeneratorKind::HashDrbg { .. } => "hash-drbg".into(),
                GeneratorKind::BiasedWrapper { inner, .. } => {
                    format!("biased-wrapper({})", name(inner))
                }
                GeneratorKind::OsEntropyBaseline => "os-entropy-baseline".into(),
            }
        }
        match self.kind {
            GeneratorKind::OsEntropyBaseline => name(&self.kind),
            _ => format!("{}/{}", name(&self.kind), self.hash.name()),
        }
    }

    pub fn seed_for(&self, index: u64) -> String {
        self.seed_pattern.replace("{i}", &index.to_string())
    }

    pub fn is_deterministic(&self) -> bool {
        fn det(k: &GeneratorKind) -> bool {
            match k {
                GeneratorKind::OsEntropyBaseline => false,
                GeneratorKind::BiasedWrapper { inner, .. } => det(inner),
                _ => true,
            }
        }
        det(&self.kind)
    }

    pub fn instantiate(&self, seed: &[u8]) -> Result<DynGenerator> {
        build(&self.kind, self.hash, seed)
    }

    /// The `index`-th corpus sequence as a streaming source of `total_bits` bits.
    pub fn source(
        &self,
        index: u64,
        total_bits: u64,
    ) -> Result<SequenceSource<GeneratorReader<DynGenerator>>> {
        let seed = self.seed_for(index);
        SequenceSource::from_generator(seed.clone(), self.instantiate(seed.as_bytes())?, total_bits)
    }
}

fn build(kind: &GeneratorKind, hash: HashAlgorithm, seed: &[u8]) -> Result<DynGenerator> {
    Ok(match kind {
        GeneratorKind::CounterPrng { out_bits_per_call } => {
            Box::new(CounterPrng::new(seed, hash, *out_bits_per_call)?)
        }
        GeneratorKind::HashDrbg { v_bits, uses_per_v } => {
            Box::new(HashDrbg::new(seed, hash, *v_bits, *uses_per_v)?)
        }
        GeneratorKind::BiasedWrapper { block_bits, inner } => {
            Box::new(BiasedWrapper::new(build(inner, hash, seed)?, *block_bits)?)
        }
        GeneratorKind::OsEntropyBaseline => Box::new(OsEntropy),
    })
}

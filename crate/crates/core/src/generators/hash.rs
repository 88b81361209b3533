//! Hash primitives backing the generators.

use serde::{Deserialize, Serialize};
use sha1::Sha1;
use sha2::{Digest, Sha256};

/// A fixed-output cryptographic hash.
pub trait HashPrimitive: Send + Sync {
    fn name(&self) -> &'static str;
    fn digest_bits(&self) -> usize;
    fn compute(&self, message: &[u8]) -> Vec<u8>;

    fn digest_bytes(&self) -> usize {
        self.digest_bits() / 8
    }
}

/// The two supported algorithms: a 160-bit and a 256-bit standard hash.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HashAlgorithm {
    Sha1,
    Sha256,
}

impl HashPrimitive for HashAlgorithm {
    fn name(&self) -> &'static str {
        match self {
            Self::Sha1 => "SHA-1",
            Self::Sha256 => "SHA-256",
        }
    }

    fn digest_bits(&self) -> usize {
        match self {
            Self::Sha1 => 160,
            Self::Sha256 => 256,
        }
    }

    fn compute(&self, message: &[u8]) -> Vec<u8> {
        match self {
            Self::Sha1 => Sha1::digest(message).to_vec(),
            Self::Sha256 => Sha256::digest(message).to_vec(),
        }
    }
}

impl HashAlgorithm {
    /// Hashes the concatenation of `parts` without copying them together.
    pub fn compute_parts(&self, parts: &[&[u8]]) -> Vec<u8> {
        fn run<D: Digest>(parts: &[&[u8]]) -> Vec<u8> {
            let mut d = D::new();
            for p in parts {
                d.update(p);
            }
            d.finalize().to_vec()
        }
        match self {
            Self::Sha1 => run::<Sha1>(parts),
            Self::Sha256 => run::<Sha256>(parts),
        }
    }
}

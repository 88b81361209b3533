//! Simplified Hash_DRBG: a `v_bits`-bit counter `V` is hashed to produce
//! output, and `V` is revised after every `uses_per_v` output blocks.
//!
//! Instantiation: `V = Hash_df(seed, v_bits)`, `C = Hash_df(0x00 ∥ V, v_bits)`.
//! Output block `k` under the current `V` is `Hash(V + k)`. Revision:
//! `V ← V + Hash(0x03 ∥ V) + C + r`, where `r` counts revisions from 1.
//! All additions are modulo `2^v_bits` on big-endian byte strings. There is
//! no reseeding, additional input or health testing.

use std::io;

use super::hash::{HashAlgorithm, HashPrimitive};
use super::BitGenerator;
use crate::error::{LilError, Result};

pub const DEFAULT_V_BITS: usize = 440;
pub const DEFAULT_USES_PER_V: u64 = 1 << 12;

/// Derivation function: concatenated `Hash(i ∥ bits ∥ input)` for `i = 1, 2, ...`,
/// truncated to `bits` bits.
pub fn hash_df(hash: HashAlgorithm, input: &[u8], bits: usize) -> Vec<u8> {
    let bytes = bits.div_ceil(8);
    let mut out = Vec::with_capacity(bytes + hash.digest_bytes());
    let mut counter: u8 = 1;
    while out.len() < bytes {
        out.extend(hash.compute_parts(&[&[counter], &(bits as u32).to_be_bytes(), input]));
        counter = counter.wrapping_add(1);
    }
    out.truncate(bytes);
    out
}

/// `acc += addend` modulo `2^(8 acc.len())`, both big-endian; `addend` is
/// right-aligned and truncated to the width of `acc`.
pub fn add_mod(acc: &mut [u8], addend: &[u8]) {
    let mut carry = 0u16;
    let mut rhs = addend.iter().rev();
    for a in acc.iter_mut().rev() {
        let s = u16::from(*a) + u16::from(rhs.next().copied().unwrap_or(0)) + carry;
        *a = s as u8;
        carry = s >> 8;
    }
}

#[derive(Debug, Clone)]
pub struct HashDrbg {
    hash: HashAlgorithm,
    v: Vec<u8>,
    c: Vec<u8>,
    data: Vec<u8>,
    uses_per_v: u64,
    uses: u64,
    revisions: u64,
    block: Vec<u8>,
    used: usize,
}

impl HashDrbg {
    pub fn new(seed: &[u8], hash: HashAlgorithm, v_bits: usize, uses_per_v: u64) -> Result<Self> {
        if v_bits == 0 || !v_bits.is_multiple_of(8) {
            return Err(LilError::Precondition(format!(
                "v_bits = {v_bits} is not a positive byte multiple"
            )));
        }
        if uses_per_v == 0 {
            return Err(LilError::Precondition(
                "uses_per_v must be at least 1".into(),
            ));
        }
        let v = hash_df(hash, seed, v_bits);
        let c = hash_df(hash, &[&[0u8][..], &v].concat(), v_bits);
        Ok(Self {
            hash,
            data: v.clone(),
            v,
            c,
            uses_per_v,
            uses: 0,
            revisions: 1,
            block: Vec::new(),
            used: 0,
        })
    }

    pub fn with_defaults(seed: &[u8], hash: HashAlgorithm) -> Result<Self> {
        Self::new(seed, hash, DEFAULT_V_BITS, DEFAULT_USES_PER_V)
    }

    /// Current `V` and the number of blocks already emitted under it.
    pub fn state(&self) -> (&[u8], u64) {
        (&self.v, self.uses)
    }

    fn revise(&mut self) {
        let h = self.hash.compute_parts(&[&[3u8], &self.v]);
        add_mod(&mut self.v, &h);
        add_mod(&mut self.v, &self.c);
        add_mod(&mut self.v, &self.revisions.to_be_bytes());
        self.revisions += 1;
        self.data.clone_from(&self.v);
        self.uses = 0;
    }

    /// The next output block.
    pub fn next_block(&mut self) -> Vec<u8> {
        if self.uses == self.uses_per_v {
            self.revise();
        }
        let out = self.hash.compute(&self.data);
        add_mod(&mut self.data, &[1]);
        self.uses += 1;
        out
    }
}

impl BitGenerator for HashDrbg {
    fn fill_bytes(&mut self, buf: &mut [u8]) -> io::Result<()> {
        let mut filled = 0;
        while filled < buf.len() {
            if self.used == self.block.len() {
                self.block = self.next_block();
                self.used = 0;
            }
            let n = (self.block.len() - self.used).min(buf.len() - filled);
            buf[filled..filled + n].copy_from_slice(&self.block[self.used..self.used + n]);
            self.used += n;
            filled += n;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rollover() {
        let mut v = vec![0xff; 55];
        add_mod(&mut v, &[1]);
        assert!(v.iter().all(|&b| b == 0));
        let mut v = vec![0x00, 0xff, 0xff];
        add_mod(&mut v, &[0x01, 0x00, 0x00, 0x01]);
        assert_eq!(v, [0x01, 0x00, 0x00]);
    }

    #[test]
    fn golden_prefix() {
        // Independent reimplementation over Python's hashlib.
        let mut g =
            HashDrbg::with_defaults(b"0th secret seed for NIST DRBG", HashAlgorithm::Sha256)
                .unwrap();
        let mut buf = [0u8; 32];
        g.fill_bytes(&mut buf).unwrap();
        assert_eq!(hex::encode(buf), GOLDEN_FIRST_BLOCK);
        let mut g = HashDrbg::new(
            b"0th secret seed for NIST DRBG",
            HashAlgorithm::Sha256,
            440,
            2,
        )
        .unwrap();
        let mut buf = [0u8; 5 * 32];
        g.fill_bytes(&mut buf).unwrap();
        assert_eq!(hex::encode(&buf[4 * 32..]), GOLDEN_FIFTH_BLOCK_TWO_USES);
    }

    const GOLDEN_FIRST_BLOCK: &str =
        "0ee7482a339b1047e2caad670e850306af18e76a8b25efcf9230a3ea7a92140a";
    const GOLDEN_FIFTH_BLOCK_TWO_USES: &str =
        "10c30e08ae18e19eefdcd8a8f79a8df2107ba330aa49418305a2b2ed9e2bf94f";

    #[test]
    fn single_use_revises_every_block() {
        let mut g = HashDrbg::new(b"s", HashAlgorithm::Sha1, 440, 1).unwrap();
        let mut seen = Vec::new();
        for _ in 0..20 {
            g.next_block();
            let (v, uses) = g.state();
            assert_eq!(uses, 1);
            seen.push(v.to_vec());
        }
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 20);
    }

    #[test]
    fn v_never_overused() {
        let mut g = HashDrbg::new(b"s", HashAlgorithm::Sha1, 440, 7).unwrap();
        let mut last = g.state().0.to_vec();
        let mut run = 0;
        for _ in 0..100 {
            g.next_block();
            let (v, uses) = g.state();
            if v == last.as_slice() {
                run += 1;
            } else {
                assert_eq!(run, 7);
                run = 1;
                last = v.to_vec();
            }
            assert!(uses <= 7);
        }
    }

    #[test]
    fn derivation_length() {
        assert_eq!(hash_df(HashAlgorithm::Sha1, b"x", 440).len(), 55);
        assert_eq!(hash_df(HashAlgorithm::Sha256, b"x", 888).len(), 111);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(HashDrbg::new(b"s", HashAlgorithm::Sha1, 441, 1).is_err());
        assert!(HashDrbg::new(b"s", HashAlgorithm::Sha1, 440, 0).is_err());
    }
}

//! Hash-counter generator: block `i` is the truncated digest of `seed ∥ i`,
//! with `i` a 64-bit big-endian counter.

use std::io;

use super::hash::{HashAlgorithm, HashPrimitive};
use super::BitGenerator;
use crate::error::{LilError, Result};

#[derive(Debug, Clone)]
pub struct CounterPrng {
    seed: Vec<u8>,
    hash: HashAlgorithm,
    block_bytes: usize,
    counter: u64,
    block: Vec<u8>,
    used: usize,
}

impl CounterPrng {
    pub fn new(
        seed: impl Into<Vec<u8>>,
        hash: HashAlgorithm,
        out_bits_per_call: usize,
    ) -> Result<Self> {
        if out_bits_per_call == 0
            || !out_bits_per_call.is_multiple_of(8)
            || out_bits_per_call > hash.digest_bits()
        {
            return Err(LilError::Precondition(format!(
                "output of {out_bits_per_call} bits per call must be a positive byte multiple at most {}",
                hash.digest_bits()
            )));
        }
        let block_bytes = out_bits_per_call / 8;
        Ok(Self {
            seed: seed.into(),
            hash,
            block_bytes,
            counter: 0,
            block: Vec::new(),
            used: block_bytes,
        })
    }

    pub fn block_bytes(&self) -> usize {
        self.block_bytes
    }

    /// Block `i` of the stream, computed directly.
    pub fn block(&self, i: u64) -> Vec<u8> {
        let mut d = self.hash.compute_parts(&[&self.seed, &i.to_be_bytes()]);
        d.truncate(self.block_bytes);
        d
    }
}

impl BitGenerator for CounterPrng {
    fn fill_bytes(&mut self, buf: &mut [u8]) -> io::Result<()> {
        let mut filled = 0;
        while filled < buf.len() {
            if self.used == self.block_bytes {
                self.block = self.block(self.counter);
                self.counter = self.counter.wrapping_add(1);
                self.used = 0;
            }
            let n = (self.block_bytes - self.used).min(buf.len() - filled);
            buf[filled..filled + n].copy_from_slice(&self.block[self.used..self.used + n]);
            self.used += n;
            filled += n;
        }
        Ok(())
    }
}

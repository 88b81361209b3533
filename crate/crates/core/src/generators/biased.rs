//! Per-block complementing wrapper whose output never has more ones than zeros
//! in any block. A prefix ending on a block boundary therefore has
//! `S_lil <= 0`, so the wrapped stream fails the snapshot test while each block
//! still looks locally random.

use std::io;

use super::BitGenerator;
use crate::bitstream::popcount;
use crate::error::{LilError, Result};

#[derive(Debug, Clone)]
pub struct BiasedWrapper<G> {
    inner: G,
    block: Vec<u8>,
    used: usize,
}

impl<G: BitGenerator> BiasedWrapper<G> {
    pub fn new(inner: G, block_bits: usize) -> Result<Self> {
        if block_bits == 0 || !block_bits.is_multiple_of(8) {
            return Err(LilError::Precondition(format!(
                "block of {block_bits} bits is not a positive byte multiple"
            )));
        }
        let bytes = block_bits / 8;
        Ok(Self {
            inner,
            block: vec![0; bytes],
            used: bytes,
        })
    }

    pub fn into_inner(self) -> G {
        self.inner
    }
}

/// Leaves `block` alone if it holds more zeros than ones, else complements it.
pub fn bias_block(block: &mut [u8]) {
    let ones = popcount(block);
    let bits = 8 * block.len() as u64;
    if 2 * ones >= bits {
        block.iter_mut().for_each(|b| *b = !*b);
    }
}

impl<G: BitGenerator> BitGenerator for BiasedWrapper<G> {
    fn fill_bytes(&mut self, buf: &mut [u8]) -> io::Result<()> {
        let mut filled = 0;
        while filled < buf.len() {
            if self.used == self.block.len() {
                self.inner.fill_bytes(&mut self.block)?;
                bias_block(&mut self.block);
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

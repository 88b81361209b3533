//! Operating-system entropy, used as a reference for ideal behavior.

use std::io;

use super::BitGenerator;

#[derive(Debug, Clone, Copy, Default)]
pub struct OsEntropy;

impl BitGenerator for OsEntropy {
    fn fill_bytes(&mut self, buf: &mut [u8]) -> io::Result<()> {
        getrandom::fill(buf).map_err(io::Error::from)
    }
}

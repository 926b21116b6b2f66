//! Binary weight container.
//!
//! Layout: the 8 ASCII bytes `BGNWTS01`, the neuron count `N` as a big-endian
//! u32, then `N·N` big-endian IEEE-754 doubles in row-major order.

use std::io::{self, Read, Write};

use bgn::WeightMatrix;
use thiserror::Error;

pub const MAGIC: &[u8; 8] = b"BGNWTS01";

#[derive(Debug, Error)]
pub enum WeightFileError {
    #[error("not a weight file: magic {found:?}")]
    BadMagic { found: [u8; 8] },

    #[error("truncated weight file: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("{0} trailing bytes after the weight matrix")]
    TrailingBytes(usize),

    #[error(transparent)]
    Invalid(#[from] bgn::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn encode(weights: &WeightMatrix) -> Vec<u8> {
    let n = weights.size();
    let mut out = Vec::with_capacity(12 + 8 * n * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(n as u32).to_be_bytes());
    for w in weights.as_slice() {
        out.extend_from_slice(&w.to_be_bytes());
    }
    out
}

pub fn write(weights: &WeightMatrix, out: &mut impl Write) -> io::Result<()> {
    out.write_all(&encode(weights))
}

/// Decodes a weight file, checking the symmetry and zero-diagonal invariants.
pub fn decode(bytes: &[u8]) -> Result<WeightMatrix, WeightFileError> {
    if bytes.len() < 12 {
        return Err(WeightFileError::Truncated {
            expected: 12,
            found: bytes.len(),
        });
    }
    let mut magic = [0u8; 8];
    magic.copy_from_slice(&bytes[..8]);
    if &magic != MAGIC {
        return Err(WeightFileError::BadMagic { found: magic });
    }
    let n = u32::from_be_bytes([bytes[8], bytes[9], bytes[10], bytes[11]]) as usize;
    let expected = 12 + 8 * n * n;
    if bytes.len() < expected {
        return Err(WeightFileError::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(WeightFileError::TrailingBytes(bytes.len() - expected));
    }
    let entries = bytes[12..]
        .chunks_exact(8)
        .map(|c| f64::from_be_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(WeightMatrix::from_row_major(n, entries)?)
}

pub fn read(input: &mut impl Read) -> Result<WeightMatrix, WeightFileError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    decode(&bytes)
}

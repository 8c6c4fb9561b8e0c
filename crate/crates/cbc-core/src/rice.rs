//! Block-adaptive Rice coding for non-negative symbols.
//!
//! Symbols are grouped into blocks of [`BLOCK_LEN`]; each block carries a
//! 5-bit parameter header followed by its Rice codes. A quotient of 32 or
//! more escapes to a raw 32-bit value so pathological symbols stay bounded.

use crate::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};

/// Symbols per adaptation block.
pub const BLOCK_LEN: usize = 64;

/// Bits in the per-block parameter header.
pub const K_BITS: u8 = 5;

/// Largest Rice parameter the block search considers.
pub const MAX_K: u32 = 24;

/// Quotient at which a symbol is written as an escape.
const ESCAPE_Q: u32 = 32;

/// Code length in bits of `value` under parameter `k`.
fn code_cost(value: u32, k: u32) -> u32 {
    let q = value >> k;
    if q < ESCAPE_Q {
        q + 1 + k
    } else {
        ESCAPE_Q + 32
    }
}

/// Picks the parameter minimizing the block's total code length, preferring
/// the smallest `k` on ties.
pub fn select_block_k(block: &[u32]) -> u32 {
    let mut best_k = 0;
    let mut best_cost = u64::MAX;
    for k in 0..=MAX_K {
        let cost: u64 = block.iter().map(|&v| code_cost(v, k) as u64).sum();
        if cost < best_cost {
            best_cost = cost;
            best_k = k;
        }
    }
    best_k
}

fn encode_symbol(w: &mut BitWriter, value: u32, k: u32) {
    let q = value >> k;
    if q < ESCAPE_Q {
        for _ in 0..q {
            w.push_bit(true);
        }
        w.push_bit(false);
        w.push_bits(value, k as u8);
    } else {
        for _ in 0..ESCAPE_Q {
            w.push_bit(true);
        }
        w.push_bits(value, 32);
    }
}

fn decode_symbol(r: &mut BitReader, k: u32) -> Result<u32> {
    let mut q = 0u32;
    while r.read_bit()? {
        q += 1;
        if q == ESCAPE_Q {
            return r.read_bits(32);
        }
    }
    Ok((q << k) | r.read_bits(k as u8)?)
}

/// Writes `symbols` as parameter-headed blocks. The final block may be short.
pub fn encode_blocks(w: &mut BitWriter, symbols: &[u32]) {
    for block in symbols.chunks(BLOCK_LEN) {
        let k = select_block_k(block);
        w.push_bits(k, K_BITS);
        for &value in block {
            encode_symbol(w, value, k);
        }
    }
}

/// Reads exactly `count` symbols written by [`encode_blocks`].
pub fn decode_blocks(r: &mut BitReader, count: usize) -> Result<Vec<u32>> {
    let mut symbols = Vec::with_capacity(count);
    while symbols.len() < count {
        let k = r.read_bits(K_BITS)?;
        if k > MAX_K {
            return Err(Error::corrupt(
                r.bit_pos() / 8,
                format!("Rice parameter {k} out of range"),
            ));
        }
        let block_len = BLOCK_LEN.min(count - symbols.len());
        for _ in 0..block_len {
            symbols.push(decode_symbol(r, k)?);
        }
    }
    Ok(symbols)
}

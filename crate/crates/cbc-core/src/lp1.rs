//! LP1 lossless plane codec.
//!
//! Raster-order median prediction, modular residual folding, and
//! block-adaptive Rice coding. A stream carries no geometry of its own;
//! decoding requires the plane's width, height, and depth, and consumes a
//! deterministic number of bytes, so streams concatenate without framing.

use crate::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};
use crate::plane::ImagePlane;
use crate::rice;

/// Median predictor over the left, up, and up-left neighbors.
///
/// Equivalent to the median of `left`, `up`, and `left + up - upleft`.
pub fn med_predict(left: u16, up: u16, upleft: u16) -> u16 {
    let (lo, hi) = if left <= up { (left, up) } else { (up, left) };
    if upleft >= hi {
        lo
    } else if upleft <= lo {
        hi
    } else {
        // lo < upleft < hi keeps the result inside [lo, hi].
        (left as i32 + up as i32 - upleft as i32) as u16
    }
}

fn predict(samples: &[u16], width: usize, x: usize, y: usize) -> u16 {
    let idx = y * width + x;
    match (x, y) {
        (0, 0) => 0,
        (_, 0) => samples[idx - 1],
        (0, _) => samples[idx - width],
        _ => med_predict(
            samples[idx - 1],
            samples[idx - width],
            samples[idx - width - 1],
        ),
    }
}

/// Maps a prediction residual to a non-negative symbol in `[0, 2^depth)`.
///
/// The residual is reduced modulo `2^depth`, then small positive and small
/// negative values interleave so magnitude ordering survives.
pub fn fold_residual(actual: u16, predicted: u16, depth: u8) -> u32 {
    let modulus = 1u32 << depth;
    let s = (actual as u32).wrapping_sub(predicted as u32) & (modulus - 1);
    if s < modulus >> 1 {
        2 * s
    } else {
        2 * (modulus - s) - 1
    }
}

/// Inverts [`fold_residual`]. `folded` must be below `2^depth`.
pub fn unfold_residual(folded: u32, predicted: u16, depth: u8) -> u16 {
    let modulus = 1u32 << depth;
    debug_assert!(folded < modulus);
    let s = if folded % 2 == 0 {
        folded / 2
    } else {
        modulus - (folded + 1) / 2
    };
    ((predicted as u32 + s) & (modulus - 1)) as u16
}

/// Encodes a plane losslessly. The plane's depth must be at least 1.
pub fn lp1_encode(plane: &ImagePlane) -> Result<Vec<u8>> {
    if plane.depth() == 0 {
        return Err(Error::domain("cannot encode a zero-depth plane"));
    }
    let width = plane.width() as usize;
    let height = plane.height() as usize;
    let samples = plane.samples();
    let mut symbols = Vec::with_capacity(samples.len());
    for y in 0..height {
        for x in 0..width {
            let predicted = predict(samples, width, x, y);
            symbols.push(fold_residual(samples[y * width + x], predicted, plane.depth()));
        }
    }
    let mut w = BitWriter::new();
    rice::encode_blocks(&mut w, &symbols);
    Ok(w.finish())
}

/// Decodes one plane from the front of `bytes`, returning it together with
/// the number of bytes consumed. Trailing data is ignored.
pub fn lp1_decode_prefix(
    bytes: &[u8],
    width: u32,
    height: u32,
    depth: u8,
) -> Result<(ImagePlane, usize)> {
    if depth == 0 {
        return Err(Error::domain("cannot decode a zero-depth plane"));
    }
    let mut r = BitReader::new(bytes);
    let count = width as usize * height as usize;
    let symbols = rice::decode_blocks(&mut r, count)?;
    let consumed = r.byte_len_consumed();
    let limit = 1u32 << depth;
    if let Some(&bad) = symbols.iter().find(|&&u| u >= limit) {
        return Err(Error::corrupt(
            consumed,
            format!("residual symbol {bad} exceeds plane depth {depth}"),
        ));
    }
    let mut samples = vec![0u16; count];
    let w = width as usize;
    for y in 0..height as usize {
        for x in 0..w {
            let predicted = predict(&samples, w, x, y);
            samples[y * w + x] = unfold_residual(symbols[y * w + x], predicted, depth);
        }
    }
    Ok((ImagePlane::new(width, height, depth, samples)?, consumed))
}

/// Decodes a plane occupying the whole of `bytes`.
pub fn lp1_decode(bytes: &[u8], width: u32, height: u32, depth: u8) -> Result<ImagePlane> {
    let (plane, consumed) = lp1_decode_prefix(bytes, width, height, depth)?;
    if consumed != bytes.len() {
        return Err(Error::corrupt(
            consumed,
            format!("{} trailing bytes after plane stream", bytes.len() - consumed),
        ));
    }
    Ok(plane)
}

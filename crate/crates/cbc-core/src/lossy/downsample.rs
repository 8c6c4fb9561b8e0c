//! DOWNSAMPLE codec: a box-filtered grid stored losslessly, reconstructed
//! by integer bilinear interpolation.
//!
//! The grid has one sample per f-by-f block, block centers define the
//! interpolation lattice, and every arithmetic step is exact fixed point
//! with per-axis denominator 2f, so encoders and decoders agree bit for bit.

use crate::error::{Error, Result};
use crate::lp1;
use crate::plane::ImagePlane;

/// Grid dimensions covering a plane at the given factor.
pub fn grid_dims(width: u32, height: u32, factor: u32) -> (u32, u32) {
    (width.div_ceil(factor), height.div_ceil(factor))
}

/// Replaces each f-by-f block with the rounded mean of its in-bounds
/// pixels. Edge blocks average only the pixels that exist.
pub fn box_downsample(plane: &ImagePlane, factor: u32) -> Result<ImagePlane> {
    check_factor(factor)?;
    let (gw, gh) = grid_dims(plane.width(), plane.height(), factor);
    let f = factor as usize;
    let width = plane.width() as usize;
    let height = plane.height() as usize;
    let samples = plane.samples();
    let mut grid = Vec::with_capacity(gw as usize * gh as usize);
    for gy in 0..gh as usize {
        for gx in 0..gw as usize {
            let x1 = (gx * f + f).min(width);
            let y1 = (gy * f + f).min(height);
            let mut sum = 0u64;
            for y in gy * f..y1 {
                for x in gx * f..x1 {
                    sum += samples[y * width + x] as u64;
                }
            }
            let count = ((x1 - gx * f) * (y1 - gy * f)) as u64;
            grid.push(((2 * sum + count) / (2 * count)) as u16);
        }
    }
    ImagePlane::new(gw, gh, plane.depth(), grid)
}

/// Grid index pair and fixed-point weights for one output coordinate.
///
/// The output pixel center maps to grid coordinate (2x + 1 - f) / 2f;
/// indices clamp to the edge, weights keep the fractional position.
fn axis_taps(x: i64, f: i64, grid_len: i64) -> (usize, usize, i64, i64) {
    let num = 2 * x + 1 - f;
    let g0 = num.div_euclid(2 * f);
    let r = num - 2 * f * g0;
    let i0 = g0.clamp(0, grid_len - 1) as usize;
    let i1 = (g0 + 1).clamp(0, grid_len - 1) as usize;
    (i0, i1, 2 * f - r, r)
}

/// Bilinearly expands a grid back to the original dimensions.
pub fn bilinear_upsample(
    grid: &ImagePlane,
    factor: u32,
    width: u32,
    height: u32,
) -> Result<ImagePlane> {
    check_factor(factor)?;
    let (gw, gh) = grid_dims(width, height, factor);
    if grid.width() != gw || grid.height() != gh {
        return Err(Error::shape(format!(
            "grid is {}x{}, expected {gw}x{gh} for {width}x{height} at factor {factor}",
            grid.width(),
            grid.height()
        )));
    }
    let f = factor as i64;
    let half = 2 * f * f;
    let denom = 4 * f * f;
    let x_taps: Vec<_> = (0..width as i64).map(|x| axis_taps(x, f, gw as i64)).collect();
    let y_taps: Vec<_> = (0..height as i64).map(|y| axis_taps(y, f, gh as i64)).collect();
    let g = grid.samples();
    let gw = gw as usize;
    let mut samples = Vec::with_capacity(width as usize * height as usize);
    for &(y0, y1, wy0, wy1) in &y_taps {
        for &(x0, x1, wx0, wx1) in &x_taps {
            let acc = wx0 * wy0 * g[y0 * gw + x0] as i64
                + wx1 * wy0 * g[y0 * gw + x1] as i64
                + wx0 * wy1 * g[y1 * gw + x0] as i64
                + wx1 * wy1 * g[y1 * gw + x1] as i64;
            samples.push(((acc + half) / denom) as u16);
        }
    }
    ImagePlane::new(width, height, grid.depth(), samples)
}

/// Keeps the fixed-point weight products inside 64 bits.
pub(crate) fn check_factor(factor: u32) -> Result<()> {
    if !(2..=65536).contains(&factor) {
        return Err(Error::config(format!(
            "downsample factor {factor} outside 2..=65536"
        )));
    }
    Ok(())
}

pub(crate) fn encode_planes(planes: &[ImagePlane], factor: u32) -> Result<Vec<u8>> {
    let mut payload = Vec::new();
    for plane in planes {
        payload.extend(lp1::lp1_encode(&box_downsample(plane, factor)?)?);
    }
    Ok(payload)
}

pub(crate) fn decode_planes(
    payload: &[u8],
    factor: u32,
    width: u32,
    height: u32,
    channels: u8,
    depth: u8,
) -> Result<Vec<ImagePlane>> {
    check_factor(factor)?;
    let (gw, gh) = grid_dims(width, height, factor);
    let mut offset = 0;
    let mut planes = Vec::with_capacity(channels as usize);
    for _ in 0..channels {
        let (grid, used) = lp1::lp1_decode_prefix(&payload[offset..], gw, gh, depth)
            .map_err(|e| e.offset_by(offset))?;
        offset += used;
        planes.push(bilinear_upsample(&grid, factor, width, height)?);
    }
    if offset != payload.len() {
        return Err(Error::corrupt(
            offset,
            format!("{} trailing bytes after downsample payload", payload.len() - offset),
        ));
    }
    Ok(planes)
}

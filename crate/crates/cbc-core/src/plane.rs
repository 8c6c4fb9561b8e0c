//! Single-channel image storage.

use crate::error::{Error, Result};

/// Largest supported bit depth for any plane.
pub const MAX_DEPTH: u8 = 16;

/// One channel of an image: `width * height` unsigned samples in row-major
/// order at a declared bit depth.
///
/// Every sample is strictly less than `2^depth`. A depth of 0 is legal and
/// forces all samples to zero (it is what a channel truncated to zero bits
/// looks like).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImagePlane {
    width: u32,
    height: u32,
    depth: u8,
    samples: Vec<u16>,
}

impl ImagePlane {
    /// Builds a plane, validating geometry and the per-sample range.
    pub fn new(width: u32, height: u32, depth: u8, samples: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::shape(format!("empty plane {width}x{height}")));
        }
        if depth > MAX_DEPTH {
            return Err(Error::domain(format!("depth {depth} exceeds {MAX_DEPTH}")));
        }
        let expected = (width as usize)
            .checked_mul(height as usize)
            .ok_or_else(|| Error::shape(format!("plane {width}x{height} overflows")))?;
        if samples.len() != expected {
            return Err(Error::shape(format!(
                "plane {width}x{height} needs {expected} samples, got {}",
                samples.len()
            )));
        }
        let limit = max_sample(depth);
        if let Some(bad) = samples.iter().position(|&s| s > limit) {
            return Err(Error::domain(format!(
                "sample {} at index {bad} exceeds {limit} for depth {depth}",
                samples[bad]
            )));
        }
        Ok(Self {
            width,
            height,
            depth,
            samples,
        })
    }

    /// Constant-valued plane.
    pub fn filled(width: u32, height: u32, depth: u8, value: u16) -> Result<Self> {
        let len = (width as usize)
            .checked_mul(height as usize)
            .ok_or_else(|| Error::shape(format!("plane {width}x{height} overflows")))?;
        Self::new(width, height, depth, vec![value; len])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn depth(&self) -> u8 {
        self.depth
    }

    /// Row-major sample slice, length `width * height`.
    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    pub fn sample(&self, x: u32, y: u32) -> u16 {
        self.samples[y as usize * self.width as usize + x as usize]
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // width, height >= 1 by construction
    }

    /// True when `other` has identical width and height.
    pub fn same_geometry(&self, other: &ImagePlane) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Largest sample value representable at `depth` bits.
pub fn max_sample(depth: u8) -> u16 {
    debug_assert!(depth <= MAX_DEPTH);
    if depth == 0 {
        0
    } else {
        (((1u32 << depth) - 1) & 0xffff) as u16
    }
}

/// Checks that a list of planes forms a coherent image: 1 or 3 channels,
/// all with the same geometry and depth.
pub fn validate_image(planes: &[ImagePlane]) -> Result<()> {
    match planes.len() {
        1 | 3 => {}
        n => return Err(Error::shape(format!("expected 1 or 3 channels, got {n}"))),
    }
    let first = &planes[0];
    for (i, p) in planes.iter().enumerate().skip(1) {
        if !first.same_geometry(p) {
            return Err(Error::shape(format!(
                "channel {i} is {}x{}, channel 0 is {}x{}",
                p.width(),
                p.height(),
                first.width(),
                first.height()
            )));
        }
        if p.depth() != first.depth() {
            return Err(Error::shape(format!(
                "channel {i} depth {} differs from channel 0 depth {}",
                p.depth(),
                first.depth()
            )));
        }
    }
    Ok(())
}

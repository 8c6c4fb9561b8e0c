//! Truncation to a critical bit depth, the per-sample bound interval it
//! induces, and the clamping decoder.
//!
//! Keeping the `n` leading bits of a `d`-bit sample losslessly pins the
//! original value inside a closed interval of width `2^(d-n) - 1`. Any
//! prediction of the sample, from any lossy codec, can then be snapped into
//! that interval, which caps the absolute reconstruction error at the
//! interval width regardless of how wrong the prediction was.

use crate::error::{Error, Result};
use crate::plane::ImagePlane;

/// Source depth `d` and critical depth `n` of a bounded channel.
///
/// `0 <= n <= d <= 16`. `n == d` makes truncation the identity (the bound
/// interval collapses to a point); `n == 0` keeps nothing (the interval is
/// the full sample range).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationSpec {
    source_depth: u8,
    critical_depth: u8,
}

/// Closed interval `[lower, upper]` containing every sample that truncates
/// to a given reduced-precision code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundPair {
    pub lower: u16,
    pub upper: u16,
}

impl TruncationSpec {
    /// Validates `1 <= d <= 16` and `0 <= n <= d`.
    pub fn new(source_depth: u8, critical_depth: u8) -> Result<Self> {
        if source_depth == 0 || source_depth > 16 {
            return Err(Error::domain(format!(
                "source depth {source_depth} outside 1..=16"
            )));
        }
        if critical_depth > source_depth {
            return Err(Error::domain(format!(
                "critical depth {critical_depth} exceeds source depth {source_depth}"
            )));
        }
        Ok(Self {
            source_depth,
            critical_depth,
        })
    }

    pub fn source_depth(&self) -> u8 {
        self.source_depth
    }

    pub fn critical_depth(&self) -> u8 {
        self.critical_depth
    }

    /// Bits dropped per sample, `d - n`.
    pub fn shift(&self) -> u8 {
        self.source_depth - self.critical_depth
    }

    /// Largest value truncation can discard: `2^(d-n) - 1`.
    ///
    /// Always recomputed from the depths, so it cannot go stale.
    pub fn max_trunc_error(&self) -> u16 {
        ((1u32 << self.shift()) - 1) as u16
    }

    /// Keeps the `n` leading bits of `sample`: floor division by `2^(d-n)`.
    ///
    /// Shifts go through u32 internally: `d - n` can be a full 16 bits.
    pub fn truncate(&self, sample: u16) -> Result<u16> {
        self.check_sample(sample)?;
        Ok(((sample as u32) >> self.shift()) as u16)
    }

    /// Interval of all `d`-bit samples whose truncation is `reduced`.
    ///
    /// `lower` is the smallest such sample (`reduced` shifted back up) and
    /// `upper = lower + 2^(d-n) - 1` the largest.
    pub fn bounds_of(&self, reduced: u16) -> Result<BoundPair> {
        self.check_reduced(reduced)?;
        let lower = ((reduced as u32) << self.shift()) as u16;
        Ok(BoundPair {
            lower,
            upper: lower + self.max_trunc_error(),
        })
    }

    /// Snaps a lossy prediction into the bound interval of `reduced`.
    ///
    /// If the prediction's `n` leading bits match `reduced` it passes
    /// through untouched; if they are below, the lower bound is returned;
    /// if above, the upper bound. Equivalent to clamping the prediction
    /// into `[lower, upper]`.
    pub fn clamp_decode(&self, lossy_prediction: u16, reduced: u16) -> Result<u16> {
        self.check_sample(lossy_prediction)?;
        self.check_reduced(reduced)?;
        let predicted_leading = ((lossy_prediction as u32) >> self.shift()) as u16;
        let lower = ((reduced as u32) << self.shift()) as u16;
        Ok(match predicted_leading.cmp(&reduced) {
            std::cmp::Ordering::Equal => lossy_prediction,
            std::cmp::Ordering::Less => lower,
            std::cmp::Ordering::Greater => lower + self.max_trunc_error(),
        })
    }

    fn check_sample(&self, sample: u16) -> Result<()> {
        if (sample as u32) >= (1u32 << self.source_depth) {
            return Err(Error::domain(format!(
                "sample {sample} out of range for depth {}",
                self.source_depth
            )));
        }
        Ok(())
    }

    fn check_reduced(&self, reduced: u16) -> Result<()> {
        if (reduced as u32) >= (1u32 << self.critical_depth) {
            return Err(Error::domain(format!(
                "reduced code {reduced} out of range for critical depth {}",
                self.critical_depth
            )));
        }
        Ok(())
    }
}

/// Truncates every sample of a plane, producing a plane at depth `n`.
pub fn truncate_plane(plane: &ImagePlane, spec: &TruncationSpec) -> Result<ImagePlane> {
    if plane.depth() != spec.source_depth() {
        return Err(Error::shape(format!(
            "plane depth {} does not match source depth {}",
            plane.depth(),
            spec.source_depth()
        )));
    }
    let shift = spec.shift();
    let reduced = plane
        .samples()
        .iter()
        .map(|&s| ((s as u32) >> shift) as u16)
        .collect();
    ImagePlane::new(
        plane.width(),
        plane.height(),
        spec.critical_depth(),
        reduced,
    )
}

/// Element-wise [`TruncationSpec::clamp_decode`] over whole planes.
///
/// `lossy` must be at depth `d` and `reduced` at depth `n`, with matching
/// geometry; the result is at depth `d`.
pub fn clamp_decode_plane(
    lossy: &ImagePlane,
    reduced: &ImagePlane,
    spec: &TruncationSpec,
) -> Result<ImagePlane> {
    if !lossy.same_geometry(reduced) {
        return Err(Error::shape(format!(
            "lossy plane {}x{} vs reduced plane {}x{}",
            lossy.width(),
            lossy.height(),
            reduced.width(),
            reduced.height()
        )));
    }
    if lossy.depth() != spec.source_depth() {
        return Err(Error::shape(format!(
            "lossy plane depth {} does not match source depth {}",
            lossy.depth(),
            spec.source_depth()
        )));
    }
    if reduced.depth() != spec.critical_depth() {
        return Err(Error::shape(format!(
            "reduced plane depth {} does not match critical depth {}",
            reduced.depth(),
            spec.critical_depth()
        )));
    }
    let shift = spec.shift();
    let err = spec.max_trunc_error();
    let out = lossy
        .samples()
        .iter()
        .zip(reduced.samples())
        .map(|(&y, &r)| {
            let lower = ((r as u32) << shift) as u16;
            match (((y as u32) >> shift) as u16).cmp(&r) {
                std::cmp::Ordering::Equal => y,
                std::cmp::Ordering::Less => lower,
                std::cmp::Ordering::Greater => lower + err,
            }
        })
        .collect();
    ImagePlane::new(lossy.width(), lossy.height(), spec.source_depth(), out)
}

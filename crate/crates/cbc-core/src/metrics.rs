//! Quality measurement and bound certification.
//!
//! Metrics treat every sample of every channel equally. PSNR uses the
//! depth's peak value; identical inputs report it as the distinguished
//! value "inf".

use std::fmt;

use crate::bounds::TruncationSpec;
use crate::color::luma_plane;
use crate::container::{Cbc1Header, ColorMode};
use crate::error::{Error, Result};
use crate::plane::{max_sample, validate_image, ImagePlane};

/// Measured differences between a reference image and a reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub mse: f64,
    /// `None` encodes infinite PSNR (identical images).
    pub psnr_db: Option<f64>,
    pub max_abs_error: u16,
    /// Samples outside their certified interval; absent when no bound
    /// check ran.
    pub bound_violations: Option<u64>,
    /// Raw size over compressed size; absent when no file was involved.
    pub compression_ratio: Option<f64>,
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mse={:.6}", self.mse)?;
        match self.psnr_db {
            Some(db) => writeln!(f, "psnr_db={db:.4}")?,
            None => writeln!(f, "psnr_db=inf")?,
        }
        write!(f, "max_abs_error={}", self.max_abs_error)?;
        if let Some(v) = self.bound_violations {
            write!(f, "\nbound_violations={v}")?;
        }
        if let Some(r) = self.compression_ratio {
            write!(f, "\ncompression_ratio={r:.2}")?;
        }
        writeln!(f)
    }
}

impl MetricsReport {
    /// Single-line JSON object with the same fields as [`fmt::Display`].
    pub fn to_json(&self) -> String {
        let mut fields = vec![
            format!("\"mse\": {:.6}", self.mse),
            match self.psnr_db {
                Some(db) => format!("\"psnr_db\": {db:.4}"),
                None => "\"psnr_db\": \"inf\"".to_string(),
            },
            format!("\"max_abs_error\": {}", self.max_abs_error),
        ];
        if let Some(v) = self.bound_violations {
            fields.push(format!("\"bound_violations\": {v}"));
        }
        if let Some(r) = self.compression_ratio {
            fields.push(format!("\"compression_ratio\": {r:.2}"));
        }
        format!("{{{}}}", fields.join(", "))
    }
}

fn check_comparable(original: &[ImagePlane], decoded: &[ImagePlane]) -> Result<()> {
    validate_image(original)?;
    validate_image(decoded)?;
    if original.len() != decoded.len()
        || !original[0].same_geometry(&decoded[0])
        || original[0].depth() != decoded[0].depth()
    {
        return Err(Error::shape(format!(
            "cannot compare {}x{}x{} depth {} with {}x{}x{} depth {}",
            original[0].width(),
            original[0].height(),
            original.len(),
            original[0].depth(),
            decoded[0].width(),
            decoded[0].height(),
            decoded.len(),
            decoded[0].depth(),
        )));
    }
    Ok(())
}

/// Mean squared error, PSNR, and worst-case sample error over all channels.
pub fn compute_metrics(original: &[ImagePlane], decoded: &[ImagePlane]) -> Result<MetricsReport> {
    check_comparable(original, decoded)?;
    let mut sse = 0u64;
    let mut max_abs_error = 0u16;
    let mut count = 0u64;
    for (a, b) in original.iter().zip(decoded) {
        for (&x, &y) in a.samples().iter().zip(b.samples()) {
            let diff = x.abs_diff(y);
            max_abs_error = max_abs_error.max(diff);
            sse += (diff as u64).pow(2);
            count += 1;
        }
    }
    let mse = sse as f64 / count as f64;
    let psnr_db = if sse == 0 {
        None
    } else {
        let peak = max_sample(original[0].depth()) as f64;
        Some(10.0 * (peak * peak / mse).log10())
    };
    Ok(MetricsReport {
        mse,
        psnr_db,
        max_abs_error,
        bound_violations: None,
        compression_ratio: None,
    })
}

/// Counts decoded samples outside the interval their reduced code allows.
///
/// Bounds are recomputed from the original by truncation, channel by
/// channel in per-channel mode and on the luminance planes in RCT-Y mode.
/// Unbounded channels cannot violate.
pub fn verify_bounds(
    original: &[ImagePlane],
    decoded: &[ImagePlane],
    header: &Cbc1Header,
) -> Result<u64> {
    check_comparable(original, decoded)?;
    if original.len() != header.channel_count as usize {
        return Err(Error::shape(format!(
            "image has {} channels, header declares {}",
            original.len(),
            header.channel_count
        )));
    }
    if original[0].depth() != header.source_depth {
        return Err(Error::shape(format!(
            "image depth {} does not match header depth {}",
            original[0].depth(),
            header.source_depth
        )));
    }
    let count_plane = |orig: &ImagePlane, dec: &ImagePlane, n: u8| -> Result<u64> {
        if n == 0 {
            return Ok(0);
        }
        let spec = TruncationSpec::new(header.source_depth, n)?;
        let mut violations = 0;
        for (&x, &y) in orig.samples().iter().zip(dec.samples()) {
            let b = spec.bounds_of(spec.truncate(x)?)?;
            if y < b.lower || y > b.upper {
                violations += 1;
            }
        }
        Ok(violations)
    };
    match header.color_mode {
        ColorMode::PerChannel => {
            let mut total = 0;
            for (c, (orig, dec)) in original.iter().zip(decoded).enumerate() {
                total += count_plane(orig, dec, header.critical_depths[c])?;
            }
            Ok(total)
        }
        ColorMode::RctY => count_plane(
            &luma_plane(original)?,
            &luma_plane(decoded)?,
            header.critical_depths[0],
        ),
    }
}

//! CBC1 container format and the end-to-end pipeline.
//!
//! A file stores two objects behind one header: the lossless section
//! (reduced-precision planes that establish the error bounds) and the lossy
//! section (the codec payload for the original image, never the truncated
//! one). Multi-byte header fields are little-endian.

use std::fmt;

use crate::bounds::{clamp_decode_plane, truncate_plane, TruncationSpec};
use crate::color::{bounded_decode_planes, luma_plane};
use crate::error::{Error, Result};
use crate::lossy::{lossy_decode, lossy_encode, LossyCodecConfig};
use crate::lp1::{lp1_decode_prefix, lp1_encode};
use crate::plane::{validate_image, ImagePlane, MAX_DEPTH};

const MAGIC: &[u8; 4] = b"CBC1";
const VERSION: u8 = 1;

/// Largest pixel count a header may declare, guarding decode allocations.
const MAX_PIXELS: u64 = 1 << 31;

/// How sample values relate to the bounded channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorMode {
    /// Each channel is truncated and bounded independently.
    PerChannel,
    /// Channels rotate through the reversible color transform and only the
    /// luminance plane is bounded.
    RctY,
}

impl ColorMode {
    fn to_byte(self) -> u8 {
        match self {
            ColorMode::PerChannel => 0,
            ColorMode::RctY => 1,
        }
    }

    fn from_byte(b: u8, offset: usize) -> Result<Self> {
        match b {
            0 => Ok(ColorMode::PerChannel),
            1 => Ok(ColorMode::RctY),
            _ => Err(Error::corrupt(offset, format!("unknown color mode {b}"))),
        }
    }
}

/// Parsed CBC1 header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cbc1Header {
    pub width: u32,
    pub height: u32,
    pub channel_count: u8,
    pub source_depth: u8,
    pub color_mode: ColorMode,
    /// One entry per channel; 0 leaves a channel unbounded. In RCT-Y mode
    /// only the first entry applies (to the luminance plane).
    pub critical_depths: Vec<u8>,
    pub codec: LossyCodecConfig,
    pub lossless_len: u64,
    pub lossy_len: u64,
}

impl Cbc1Header {
    /// Serialized header length in bytes.
    pub fn header_size(&self) -> usize {
        34 + self.channel_count as usize + 4 * self.codec.params().len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let params = self.codec.params();
        let mut out = Vec::with_capacity(self.header_size());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        out.push(self.channel_count);
        out.push(self.source_depth);
        out.push(self.color_mode.to_byte());
        out.extend_from_slice(&self.critical_depths);
        out.push(self.codec.codec_id());
        out.push(params.len() as u8);
        for p in &params {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out.extend_from_slice(&self.lossless_len.to_le_bytes());
        out.extend_from_slice(&self.lossy_len.to_le_bytes());
        out
    }

    /// Parses and validates a header from the front of `bytes`.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let need = |end: usize| -> Result<()> {
            if bytes.len() < end {
                Err(Error::corrupt(bytes.len(), "header truncated"))
            } else {
                Ok(())
            }
        };
        need(16)?;
        if &bytes[0..4] != MAGIC {
            return Err(Error::corrupt(0, "bad magic, not a CBC1 file"));
        }
        if bytes[4] != VERSION {
            return Err(Error::corrupt(4, format!("unsupported version {}", bytes[4])));
        }
        let width = u32::from_le_bytes(bytes[5..9].try_into().unwrap());
        let height = u32::from_le_bytes(bytes[9..13].try_into().unwrap());
        if width == 0 || height == 0 {
            return Err(Error::corrupt(5, "zero image dimension"));
        }
        if width as u64 * height as u64 > MAX_PIXELS {
            return Err(Error::corrupt(5, "implausible image dimensions"));
        }
        let channel_count = bytes[13];
        if channel_count != 1 && channel_count != 3 {
            return Err(Error::corrupt(
                13,
                format!("channel count {channel_count} not 1 or 3"),
            ));
        }
        let source_depth = bytes[14];
        if source_depth == 0 || source_depth > MAX_DEPTH {
            return Err(Error::corrupt(14, format!("source depth {source_depth}")));
        }
        let color_mode = ColorMode::from_byte(bytes[15], 15)?;
        if color_mode == ColorMode::RctY && channel_count != 3 {
            return Err(Error::corrupt(15, "RCT-Y mode requires three channels"));
        }
        let mut pos = 16;
        need(pos + channel_count as usize)?;
        let critical_depths = bytes[pos..pos + channel_count as usize].to_vec();
        for (i, &n) in critical_depths.iter().enumerate() {
            if n > source_depth {
                return Err(Error::corrupt(
                    pos + i,
                    format!("critical depth {n} exceeds source depth {source_depth}"),
                ));
            }
        }
        pos += channel_count as usize;
        need(pos + 2)?;
        let codec_id = bytes[pos];
        let param_count = bytes[pos + 1] as usize;
        need(pos + 2 + 4 * param_count)?;
        let params: Vec<u32> = (0..param_count)
            .map(|i| {
                let at = pos + 2 + 4 * i;
                u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
            })
            .collect();
        let codec = LossyCodecConfig::from_id_params(codec_id, &params)
            .map_err(|e| Error::corrupt(pos, e.to_string()))?;
        pos += 2 + 4 * param_count;
        need(pos + 16)?;
        let lossless_len = u64::from_le_bytes(bytes[pos..pos + 8].try_into().unwrap());
        let lossy_len = u64::from_le_bytes(bytes[pos + 8..pos + 16].try_into().unwrap());
        Ok(Cbc1Header {
            width,
            height,
            channel_count,
            source_depth,
            color_mode,
            critical_depths,
            codec,
            lossless_len,
            lossy_len,
        })
    }
}

/// Compression parameters supplied by the caller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressConfig {
    pub color_mode: ColorMode,
    /// Per channel in `PerChannel` mode; a single luminance entry in
    /// `RctY` mode.
    pub critical_depths: Vec<u8>,
    pub codec: LossyCodecConfig,
}

fn channel_depths(config: &CompressConfig, channels: usize, depth: u8) -> Result<Vec<u8>> {
    let expected = match config.color_mode {
        ColorMode::PerChannel => channels,
        ColorMode::RctY => 1,
    };
    if config.critical_depths.len() != expected {
        return Err(Error::config(format!(
            "{} critical depths supplied, {expected} expected",
            config.critical_depths.len()
        )));
    }
    for &n in &config.critical_depths {
        if n > depth {
            return Err(Error::config(format!(
                "critical depth {n} exceeds source depth {depth}"
            )));
        }
    }
    // The header always carries one entry per channel.
    let mut depths = config.critical_depths.clone();
    depths.resize(channels, 0);
    Ok(depths)
}

/// Compresses an image into a CBC1 byte stream.
pub fn compress(image: &[ImagePlane], config: &CompressConfig) -> Result<Vec<u8>> {
    validate_image(image)?;
    config.codec.validate()?;
    let depth = image[0].depth();
    if depth == 0 {
        return Err(Error::config("source depth must be at least 1"));
    }
    if config.color_mode == ColorMode::RctY && image.len() != 3 {
        return Err(Error::config("RCT-Y mode requires a three-channel image"));
    }
    let critical_depths = channel_depths(config, image.len(), depth)?;

    let mut lossless = Vec::new();
    match config.color_mode {
        ColorMode::PerChannel => {
            for (plane, &n) in image.iter().zip(&critical_depths) {
                if n > 0 {
                    let spec = TruncationSpec::new(depth, n)?;
                    lossless.extend(lp1_encode(&truncate_plane(plane, &spec)?)?);
                }
            }
        }
        ColorMode::RctY => {
            let n = critical_depths[0];
            if n > 0 {
                let spec = TruncationSpec::new(depth, n)?;
                lossless.extend(lp1_encode(&truncate_plane(&luma_plane(image)?, &spec)?)?);
            }
        }
    }
    let lossy = lossy_encode(image, &config.codec)?;

    let header = Cbc1Header {
        width: image[0].width(),
        height: image[0].height(),
        channel_count: image.len() as u8,
        source_depth: depth,
        color_mode: config.color_mode,
        critical_depths,
        codec: config.codec,
        lossless_len: lossless.len() as u64,
        lossy_len: lossy.len() as u64,
    };
    let mut out = header.to_bytes();
    out.extend_from_slice(&lossless);
    out.extend_from_slice(&lossy);
    Ok(out)
}

/// Splits a CBC1 stream into header and section slices.
fn split_sections(bytes: &[u8]) -> Result<(Cbc1Header, &[u8], &[u8])> {
    let header = Cbc1Header::parse(bytes)?;
    let hs = header.header_size();
    let lossless_end = hs as u64 + header.lossless_len;
    let total = lossless_end + header.lossy_len;
    if bytes.len() as u64 != total {
        return Err(Error::corrupt(
            bytes.len().min(total as usize),
            format!("file is {} bytes, header declares {total}", bytes.len()),
        ));
    }
    Ok((
        header,
        &bytes[hs..lossless_end as usize],
        &bytes[lossless_end as usize..],
    ))
}

/// Decompresses a CBC1 stream back to image planes.
pub fn decompress(bytes: &[u8]) -> Result<Vec<ImagePlane>> {
    let (header, lossless, lossy) = split_sections(bytes)?;
    let planes = decompress_sections(&header, lossless, lossy)?;
    Ok(planes.bounded)
}

/// Both reconstructions of one file: the raw lossy decode and the final
/// bounded output.
pub struct DecodedImage {
    pub header: Cbc1Header,
    pub lossy: Vec<ImagePlane>,
    pub bounded: Vec<ImagePlane>,
}

/// Decompresses while keeping the intermediate lossy reconstruction.
pub fn decompress_full(bytes: &[u8]) -> Result<DecodedImage> {
    let (header, lossless, lossy) = split_sections(bytes)?;
    let decoded = decompress_sections(&header, lossless, lossy)?;
    Ok(DecodedImage {
        header,
        lossy: decoded.lossy,
        bounded: decoded.bounded,
    })
}

struct Sections {
    lossy: Vec<ImagePlane>,
    bounded: Vec<ImagePlane>,
}

fn decompress_sections(
    header: &Cbc1Header,
    lossless: &[u8],
    lossy_bytes: &[u8],
) -> Result<Sections> {
    let lossy = lossy_decode(
        lossy_bytes,
        &header.codec,
        header.width,
        header.height,
        header.channel_count,
        header.source_depth,
    )?;
    let mut offset = 0usize;
    let mut decode_reduced = |n: u8| -> Result<ImagePlane> {
        let (plane, used) = lp1_decode_prefix(
            &lossless[offset..],
            header.width,
            header.height,
            n,
        )
        .map_err(|e| e.offset_by(offset))?;
        offset += used;
        Ok(plane)
    };
    let bounded = match header.color_mode {
        ColorMode::PerChannel => {
            let mut out = Vec::with_capacity(lossy.len());
            for (c, plane) in lossy.iter().enumerate() {
                let n = header.critical_depths[c];
                if n > 0 {
                    let spec = TruncationSpec::new(header.source_depth, n)?;
                    let reduced = decode_reduced(n)?;
                    out.push(clamp_decode_plane(plane, &reduced, &spec)?);
                } else {
                    out.push(plane.clone());
                }
            }
            out
        }
        ColorMode::RctY => {
            let n = header.critical_depths[0];
            if n > 0 {
                let spec = TruncationSpec::new(header.source_depth, n)?;
                let reduced = decode_reduced(n)?;
                bounded_decode_planes(&lossy, &reduced, &spec)?
            } else {
                lossy.clone()
            }
        }
    };
    if offset != lossless.len() {
        return Err(Error::corrupt(
            offset,
            format!(
                "{} trailing bytes after lossless section",
                lossless.len() - offset
            ),
        ));
    }
    Ok(Sections { lossy, bounded })
}

/// Header fields and derived sizes as reported by `inspect`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainerReport {
    pub header: Cbc1Header,
}

impl ContainerReport {
    /// Uncompressed size of the image the file describes.
    pub fn raw_size(&self) -> u64 {
        let per_sample = if self.header.source_depth <= 8 { 1 } else { 2 };
        self.header.width as u64
            * self.header.height as u64
            * self.header.channel_count as u64
            * per_sample
    }

    /// Total file size implied by the header.
    pub fn file_size(&self) -> u64 {
        self.header.header_size() as u64 + self.header.lossless_len + self.header.lossy_len
    }
}

fn ratio(raw: u64, part: u64) -> String {
    if part == 0 {
        "inf".to_string()
    } else {
        format!("{:.2}", raw as f64 / part as f64)
    }
}

/// Prints the codec in the same grammar the command line accepts.
pub fn codec_label(codec: &LossyCodecConfig) -> String {
    match codec {
        LossyCodecConfig::Const => "const".to_string(),
        LossyCodecConfig::Downsample { factor } => format!("down:f={factor}"),
        LossyCodecConfig::Haar { levels, q } => format!("haar:q={q},levels={levels}"),
    }
}

impl fmt::Display for ContainerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = &self.header;
        writeln!(f, "width={}", h.width)?;
        writeln!(f, "height={}", h.height)?;
        writeln!(f, "channels={}", h.channel_count)?;
        writeln!(f, "d={}", h.source_depth)?;
        match h.color_mode {
            ColorMode::PerChannel => {
                writeln!(f, "color_mode=none")?;
                if h.channel_count == 1 {
                    writeln!(f, "n={}", h.critical_depths[0])?;
                } else {
                    for (label, &n) in ["R", "G", "B"].iter().zip(&h.critical_depths) {
                        writeln!(f, "n[{label}]={n}")?;
                    }
                }
            }
            ColorMode::RctY => {
                writeln!(f, "color_mode=rct")?;
                writeln!(f, "n[Y]={}", h.critical_depths[0])?;
            }
        }
        writeln!(f, "codec={}", codec_label(&h.codec))?;
        writeln!(f, "header_size={}", h.header_size())?;
        writeln!(f, "lossless_size={}", h.lossless_len)?;
        writeln!(f, "lossy_size={}", h.lossy_len)?;
        writeln!(f, "file_size={}", self.file_size())?;
        writeln!(f, "raw_size={}", self.raw_size())?;
        writeln!(f, "ratio_total={}", ratio(self.raw_size(), self.file_size()))?;
        writeln!(
            f,
            "ratio_lossless={}",
            ratio(self.raw_size(), h.lossless_len)
        )?;
        writeln!(f, "ratio_lossy={}", ratio(self.raw_size(), h.lossy_len))
    }
}

/// Reads only the header of a CBC1 stream and reports its contents.
pub fn inspect(bytes: &[u8]) -> Result<ContainerReport> {
    Ok(ContainerReport {
        header: Cbc1Header::parse(bytes)?,
    })
}

//! Binary PNM (P5 grayscale, P6 RGB) reading and writing.
//!
//! Only maxval 255 and 65535 are accepted, mapping to depths 8 and 16;
//! 16-bit samples are big-endian on the wire. Write emits the canonical
//! header: single spaces between tokens and a newline after maxval.

use crate::error::{Error, Result};
use crate::plane::{validate_image, ImagePlane};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    /// Skips whitespace and `#` comments, which run to end of line.
    fn skip_separators(&mut self) {
        while let Some(b) = self.peek() {
            match b {
                b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c => self.pos += 1,
                b'#' => {
                    while let Some(b) = self.peek() {
                        self.pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
    }

    fn read_number(&mut self, what: &str) -> Result<(u64, usize)> {
        self.skip_separators();
        let start = self.pos;
        let mut value = 0u64;
        let mut any = false;
        while let Some(b) = self.peek() {
            if !b.is_ascii_digit() {
                break;
            }
            any = true;
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as u64))
                .ok_or_else(|| Error::pnm(start, format!("{what} overflows")))?;
            self.pos += 1;
        }
        if !any {
            return Err(Error::pnm(self.pos, format!("expected {what}")));
        }
        Ok((value, start))
    }
}

/// Parses a binary PNM file into one (P5) or three (P6) planes.
pub fn read_pnm(bytes: &[u8]) -> Result<Vec<ImagePlane>> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1usize,
        Some(b"P6") => 3usize,
        _ => return Err(Error::pnm(0, "not a binary PNM (P5/P6) file")),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    let (width, at) = cur.read_number("width")?;
    let width =
        u32::try_from(width).map_err(|_| Error::pnm(at, "width overflows"))?;
    if width == 0 {
        return Err(Error::pnm(at, "width must be positive"));
    }
    let (height, at) = cur.read_number("height")?;
    let height =
        u32::try_from(height).map_err(|_| Error::pnm(at, "height overflows"))?;
    if height == 0 {
        return Err(Error::pnm(at, "height must be positive"));
    }
    let (maxval, at) = cur.read_number("maxval")?;
    let depth = match maxval {
        255 => 8,
        65535 => 16,
        _ => return Err(Error::pnm(at, format!("maxval {maxval} not 255 or 65535"))),
    };
    // Exactly one separator byte sits between maxval and the raster.
    match cur.peek() {
        Some(b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c) => cur.pos += 1,
        _ => return Err(Error::pnm(cur.pos, "expected whitespace after maxval")),
    }
    let raster = &bytes[cur.pos..];
    let count = width as usize * height as usize * channels;
    let per_sample = if depth == 8 { 1 } else { 2 };
    if raster.len() < count * per_sample {
        return Err(Error::pnm(
            bytes.len(),
            format!(
                "raster holds {} of {} expected bytes",
                raster.len(),
                count * per_sample
            ),
        ));
    }
    if raster.len() > count * per_sample {
        return Err(Error::pnm(
            cur.pos + count * per_sample,
            "trailing bytes after raster",
        ));
    }
    // Samples interleave per pixel; split them into planes.
    let plane_len = width as usize * height as usize;
    let mut planes = vec![Vec::with_capacity(plane_len); channels];
    for (i, chunk) in raster.chunks_exact(per_sample).enumerate() {
        let sample = if depth == 8 {
            chunk[0] as u16
        } else {
            u16::from_be_bytes([chunk[0], chunk[1]])
        };
        planes[i % channels].push(sample);
    }
    planes
        .into_iter()
        .map(|samples| ImagePlane::new(width, height, depth, samples))
        .collect()
}

/// Writes planes as canonical binary PNM. Depth must be 8 or 16.
pub fn write_pnm(planes: &[ImagePlane]) -> Result<Vec<u8>> {
    validate_image(planes)?;
    let first = &planes[0];
    let (magic, maxval) = match (planes.len(), first.depth()) {
        (1, 8) => ("P5", 255u32),
        (1, 16) => ("P5", 65535),
        (3, 8) => ("P6", 255),
        (3, 16) => ("P6", 65535),
        (_, d) => {
            return Err(Error::domain(format!(
                "PNM stores depth 8 or 16, image has depth {d}"
            )))
        }
    };
    let header = format!(
        "{magic} {} {} {maxval}\n",
        first.width(),
        first.height()
    );
    let count = first.len();
    let per_sample = if first.depth() == 8 { 1 } else { 2 };
    let mut out = Vec::with_capacity(header.len() + count * planes.len() * per_sample);
    out.extend_from_slice(header.as_bytes());
    for i in 0..count {
        for plane in planes {
            let sample = plane.samples()[i];
            if first.depth() == 8 {
                out.push(sample as u8);
            } else {
                out.extend_from_slice(&sample.to_be_bytes());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn minimal_grayscale_file() {
        let planes = read_pnm(b"P5 1 1 255\n\x00").unwrap();
        assert_eq!(planes.len(), 1);
        assert_eq!(planes[0].samples(), &[0]);
        assert_eq!(planes[0].depth(), 8);
    }

    #[test]
    fn rgb_pixels_deinterleave_into_planes() {
        let planes = read_pnm(b"P6 2 1 255\n\xff\x00\x00\x00\xff\x00").unwrap();
        assert_eq!(planes[0].samples(), &[255, 0]);
        assert_eq!(planes[1].samples(), &[0, 255]);
        assert_eq!(planes[2].samples(), &[0, 0]);
    }

    #[test]
    fn sixteen_bit_samples_are_big_endian() {
        let planes = read_pnm(b"P5 1 1 65535\n\x12\x34").unwrap();
        assert_eq!(planes[0].samples(), &[0x1234]);
        assert_eq!(planes[0].depth(), 16);
        let bytes = write_pnm(&planes).unwrap();
        assert_eq!(bytes, b"P5 1 1 65535\n\x12\x34");
    }

    #[test]
    fn comments_and_mixed_whitespace_parse() {
        let planes = read_pnm(b"P5 # a comment\n\t2 # another\n 1\r255\n\x05\x06").unwrap();
        assert_eq!(planes[0].samples(), &[5, 6]);
    }

    #[test]
    fn canonical_write_round_trips() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        for (channels, depth) in [(1usize, 8u8), (3, 8), (1, 16), (3, 16)] {
            let max = crate::plane::max_sample(depth);
            let planes: Vec<ImagePlane> = (0..channels)
                .map(|_| {
                    let samples = (0..35).map(|_| rng.gen_range(0..=max)).collect();
                    ImagePlane::new(7, 5, depth, samples).unwrap()
                })
                .collect();
            let bytes = write_pnm(&planes).unwrap();
            let back = read_pnm(&bytes).unwrap();
            assert_eq!(back.len(), channels);
            for (a, b) in planes.iter().zip(&back) {
                assert_eq!(a.samples(), b.samples());
            }
            // A second write of the re-read image is byte-identical.
            assert_eq!(write_pnm(&back).unwrap(), bytes);
        }
    }

    #[test]
    fn bad_magic_errors_at_offset_zero() {
        assert!(matches!(
            read_pnm(b"P4 1 1 255\n\x00"),
            Err(Error::PnmParse { offset: 0, .. })
        ));
    }

    #[test]
    fn unsupported_maxval_is_rejected() {
        let err = read_pnm(b"P5 1 1 256\n\x00\x00").unwrap_err();
        assert!(matches!(err, Error::PnmParse { offset: 7, .. }), "{err}");
    }

    #[test]
    fn short_raster_errors_at_end_of_input() {
        let err = read_pnm(b"P6 2 2 255\n\x01\x02").unwrap_err();
        assert!(matches!(err, Error::PnmParse { offset: 13, .. }), "{err}");
    }

    #[test]
    fn trailing_bytes_are_rejected() {
        assert!(read_pnm(b"P5 1 1 255\n\x00\x00").is_err());
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert!(read_pnm(b"P5 0 1 255\n").is_err());
    }

    #[test]
    fn unwritable_depth_is_a_domain_error() {
        let plane = ImagePlane::filled(2, 2, 12, 100).unwrap();
        assert!(matches!(
            write_pnm(std::slice::from_ref(&plane)),
            Err(Error::Domain(_))
        ));
    }
}

//! HAAR codec: multi-level integer lifting transform with dead-zone
//! quantization and per-band Rice coding.
//!
//! The 1-D step is the S-transform, exactly invertible over the integers.
//! Each level transforms rows then columns of the current approximation;
//! odd extents are edge-replicated to even before the step and cropped on
//! inversion, so band dimensions follow from the image dimensions alone.
//! Detail bands serialize level by level as HL, LH, HH with the final
//! approximation band last; that band is never quantized.

use crate::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};
use crate::plane::{max_sample, ImagePlane};
use crate::rice;

/// Deepest decomposition the codec accepts.
pub const MAX_LEVELS: u32 = 6;

pub(crate) fn check_params(levels: u32, q: u32) -> Result<()> {
    if !(1..=MAX_LEVELS).contains(&levels) {
        return Err(Error::config(format!(
            "haar levels {levels} outside 1..={MAX_LEVELS}"
        )));
    }
    if q == 0 {
        return Err(Error::config("haar quantizer step must be at least 1"));
    }
    Ok(())
}

/// One lifting step. An odd-length input is extended by repeating its last
/// element, so both outputs have length `ceil(len / 2)`.
pub fn haar_forward_1d(seq: &[i32]) -> (Vec<i32>, Vec<i32>) {
    let half = seq.len().div_ceil(2);
    let mut approx = Vec::with_capacity(half);
    let mut detail = Vec::with_capacity(half);
    for i in 0..half {
        let a = seq[2 * i];
        let b = *seq.get(2 * i + 1).unwrap_or(&a);
        approx.push((a + b).div_euclid(2));
        detail.push(a - b);
    }
    (approx, detail)
}

/// Inverts [`haar_forward_1d`] back to `len` elements.
pub fn haar_inverse_1d(approx: &[i32], detail: &[i32], len: usize) -> Vec<i32> {
    debug_assert_eq!(approx.len(), detail.len());
    debug_assert_eq!(approx.len(), len.div_ceil(2));
    let mut out = Vec::with_capacity(len);
    for (&s, &d) in approx.iter().zip(detail) {
        let first = s + (d + 1).div_euclid(2);
        out.push(first);
        if out.len() < len {
            out.push(first - d);
        }
    }
    out
}

/// Dead-zone quantizer.
pub fn quantize_coeff(v: i32, q: u32) -> i32 {
    v.signum() * (v.unsigned_abs() / q) as i32
}

/// Reconstruction at the level's lower magnitude edge.
pub fn dequantize_coeff(level: i32, q: u32) -> i32 {
    level * q as i32
}

/// Signed-to-unsigned interleave applied before Rice coding.
pub fn zigzag(v: i32) -> u32 {
    if v >= 0 {
        2 * v as u32
    } else {
        2 * (-(v as i64)) as u32 - 1
    }
}

/// Inverts [`zigzag`].
pub fn unzigzag(u: u32) -> i32 {
    if u % 2 == 0 {
        (u / 2) as i32
    } else {
        -(((u as i64 + 1) / 2) as i32)
    }
}

/// Band extents per level: index 0 is the image, index l the level-l bands.
fn level_dims(width: u32, height: u32, levels: u32) -> Vec<(usize, usize)> {
    let mut dims = vec![(width as usize, height as usize)];
    for _ in 0..levels {
        let (w, h) = *dims.last().unwrap();
        dims.push((w.div_ceil(2), h.div_ceil(2)));
    }
    dims
}

/// Row-major coefficient matrix.
struct Mat {
    w: usize,
    h: usize,
    data: Vec<i32>,
}

impl Mat {
    fn column(&self, x: usize) -> Vec<i32> {
        (0..self.h).map(|y| self.data[y * self.w + x]).collect()
    }
}

/// Splits one approximation into its four subbands, rows then columns.
fn forward_2d(input: &Mat) -> (Mat, Mat, Mat, Mat) {
    let bw = input.w.div_ceil(2);
    let bh = input.h.div_ceil(2);
    let mut low = Mat { w: bw, h: input.h, data: Vec::with_capacity(bw * input.h) };
    let mut high = Mat { w: bw, h: input.h, data: Vec::with_capacity(bw * input.h) };
    for row in input.data.chunks(input.w) {
        let (a, d) = haar_forward_1d(row);
        low.data.extend(a);
        high.data.extend(d);
    }
    let mut ll = Mat { w: bw, h: bh, data: vec![0; bw * bh] };
    let mut lh = Mat { w: bw, h: bh, data: vec![0; bw * bh] };
    let mut hl = Mat { w: bw, h: bh, data: vec![0; bw * bh] };
    let mut hh = Mat { w: bw, h: bh, data: vec![0; bw * bh] };
    for x in 0..bw {
        let (a, d) = haar_forward_1d(&low.column(x));
        for y in 0..bh {
            ll.data[y * bw + x] = a[y];
            lh.data[y * bw + x] = d[y];
        }
        let (a, d) = haar_forward_1d(&high.column(x));
        for y in 0..bh {
            hl.data[y * bw + x] = a[y];
            hh.data[y * bw + x] = d[y];
        }
    }
    (ll, hl, lh, hh)
}

/// Rebuilds a `w`-by-`h` approximation from its four subbands, columns
/// then rows.
fn inverse_2d(ll: &Mat, hl: &Mat, lh: &Mat, hh: &Mat, w: usize, h: usize) -> Mat {
    let bw = ll.w;
    let mut low = Mat { w: bw, h, data: vec![0; bw * h] };
    let mut high = Mat { w: bw, h, data: vec![0; bw * h] };
    for x in 0..bw {
        let col = haar_inverse_1d(&ll.column(x), &lh.column(x), h);
        for (y, &v) in col.iter().enumerate() {
            low.data[y * bw + x] = v;
        }
        let col = haar_inverse_1d(&hl.column(x), &hh.column(x), h);
        for (y, &v) in col.iter().enumerate() {
            high.data[y * bw + x] = v;
        }
    }
    let mut out = Mat { w, h, data: Vec::with_capacity(w * h) };
    for y in 0..h {
        let row = haar_inverse_1d(
            &low.data[y * bw..(y + 1) * bw],
            &high.data[y * bw..(y + 1) * bw],
            w,
        );
        out.data.extend(row);
    }
    out
}

fn encode_plane(w: &mut BitWriter, plane: &ImagePlane, levels: u32, q: u32) {
    let mut current = Mat {
        w: plane.width() as usize,
        h: plane.height() as usize,
        data: plane.samples().iter().map(|&s| s as i32).collect(),
    };
    let mut detail_bands = Vec::new();
    for _ in 0..levels {
        let (ll, hl, lh, hh) = forward_2d(&current);
        detail_bands.push([hl, lh, hh]);
        current = ll;
    }
    for bands in &detail_bands {
        for band in bands {
            let symbols: Vec<u32> = band
                .data
                .iter()
                .map(|&v| zigzag(quantize_coeff(v, q)))
                .collect();
            rice::encode_blocks(w, &symbols);
        }
    }
    let symbols: Vec<u32> = current.data.iter().map(|&v| zigzag(v)).collect();
    rice::encode_blocks(w, &symbols);
}

/// Reads one band, rejecting coefficients no valid encode can produce.
/// Detail coefficients never exceed twice the sample maximum, so anything
/// larger marks a corrupt stream before it can overflow the inverse.
fn read_band(r: &mut BitReader, w: usize, h: usize, q: u32, limit: i64) -> Result<Mat> {
    let symbols = rice::decode_blocks(r, w * h)?;
    let mut data = Vec::with_capacity(w * h);
    for u in symbols {
        let level = if u % 2 == 0 {
            (u / 2) as i64
        } else {
            -((u as i64 + 1) / 2)
        };
        let coeff = level * q as i64;
        if coeff.abs() > limit {
            return Err(Error::corrupt(
                r.bit_pos() / 8,
                format!("coefficient {coeff} impossible at this depth"),
            ));
        }
        data.push(coeff as i32);
    }
    Ok(Mat { w, h, data })
}

fn decode_plane(
    r: &mut BitReader,
    width: u32,
    height: u32,
    depth: u8,
    levels: u32,
    q: u32,
) -> Result<ImagePlane> {
    let dims = level_dims(width, height, levels);
    let limit = 2 * max_sample(depth) as i64;
    let mut detail_bands = Vec::new();
    for level in 1..=levels as usize {
        let (bw, bh) = dims[level];
        let mut bands = Vec::with_capacity(3);
        for _ in 0..3 {
            bands.push(read_band(r, bw, bh, q, limit)?);
        }
        detail_bands.push(bands);
    }
    let (lw, lh) = dims[levels as usize];
    let mut current = read_band(r, lw, lh, 1, limit)?;
    for level in (1..=levels as usize).rev() {
        let (w, h) = dims[level - 1];
        let bands = &detail_bands[level - 1];
        current = inverse_2d(&current, &bands[0], &bands[1], &bands[2], w, h);
    }
    let max = max_sample(depth);
    let samples = current
        .data
        .into_iter()
        .map(|v| v.clamp(0, max as i32) as u16)
        .collect();
    ImagePlane::new(width, height, depth, samples)
}

pub(crate) fn encode_planes(planes: &[ImagePlane], levels: u32, q: u32) -> Result<Vec<u8>> {
    check_params(levels, q)?;
    let mut payload = Vec::new();
    for plane in planes {
        let mut w = BitWriter::new();
        encode_plane(&mut w, plane, levels, q);
        payload.extend(w.finish());
    }
    Ok(payload)
}

pub(crate) fn decode_planes(
    payload: &[u8],
    levels: u32,
    q: u32,
    width: u32,
    height: u32,
    channels: u8,
    depth: u8,
) -> Result<Vec<ImagePlane>> {
    check_params(levels, q)?;
    let mut offset = 0;
    let mut planes = Vec::with_capacity(channels as usize);
    for _ in 0..channels {
        let mut r = BitReader::new(&payload[offset..]);
        let plane = decode_plane(&mut r, width, height, depth, levels, q)
            .map_err(|e| e.offset_by(offset))?;
        offset += r.byte_len_consumed();
        planes.push(plane);
    }
    if offset != payload.len() {
        return Err(Error::corrupt(
            offset,
            format!("{} trailing bytes after haar payload", payload.len() - offset),
        ));
    }
    Ok(planes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn lifting_step_fixtures() {
        assert_eq!(haar_forward_1d(&[5, 5]), (vec![5], vec![0]));
        assert_eq!(haar_forward_1d(&[3, 2]), (vec![2], vec![1]));
        assert_eq!(haar_forward_1d(&[0, 255]), (vec![127], vec![-255]));
        assert_eq!(haar_inverse_1d(&[2], &[1], 2), vec![3, 2]);
        assert_eq!(haar_inverse_1d(&[127], &[-255], 2), vec![0, 255]);
    }

    #[test]
    fn lifting_inverts_every_pair_at_depth_8() {
        for a in 0..=255i32 {
            for b in 0..=255i32 {
                let (s, d) = haar_forward_1d(&[a, b]);
                assert_eq!(haar_inverse_1d(&s, &d, 2), vec![a, b]);
            }
        }
    }

    #[test]
    fn odd_length_replicates_last_element() {
        let (s, d) = haar_forward_1d(&[9, 4, 7]);
        assert_eq!(s, vec![6, 7]);
        assert_eq!(d, vec![5, 0]);
        assert_eq!(haar_inverse_1d(&s, &d, 3), vec![9, 4, 7]);
    }

    #[test]
    fn quantizer_fixtures_and_error_bound() {
        assert_eq!(quantize_coeff(0, 17), 0);
        assert_eq!(quantize_coeff(-7, 4), -1);
        assert_eq!(dequantize_coeff(-1, 4), -4);
        assert_eq!(quantize_coeff(3, 4), 0);
        for q in 1..=64u32 {
            for v in -512..=512i32 {
                let vhat = dequantize_coeff(quantize_coeff(v, q), q);
                assert!((v - vhat).abs() < q as i32, "v={v} q={q} vhat={vhat}");
            }
        }
    }

    #[test]
    fn zigzag_is_a_bijection() {
        for v in -70000..=70000i32 {
            assert_eq!(unzigzag(zigzag(v)), v);
        }
        assert_eq!(zigzag(0), 0);
        assert_eq!(zigzag(1), 2);
        assert_eq!(zigzag(-1), 1);
    }

    fn random_plane(seed: u64, w: u32, h: u32, depth: u8) -> ImagePlane {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let max = max_sample(depth);
        let samples = (0..w as usize * h as usize)
            .map(|_| rng.gen_range(0..=max))
            .collect();
        ImagePlane::new(w, h, depth, samples).unwrap()
    }

    #[test]
    fn step_one_is_lossless_everywhere() {
        for (seed, w, h, depth, levels) in [
            (41, 1, 1, 8, 1),
            (42, 2, 2, 8, 1),
            (43, 5, 7, 8, 3),
            (44, 16, 16, 8, 4),
            (45, 31, 9, 16, 6),
            (46, 12, 30, 12, 2),
        ] {
            let plane = random_plane(seed, w, h, depth);
            let payload = encode_planes(std::slice::from_ref(&plane), levels, 1).unwrap();
            let out = decode_planes(&payload, levels, 1, w, h, 1, depth).unwrap();
            assert_eq!(out[0].samples(), plane.samples(), "w={w} h={h} levels={levels}");
        }
    }

    #[test]
    fn coarse_quantization_still_returns_exact_geometry() {
        let plane = random_plane(47, 19, 13, 8);
        let payload = encode_planes(std::slice::from_ref(&plane), 3, 64).unwrap();
        let out = decode_planes(&payload, 3, 64, 19, 13, 1, 8).unwrap();
        assert_eq!(out[0].width(), 19);
        assert_eq!(out[0].height(), 13);
        assert_eq!(out[0].depth(), 8);
    }

    #[test]
    fn quantization_shrinks_payload() {
        let plane = random_plane(48, 32, 32, 8);
        let fine = encode_planes(std::slice::from_ref(&plane), 3, 1).unwrap();
        let coarse = encode_planes(std::slice::from_ref(&plane), 3, 64).unwrap();
        assert!(coarse.len() < fine.len());
    }

    #[test]
    fn invalid_params_are_config_errors() {
        let plane = ImagePlane::filled(4, 4, 8, 1).unwrap();
        let planes = std::slice::from_ref(&plane);
        assert!(matches!(encode_planes(planes, 0, 1), Err(Error::Config(_))));
        assert!(matches!(encode_planes(planes, 7, 1), Err(Error::Config(_))));
        assert!(matches!(encode_planes(planes, 1, 0), Err(Error::Config(_))));
    }

    #[test]
    fn truncated_payload_is_corrupt() {
        let plane = random_plane(49, 16, 16, 8);
        let payload = encode_planes(std::slice::from_ref(&plane), 2, 4).unwrap();
        assert!(matches!(
            decode_planes(&payload[..payload.len() / 2], 2, 4, 16, 16, 1, 8),
            Err(Error::CorruptStream { .. })
        ));
    }
}

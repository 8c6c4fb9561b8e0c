//! Reversible RGB to YCC rotation and luminance-bounded pixel reconstruction.
//!
//! The rotation is the integer reversible color transform: exact over
//! integers in both directions, so truncation bounds established on the
//! luminance plane survive the trip back to RGB.

use crate::bounds::TruncationSpec;
use crate::error::Result;
use crate::plane::{max_sample, validate_image, ImagePlane};

/// One pixel in rotated space. Chroma is signed and wider than a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YccPixel {
    pub y: u16,
    pub cb: i32,
    pub cr: i32,
}

/// Rotates an RGB triple into YCC space.
pub fn rct_forward(r: u16, g: u16, b: u16) -> YccPixel {
    YccPixel {
        y: ((r as u32 + 2 * g as u32 + b as u32) / 4) as u16,
        cb: b as i32 - g as i32,
        cr: r as i32 - g as i32,
    }
}

/// Rotates a YCC pixel back to RGB.
///
/// On a pixel produced by [`rct_forward`] this is an exact inverse. A pixel
/// whose luminance was altered afterwards can leave gamut, so components
/// come back signed.
pub fn rct_inverse(p: YccPixel) -> (i32, i32, i32) {
    let g = p.y as i32 - (p.cb + p.cr).div_euclid(4);
    (p.cr + g, g, p.cb + g)
}

/// Reconstructs one pixel from its lossy color and reduced luminance.
///
/// The lossy pixel's luminance is clamped into the bounds the reduced sample
/// implies; chroma is kept from the lossy code. After the inverse rotation
/// each component is clamped into `[0, 2^d - 1]`.
pub fn bounded_pixel_decode(
    lossy_rgb: (u16, u16, u16),
    reduced_y: u16,
    spec: &TruncationSpec,
) -> Result<(u16, u16, u16)> {
    let (r, g, b) = lossy_rgb;
    let mut ycc = rct_forward(r, g, b);
    ycc.y = spec.clamp_decode(ycc.y, reduced_y)?;
    let (r, g, b) = rct_inverse(ycc);
    let max = max_sample(spec.source_depth()) as i32;
    Ok((
        r.clamp(0, max) as u16,
        g.clamp(0, max) as u16,
        b.clamp(0, max) as u16,
    ))
}

/// Extracts the luminance plane of an RGB image.
pub fn luma_plane(planes: &[ImagePlane]) -> Result<ImagePlane> {
    validate_image(planes)?;
    let [r, g, b] = planes else {
        return Err(crate::error::Error::shape(
            "luminance requires a three-channel image",
        ));
    };
    let samples = r
        .samples()
        .iter()
        .zip(g.samples())
        .zip(b.samples())
        .map(|((&r, &g), &b)| rct_forward(r, g, b).y)
        .collect();
    ImagePlane::new(r.width(), r.height(), r.depth(), samples)
}

/// Applies [`bounded_pixel_decode`] across an RGB image.
pub fn bounded_decode_planes(
    lossy: &[ImagePlane],
    reduced_y: &ImagePlane,
    spec: &TruncationSpec,
) -> Result<Vec<ImagePlane>> {
    validate_image(lossy)?;
    let [lr, lg, lb] = lossy else {
        return Err(crate::error::Error::shape(
            "bounded decode requires a three-channel image",
        ));
    };
    if !lr.same_geometry(reduced_y) {
        return Err(crate::error::Error::shape(format!(
            "reduced plane is {}x{}, image is {}x{}",
            reduced_y.width(),
            reduced_y.height(),
            lr.width(),
            lr.height()
        )));
    }
    let count = lr.len();
    let mut out = vec![Vec::with_capacity(count), Vec::with_capacity(count), Vec::with_capacity(count)];
    for i in 0..count {
        let (r, g, b) = bounded_pixel_decode(
            (lr.samples()[i], lg.samples()[i], lb.samples()[i]),
            reduced_y.samples()[i],
            spec,
        )?;
        out[0].push(r);
        out[1].push(g);
        out[2].push(b);
    }
    out.into_iter()
        .map(|samples| ImagePlane::new(lr.width(), lr.height(), lr.depth(), samples))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn forward_examples() {
        assert_eq!(rct_forward(0, 0, 0), YccPixel { y: 0, cb: 0, cr: 0 });
        assert_eq!(
            rct_forward(255, 255, 255),
            YccPixel { y: 255, cb: 0, cr: 0 }
        );
        assert_eq!(
            rct_forward(255, 0, 0),
            YccPixel { y: 63, cb: 0, cr: 255 }
        );
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(rct_inverse(YccPixel { y: 0, cb: 0, cr: 0 }), (0, 0, 0));
        assert_eq!(
            rct_inverse(YccPixel { y: 63, cb: 0, cr: 255 }),
            (255, 0, 0)
        );
    }

    #[test]
    fn exhaustive_invertibility_at_depth_4() {
        for r in 0..16u16 {
            for g in 0..16u16 {
                for b in 0..16u16 {
                    let p = rct_forward(r, g, b);
                    assert_eq!(rct_inverse(p), (r as i32, g as i32, b as i32));
                }
            }
        }
    }

    #[test]
    fn random_invertibility_at_depths_8_and_16() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1_000_000 {
            let (r, g, b) = (
                rng.gen_range(0..256u16),
                rng.gen_range(0..256u16),
                rng.gen_range(0..256u16),
            );
            assert_eq!(rct_inverse(rct_forward(r, g, b)), (r as i32, g as i32, b as i32));
        }
        for _ in 0..100_000 {
            let (r, g, b) = (rng.gen(), rng.gen(), rng.gen());
            assert_eq!(rct_inverse(rct_forward(r, g, b)), (r as i32, g as i32, b as i32));
        }
    }

    #[test]
    fn bounded_decode_gray_examples() {
        let spec = TruncationSpec::new(8, 4).unwrap();
        assert_eq!(
            bounded_pixel_decode((100, 100, 100), 12, &spec).unwrap(),
            (192, 192, 192)
        );
        assert_eq!(
            bounded_pixel_decode((250, 250, 250), 12, &spec).unwrap(),
            (207, 207, 207)
        );
    }

    #[test]
    fn in_bounds_luminance_passes_pixel_through() {
        let spec = TruncationSpec::new(8, 4).unwrap();
        // (200, 195, 190) has y = 195, inside the bounds of reduced 12.
        let lossy = (200, 195, 190);
        assert_eq!(rct_forward(200, 195, 190).y, 195);
        assert_eq!(bounded_pixel_decode(lossy, 12, &spec).unwrap(), lossy);
    }

    #[test]
    fn preclamp_luminance_equals_clamped_value() {
        let spec = TruncationSpec::new(8, 4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        for _ in 0..200_000 {
            let truth = (
                rng.gen_range(0..256u16),
                rng.gen_range(0..256u16),
                rng.gen_range(0..256u16),
            );
            let lossy = (
                rng.gen_range(0..256u16),
                rng.gen_range(0..256u16),
                rng.gen_range(0..256u16),
            );
            let reduced = spec.truncate(rct_forward(truth.0, truth.1, truth.2).y).unwrap();
            let mut ycc = rct_forward(lossy.0, lossy.1, lossy.2);
            let clamped_y = spec.clamp_decode(ycc.y, reduced).unwrap();
            ycc.y = clamped_y;
            let (r, g, b) = rct_inverse(ycc);
            // Luminance recomputed before the gamut clamp matches exactly.
            assert_eq!((r + 2 * g + b).div_euclid(4), clamped_y as i32);
            // And it obeys the hard bound against the true luminance.
            let true_y = rct_forward(truth.0, truth.1, truth.2).y;
            assert!(
                (clamped_y as i32 - true_y as i32).unsigned_abs()
                    <= spec.max_trunc_error() as u32
            );
            // The public function is the gamut clamp of this triple.
            let max = 255i32;
            assert_eq!(
                bounded_pixel_decode(lossy, reduced, &spec).unwrap(),
                (
                    r.clamp(0, max) as u16,
                    g.clamp(0, max) as u16,
                    b.clamp(0, max) as u16
                )
            );
        }
    }

    #[test]
    fn plane_decode_matches_pixel_decode() {
        let spec = TruncationSpec::new(8, 4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
            let samples = (0..48).map(|_| rng.gen_range(0..256u16)).collect();
            ImagePlane::new(8, 6, 8, samples).unwrap()
        };
        let truth = [mk(&mut rng), mk(&mut rng), mk(&mut rng)];
        let lossy = [mk(&mut rng), mk(&mut rng), mk(&mut rng)];
        let reduced = crate::bounds::truncate_plane(&luma_plane(&truth).unwrap(), &spec).unwrap();
        let out = bounded_decode_planes(&lossy, &reduced, &spec).unwrap();
        for i in 0..48 {
            let expected = bounded_pixel_decode(
                (lossy[0].samples()[i], lossy[1].samples()[i], lossy[2].samples()[i]),
                reduced.samples()[i],
                &spec,
            )
            .unwrap();
            assert_eq!(
                (out[0].samples()[i], out[1].samples()[i], out[2].samples()[i]),
                expected
            );
        }
    }

    #[test]
    fn plane_decode_rejects_mismatched_reduced_plane() {
        let spec = TruncationSpec::new(8, 4).unwrap();
        let plane = ImagePlane::filled(4, 4, 8, 10).unwrap();
        let lossy = [plane.clone(), plane.clone(), plane];
        let reduced = ImagePlane::filled(3, 4, 8, 1).unwrap();
        assert!(bounded_decode_planes(&lossy, &reduced, &spec).is_err());
    }
}

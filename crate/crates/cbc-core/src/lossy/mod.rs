//! Pluggable lossy codecs.
//!
//! Three built-ins cover the behavior space: CONST predicts nothing and
//! leans entirely on the bound reconstruction, DOWNSAMPLE predicts smooth
//! low-frequency content, HAAR is a transform codec. A payload is opaque
//! outside its codec; identical input and config always produce identical
//! bytes.

pub mod downsample;
pub mod haar;

use crate::error::{Error, Result};
use crate::plane::{validate_image, ImagePlane};

/// Codec selector and parameters, validated before use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossyCodecConfig {
    /// No payload; decodes to the mid-gray plane.
    Const,
    /// Box-filtered grid at `1/factor` resolution per axis.
    Downsample { factor: u32 },
    /// Integer wavelet with `levels` decompositions and quantizer step `q`.
    Haar { levels: u32, q: u32 },
}

impl LossyCodecConfig {
    pub fn codec_id(&self) -> u8 {
        match self {
            LossyCodecConfig::Const => 0,
            LossyCodecConfig::Downsample { .. } => 1,
            LossyCodecConfig::Haar { .. } => 2,
        }
    }

    /// Parameters in container order.
    pub fn params(&self) -> Vec<u32> {
        match self {
            LossyCodecConfig::Const => vec![],
            LossyCodecConfig::Downsample { factor } => vec![*factor],
            LossyCodecConfig::Haar { levels, q } => vec![*levels, *q],
        }
    }

    /// Rebuilds a config from its container representation.
    pub fn from_id_params(codec_id: u8, params: &[u32]) -> Result<Self> {
        let config = match (codec_id, params) {
            (0, []) => LossyCodecConfig::Const,
            (1, &[factor]) => LossyCodecConfig::Downsample { factor },
            (2, &[levels, q]) => LossyCodecConfig::Haar { levels, q },
            (0..=2, _) => {
                return Err(Error::config(format!(
                    "codec {codec_id} does not take {} parameters",
                    params.len()
                )))
            }
            _ => return Err(Error::config(format!("unknown codec id {codec_id}"))),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LossyCodecConfig::Const => Ok(()),
            LossyCodecConfig::Downsample { factor } => downsample::check_factor(*factor),
            LossyCodecConfig::Haar { levels, q } => haar::check_params(*levels, *q),
        }
    }
}

/// Encodes an image with the configured codec.
pub fn lossy_encode(image: &[ImagePlane], config: &LossyCodecConfig) -> Result<Vec<u8>> {
    validate_image(image)?;
    config.validate()?;
    match config {
        LossyCodecConfig::Const => Ok(vec![]),
        LossyCodecConfig::Downsample { factor } => downsample::encode_planes(image, *factor),
        LossyCodecConfig::Haar { levels, q } => haar::encode_planes(image, *levels, *q),
    }
}

/// Decodes a payload back to full-depth planes of the stated geometry.
pub fn lossy_decode(
    payload: &[u8],
    config: &LossyCodecConfig,
    width: u32,
    height: u32,
    channels: u8,
    depth: u8,
) -> Result<Vec<ImagePlane>> {
    config.validate()?;
    if channels != 1 && channels != 3 {
        return Err(Error::shape(format!(
            "expected 1 or 3 channels, got {channels}"
        )));
    }
    match config {
        LossyCodecConfig::Const => {
            if !payload.is_empty() {
                return Err(Error::corrupt(0, "const codec payload must be empty"));
            }
            let mid = 1u16 << (depth - 1);
            let plane = ImagePlane::filled(width, height, depth, mid)?;
            Ok(vec![plane; channels as usize])
        }
        LossyCodecConfig::Downsample { factor } => {
            downsample::decode_planes(payload, *factor, width, height, channels, depth)
        }
        LossyCodecConfig::Haar { levels, q } => {
            haar::decode_planes(payload, *levels, *q, width, height, channels, depth)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_image(seed: u64, w: u32, h: u32, depth: u8, channels: usize) -> Vec<ImagePlane> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..channels)
            .map(|_| {
                let max = crate::plane::max_sample(depth);
                let samples = (0..w as usize * h as usize)
                    .map(|_| rng.gen_range(0..=max))
                    .collect();
                ImagePlane::new(w, h, depth, samples).unwrap()
            })
            .collect()
    }

    #[test]
    fn const_payload_is_empty_and_decodes_to_mid_gray() {
        let image = random_image(51, 9, 4, 8, 3);
        let payload = lossy_encode(&image, &LossyCodecConfig::Const).unwrap();
        assert!(payload.is_empty());
        let out = lossy_decode(&payload, &LossyCodecConfig::Const, 9, 4, 3, 8).unwrap();
        assert_eq!(out.len(), 3);
        for plane in &out {
            assert!(plane.samples().iter().all(|&s| s == 128));
        }
    }

    #[test]
    fn const_rejects_nonempty_payload() {
        assert!(matches!(
            lossy_decode(&[1], &LossyCodecConfig::Const, 2, 2, 1, 8),
            Err(Error::CorruptStream { .. })
        ));
    }

    #[test]
    fn params_round_trip_through_container_form() {
        for config in [
            LossyCodecConfig::Const,
            LossyCodecConfig::Downsample { factor: 7 },
            LossyCodecConfig::Haar { levels: 4, q: 100 },
        ] {
            let rebuilt =
                LossyCodecConfig::from_id_params(config.codec_id(), &config.params()).unwrap();
            assert_eq!(rebuilt, config);
        }
        assert!(LossyCodecConfig::from_id_params(3, &[]).is_err());
        assert!(LossyCodecConfig::from_id_params(0, &[1]).is_err());
        assert!(LossyCodecConfig::from_id_params(1, &[]).is_err());
        assert!(LossyCodecConfig::from_id_params(1, &[1]).is_err());
        assert!(LossyCodecConfig::from_id_params(2, &[0, 1]).is_err());
    }

    #[test]
    fn every_codec_preserves_geometry_on_awkward_sizes() {
        let configs = [
            LossyCodecConfig::Const,
            LossyCodecConfig::Downsample { factor: 3 },
            LossyCodecConfig::Downsample { factor: 16 },
            LossyCodecConfig::Haar { levels: 1, q: 1 },
            LossyCodecConfig::Haar { levels: 5, q: 32 },
        ];
        for (seed, w, h, depth, channels) in
            [(52, 5, 7, 8, 1), (53, 1, 1, 8, 3), (54, 13, 2, 16, 1), (55, 8, 8, 4, 3)]
        {
            let image = random_image(seed, w, h, depth, channels);
            for config in &configs {
                let payload = lossy_encode(&image, config).unwrap();
                let out = lossy_decode(&payload, config, w, h, channels as u8, depth).unwrap();
                assert_eq!(out.len(), channels);
                for plane in &out {
                    assert_eq!((plane.width(), plane.height(), plane.depth()), (w, h, depth));
                }
            }
        }
    }

    #[test]
    fn encoding_is_deterministic() {
        let image = random_image(56, 21, 17, 8, 3);
        for config in [
            LossyCodecConfig::Downsample { factor: 4 },
            LossyCodecConfig::Haar { levels: 3, q: 8 },
        ] {
            let a = lossy_encode(&image, &config).unwrap();
            let b = lossy_encode(&image, &config).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn multichannel_payloads_concatenate_per_channel() {
        let image = random_image(57, 10, 10, 8, 3);
        for config in [
            LossyCodecConfig::Downsample { factor: 2 },
            LossyCodecConfig::Haar { levels: 2, q: 1 },
        ] {
            let whole = lossy_encode(&image, &config).unwrap();
            let parts: Vec<u8> = image
                .iter()
                .flat_map(|p| lossy_encode(std::slice::from_ref(p), &config).unwrap())
                .collect();
            assert_eq!(whole, parts);
        }
    }
}

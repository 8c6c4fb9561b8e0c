//! Bounded lossy image compression.
//!
//! A lossless code of each channel at reduced precision travels beside an
//! arbitrary lossy payload. At decode time the reduced samples clamp the
//! lossy reconstruction, so every output sample is guaranteed to lie within
//! a hard distance of the original regardless of what the lossy codec did.

pub mod bitio;
pub mod bounds;
pub mod color;
pub mod container;
pub mod error;
pub mod lp1;
pub mod lossy;
pub mod metrics;
pub mod plane;
pub mod pnm;
pub mod rice;

pub use bounds::{clamp_decode_plane, truncate_plane, BoundPair, TruncationSpec};
pub use container::{
    compress, decompress, decompress_full, inspect, Cbc1Header, ColorMode, CompressConfig,
    ContainerReport, DecodedImage,
};
pub use error::{Error, Result};
pub use lossy::{lossy_decode, lossy_encode, LossyCodecConfig};
pub use metrics::{compute_metrics, verify_bounds, MetricsReport};
pub use plane::{max_sample, validate_image, ImagePlane, MAX_DEPTH};
pub use pnm::{read_pnm, write_pnm};

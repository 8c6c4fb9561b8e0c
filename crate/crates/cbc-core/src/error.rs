//! Error type shared by every stage of the pipeline.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A sample or code value lies outside the range its bit depth allows.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two planes (or a plane and a declared geometry) disagree in
    /// dimensions or depth.
    #[error("shape error: {0}")]
    Shape(String),

    /// A configuration is invalid or inconsistent with the image it is
    /// applied to.
    #[error("config error: {0}")]
    Config(String),

    /// A compressed stream is truncated, violates a format invariant, or
    /// decodes to impossible values. `offset` is the byte position within
    /// the stream being parsed.
    #[error("corrupt stream at byte {offset}: {msg}")]
    CorruptStream { offset: usize, msg: String },

    /// A PNM file could not be parsed. `offset` is the byte position of
    /// the offending input.
    #[error("pnm parse error at byte {offset}: {msg}")]
    PnmParse { offset: usize, msg: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn corrupt(offset: usize, msg: impl Into<String>) -> Self {
        Error::CorruptStream {
            offset,
            msg: msg.into(),
        }
    }

    pub(crate) fn pnm(offset: usize, msg: impl Into<String>) -> Self {
        Error::PnmParse {
            offset,
            msg: msg.into(),
        }
    }

    /// Rebases a stream error's byte offset after slicing into a larger
    /// buffer. Non-stream errors pass through unchanged.
    pub(crate) fn offset_by(self, delta: usize) -> Self {
        match self {
            Error::CorruptStream { offset, msg } => Error::CorruptStream {
                offset: offset + delta,
                msg,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

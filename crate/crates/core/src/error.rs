//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: String, reason: String },

    #[error("shape mismatch: expected {expected_width}x{expected_height}x{expected_channels}, got {width}x{height}x{channels}")]
    ShapeMismatch {
        expected_width: usize,
        expected_height: usize,
        expected_channels: usize,
        width: usize,
        height: usize,
        channels: usize,
    },

    #[error("expected {expected}-channel image, got {got} channels")]
    ChannelMismatch { expected: usize, got: usize },

    #[error("image {width}x{height} is smaller than the required {min}x{min} window")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },

    #[error("point cloud has {got} points, operation requires at least {needed}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("camera id sets do not match: {0}")]
    CameraIdMismatch(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("unsupported element layout: {0}")]
    UnsupportedLayout(String),

    #[error("truncated body: expected {expected} {unit}, found {found}")]
    TruncatedBody {
        expected: usize,
        found: usize,
        unit: &'static str,
    },

    #[error("malformed data at {location}: {reason}")]
    MalformedData { location: String, reason: String },

    #[error("unsupported color type: {0}")]
    UnsupportedColorType(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("png error: {0}")]
    PngDecode(#[from] png::DecodingError),

    #[error("png error: {0}")]
    PngEncode(#[from] png::EncodingError),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name: name.into(),
            reason: reason.into(),
        }
    }
}

//! Planar float image container, color conversions, filters, and
//! full-reference quality metrics.

mod convert;
mod filter;
mod metrics;

pub use convert::{from_ycbcr, to_grayscale, to_ycbcr};
pub use filter::{gaussian_blur, gaussian_kernel, laplacian, sobel_magnitude};
pub use metrics::{psnr, quantile, ssim};

use crate::error::{Error, Result};

/// Boundary handling for convolution-style operations.
///
/// `Reflect` mirrors the signal about the image edge with the edge sample
/// repeated (`x[-1] = x[0]`), which preserves the image mean under any
/// normalized symmetric kernel. `Replicate` clamps to the edge sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Reflect,
    Replicate,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reflect" => Ok(Boundary::Reflect),
            "replicate" => Ok(Boundary::Replicate),
            other => Err(Error::invalid(
                "boundary",
                format!("expected `reflect` or `replicate`, got `{other}`"),
            )),
        }
    }
}

/// Parameters for Gaussian filtering.
#[derive(Debug, Clone, Copy)]
pub struct BlurParams {
    /// Standard deviation in pixels, must be positive.
    pub sigma: f64,
    /// Kernel half-width in pixels; the kernel has `2 * radius + 1` taps.
    pub radius: usize,
    pub boundary: Boundary,
}

impl BlurParams {
    /// Blur with the default radius `ceil(3 * sigma)` and reflect boundary.
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma <= 0.0 || !sigma.is_finite() {
            return Err(Error::invalid("sigma", format!("must be > 0, got {sigma}")));
        }
        Ok(BlurParams {
            sigma,
            radius: (3.0 * sigma).ceil().max(1.0) as usize,
            boundary: Boundary::Reflect,
        })
    }

    pub fn with_radius(mut self, radius: usize) -> Result<Self> {
        if radius == 0 {
            return Err(Error::invalid("radius", "must be >= 1"));
        }
        self.radius = radius;
        Ok(self)
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }
}

impl Default for BlurParams {
    /// Default decomposition blur: sigma 2.0 px, radius 6, reflect.
    fn default() -> Self {
        BlurParams::new(2.0).expect("default sigma is valid")
    }
}

/// H×W×C planar float image. Channel-major layout: plane `c` occupies
/// `data[c * w * h .. (c + 1) * w * h]`, rows within a plane are contiguous.
///
/// Values are typically in `[0, 1]` but residual images may carry any finite
/// value; non-finite values are rejected at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(
                "dimensions",
                format!("width and height must be >= 1, got {width}x{height}"),
            ));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::invalid(
                "channels",
                format!("must be 1 or 3, got {channels}"),
            ));
        }
        if data.len() != width * height * channels {
            return Err(Error::invalid(
                "data",
                format!(
                    "length {} does not match {width}x{height}x{channels}",
                    data.len()
                ),
            ));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid("data", format!("non-finite value {bad}")));
        }
        Ok(ImageBuffer {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: f64) -> Result<Self> {
        ImageBuffer::new(width, height, channels, vec![value; width * height * channels])
    }

    pub fn zeros(width: usize, height: usize, channels: usize) -> Result<Self> {
        ImageBuffer::filled(width, height, channels, 0.0)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// One channel plane, row-major.
    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.pixel_count();
        &self.data[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    /// Overwrite one sample. The caller is responsible for keeping the
    /// buffer finite.
    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: f64) {
        self.data[(c * self.height + y) * self.width + x] = v;
    }

    pub fn same_shape(&self, other: &ImageBuffer) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    pub(crate) fn expect_same_shape(&self, other: &ImageBuffer) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected_width: self.width,
                expected_height: self.height,
                expected_channels: self.channels,
                width: other.width,
                height: other.height,
                channels: other.channels,
            })
        }
    }

    pub(crate) fn expect_channels(&self, channels: usize) -> Result<()> {
        if self.channels == channels {
            Ok(())
        } else {
            Err(Error::ChannelMismatch {
                expected: channels,
                got: self.channels,
            })
        }
    }

    /// Element-wise map into a new buffer of the same shape.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<ImageBuffer> {
        ImageBuffer::new(
            self.width,
            self.height,
            self.channels,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Element-wise combination of two same-shape buffers.
    pub fn zip_map(&self, other: &ImageBuffer, f: impl Fn(f64, f64) -> f64) -> Result<ImageBuffer> {
        self.expect_same_shape(other)?;
        ImageBuffer::new(
            self.width,
            self.height,
            self.channels,
            self.data
                .iter()
                .zip(other.data.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.data.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Build a 3-channel image from three single-channel planes.
    pub fn from_planes(planes: [&ImageBuffer; 3]) -> Result<ImageBuffer> {
        for p in &planes {
            p.expect_channels(1)?;
            planes[0].expect_same_shape(p)?;
        }
        let mut data = Vec::with_capacity(planes[0].pixel_count() * 3);
        for p in &planes {
            data.extend_from_slice(p.plane(0));
        }
        ImageBuffer::new(planes[0].width, planes[0].height, 3, data)
    }

    /// Extract one channel as a single-channel image.
    pub fn channel(&self, c: usize) -> Result<ImageBuffer> {
        if c >= self.channels {
            return Err(Error::invalid(
                "channel",
                format!("index {c} out of range for {}-channel image", self.channels),
            ));
        }
        ImageBuffer::new(self.width, self.height, 1, self.plane(c).to_vec())
    }
}

/// Resolve an out-of-range index against an axis of length `n`.
#[inline]
pub(crate) fn resolve_index(mut i: isize, n: usize, boundary: Boundary) -> usize {
    let n_i = n as isize;
    match boundary {
        Boundary::Replicate => i.clamp(0, n_i - 1) as usize,
        Boundary::Reflect => loop {
            if i < 0 {
                i = -i - 1;
            } else if i >= n_i {
                i = 2 * n_i - i - 1;
            } else {
                return i as usize;
            }
        },
    }
}

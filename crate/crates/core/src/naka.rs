//! Naka–Rushton enhancement, dual-branch input construction, and frequency
//! decomposition.
//!
//! The enhancement applies the saturating response `R(I) = I^n / (I^n + s^n)`
//! per channel and per pixel: dark inputs are lifted steeply while values
//! above the half-saturation intensity `s` compress toward 1.

use crate::error::{Error, Result};
use crate::image::{gaussian_blur, BlurParams, ImageBuffer};

/// Parameters of the Naka–Rushton response curve.
#[derive(Debug, Clone, Copy)]
pub struct NakaParams {
    /// Half-saturation intensity: the input that maps to exactly 0.5.
    pub sigma: f64,
    /// Curve steepness. 1.0 gives the Michaelis–Menten form.
    pub exponent: f64,
}

impl Default for NakaParams {
    fn default() -> Self {
        NakaParams {
            sigma: 0.05,
            exponent: 1.0,
        }
    }
}

impl NakaParams {
    pub fn new(sigma: f64, exponent: f64) -> Result<Self> {
        let p = NakaParams { sigma, exponent };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.sigma.is_finite() || self.sigma <= 0.0 || self.sigma > 1.0 {
            return Err(Error::invalid(
                "naka.sigma",
                format!("must be in (0, 1], got {}", self.sigma),
            ));
        }
        if self.exponent <= 0.0 || !self.exponent.is_finite() {
            return Err(Error::invalid(
                "naka.exponent",
                format!("must be > 0, got {}", self.exponent),
            ));
        }
        Ok(())
    }
}

/// Apply `R(I) = I^n / (I^n + sigma^n)` per channel and per pixel.
///
/// Input values are expected in `[0, 1]`; the output lies in `[0, 1)` and is
/// strictly increasing in the input for fixed parameters.
pub fn naka_transform(img: &ImageBuffer, p: &NakaParams) -> Result<ImageBuffer> {
    p.validate()?;
    let sigma_n = p.sigma.powf(p.exponent);
    img.map(|v| {
        let v_n = v.powf(p.exponent);
        v_n / (v_n + sigma_n)
    })
}

/// Residual discrepancy between the enhanced and the low-light image,
/// computed as `naka - low` (may be negative).
pub fn residual(low: &ImageBuffer, naka: &ImageBuffer) -> Result<ImageBuffer> {
    low.expect_same_shape(naka)?;
    naka.zip_map(low, |n, l| n - l)
}

/// Planar multi-channel tensor used for the stacked network input.
///
/// Unlike [`ImageBuffer`], which is restricted to 1- or 3-channel images,
/// a stack may hold any number of channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStack {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ChannelStack {
    /// Concatenate the channels of the given images, in order.
    pub fn from_images(images: &[&ImageBuffer]) -> Result<Self> {
        let first = images
            .first()
            .ok_or_else(|| Error::invalid("images", "stack requires at least one image"))?;
        let mut data = Vec::new();
        for img in images {
            first.expect_same_shape(img)?;
            data.extend_from_slice(img.data());
        }
        Ok(ChannelStack {
            width: first.width(),
            height: first.height(),
            channels: images.iter().map(|i| i.channels()).sum(),
            data,
        })
    }

    pub fn concat(stacks: &[&ChannelStack]) -> Result<Self> {
        let first = stacks
            .first()
            .ok_or_else(|| Error::invalid("stacks", "concat requires at least one stack"))?;
        let mut data = Vec::new();
        let mut channels = 0;
        for s in stacks {
            if s.width != first.width || s.height != first.height {
                return Err(Error::invalid("stacks", "stacks must share spatial dims"));
            }
            data.extend_from_slice(&s.data);
            channels += s.channels;
        }
        Ok(ChannelStack {
            width: first.width,
            height: first.height,
            channels,
            data,
        })
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

    /// One channel plane, row-major.
    pub fn channel(&self, c: usize) -> &[f64] {
        let n = self.width * self.height;
        &self.data[c * n..(c + 1) * n]
    }
}

/// The dual-branch stacked input: a raw branch `[low, naka, delta]`, its
/// per-channel standardized counterpart, and their 18-channel concatenation.
#[derive(Debug, Clone)]
pub struct DualBranchInput {
    pub raw: ChannelStack,
    pub normalized: ChannelStack,
    pub combined: ChannelStack,
}

/// Guard added to the standard deviation so constant channels normalize to
/// all-zero instead of dividing by zero.
pub const STANDARDIZE_EPS: f64 = 1e-6;

/// Build the 18-channel dual-branch input from the low-light image and its
/// Naka-enhanced counterpart.
///
/// Each of the nine raw channels is standardized independently over the
/// spatial dims (population statistics): `(x - mean) / (std + eps)`.
pub fn build_dual_branch(low: &ImageBuffer, naka: &ImageBuffer) -> Result<DualBranchInput> {
    low.expect_channels(3)?;
    naka.expect_channels(3)?;
    low.expect_same_shape(naka)?;
    let delta = residual(low, naka)?;

    let raw = ChannelStack::from_images(&[low, naka, &delta])?;
    let normalized_images: Vec<ImageBuffer> = [low, naka, &delta]
        .iter()
        .map(|img| standardize(img))
        .collect::<Result<_>>()?;
    let normalized =
        ChannelStack::from_images(&normalized_images.iter().collect::<Vec<_>>())?;
    let combined = ChannelStack::concat(&[&raw, &normalized])?;
    Ok(DualBranchInput {
        raw,
        normalized,
        combined,
    })
}

fn standardize(img: &ImageBuffer) -> Result<ImageBuffer> {
    let n = img.pixel_count();
    let mut data = Vec::with_capacity(img.data().len());
    for c in 0..img.channels() {
        let plane = img.plane(c);
        let mean = plane.iter().sum::<f64>() / n as f64;
        let var = plane.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        data.extend(plane.iter().map(|v| (v - mean) / (std + STANDARDIZE_EPS)));
    }
    ImageBuffer::new(img.width(), img.height(), img.channels(), data)
}

/// Low/high frequency split of an image. The two parts reconstruct the
/// source exactly: `low_freq + high_freq == source`.
#[derive(Debug, Clone)]
pub struct FrequencyPair {
    pub low_freq: ImageBuffer,
    /// Signed residual, unbounded.
    pub high_freq: ImageBuffer,
}

/// Split into `low_freq = blur(img)` and `high_freq = img - low_freq`.
pub fn frequency_decompose(naka: &ImageBuffer, p: &BlurParams) -> Result<FrequencyPair> {
    let low_freq = gaussian_blur(naka, p)?;
    let high_freq = naka.zip_map(&low_freq, |v, lf| v - lf)?;
    Ok(FrequencyPair {
        low_freq,
        high_freq,
    })
}

//! Color-space conversions.

use super::ImageBuffer;
use crate::error::Result;

/// BT.601 luma coefficients (also the grayscale projection weights).
const KR: f64 = 0.299;
const KG: f64 = 0.587;
const KB: f64 = 0.114;

/// Weighted grayscale projection `0.299 R + 0.587 G + 0.114 B`.
pub fn to_grayscale(img: &ImageBuffer) -> Result<ImageBuffer> {
    img.expect_channels(3)?;
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    let data = r
        .iter()
        .zip(g)
        .zip(b)
        .map(|((&r, &g), &b)| KR * r + KG * g + KB * b)
        .collect();
    ImageBuffer::new(img.width(), img.height(), 1, data)
}

/// Full-range BT.601 RGB → YCbCr with chroma centered at 0.5.
///
/// The Y channel equals [`to_grayscale`] exactly; Cb and Cr are the scaled
/// blue- and red-difference channels.
pub fn to_ycbcr(img: &ImageBuffer) -> Result<ImageBuffer> {
    img.expect_channels(3)?;
    let n = img.pixel_count();
    let mut data = vec![0.0; 3 * n];
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    for i in 0..n {
        let y = KR * r[i] + KG * g[i] + KB * b[i];
        data[i] = y;
        data[n + i] = 0.5 + 0.5 * (b[i] - y) / (1.0 - KB);
        data[2 * n + i] = 0.5 + 0.5 * (r[i] - y) / (1.0 - KR);
    }
    ImageBuffer::new(img.width(), img.height(), 3, data)
}

/// Inverse of [`to_ycbcr`].
pub fn from_ycbcr(img: &ImageBuffer) -> Result<ImageBuffer> {
    img.expect_channels(3)?;
    let n = img.pixel_count();
    let mut data = vec![0.0; 3 * n];
    let (y, cb, cr) = (img.plane(0), img.plane(1), img.plane(2));
    for i in 0..n {
        let r = y[i] + 2.0 * (1.0 - KR) * (cr[i] - 0.5);
        let b = y[i] + 2.0 * (1.0 - KB) * (cb[i] - 0.5);
        let g = (y[i] - KR * r - KB * b) / KG;
        data[i] = r;
        data[n + i] = g;
        data[2 * n + i] = b;
    }
    ImageBuffer::new(img.width(), img.height(), 3, data)
}

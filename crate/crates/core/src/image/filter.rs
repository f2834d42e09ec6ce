//! Separable Gaussian blur and small derivative stencils.

use super::{resolve_index, BlurParams, Boundary, ImageBuffer};
use crate::error::{Error, Result};

/// Normalized 1-D Gaussian taps for `i in -radius..=radius`.
pub fn gaussian_kernel(sigma: f64, radius: usize) -> Vec<f64> {
    let denom = 2.0 * sigma * sigma;
    let r = radius as isize;
    let mut taps: Vec<f64> = (-r..=r)
        .map(|i| (-((i * i) as f64) / denom).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

/// Separable Gaussian convolution with a kernel normalized to sum 1.
pub fn gaussian_blur(img: &ImageBuffer, p: &BlurParams) -> Result<ImageBuffer> {
    if p.sigma <= 0.0 || !p.sigma.is_finite() {
        return Err(Error::invalid("sigma", format!("must be > 0, got {}", p.sigma)));
    }
    if p.radius == 0 {
        return Err(Error::invalid("radius", "must be >= 1"));
    }
    let taps = gaussian_kernel(p.sigma, p.radius);
    let r = p.radius as isize;
    let (w, h) = (img.width(), img.height());
    let n = img.pixel_count();

    let mut out = vec![0.0; img.data().len()];
    let mut tmp = vec![0.0; n];
    for c in 0..img.channels() {
        let plane = img.plane(c);
        // horizontal pass
        for y in 0..h {
            let row = &plane[y * w..(y + 1) * w];
            for x in 0..w {
                let mut acc = 0.0;
                for (k, tap) in taps.iter().enumerate() {
                    let sx = resolve_index(x as isize + k as isize - r, w, p.boundary);
                    acc += tap * row[sx];
                }
                tmp[y * w + x] = acc;
            }
        }
        // vertical pass
        let dst = &mut out[c * n..(c + 1) * n];
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                for (k, tap) in taps.iter().enumerate() {
                    let sy = resolve_index(y as isize + k as isize - r, h, p.boundary);
                    acc += tap * tmp[sy * w + x];
                }
                dst[y * w + x] = acc;
            }
        }
    }
    ImageBuffer::new(w, h, img.channels(), out)
}

/// 4-neighbor discrete Laplacian with replicate boundary.
pub fn laplacian(img: &ImageBuffer) -> Result<ImageBuffer> {
    img.expect_channels(1)?;
    let (w, h) = (img.width(), img.height());
    let plane = img.plane(0);
    let at = |x: isize, y: isize| -> f64 {
        let sx = resolve_index(x, w, Boundary::Replicate);
        let sy = resolve_index(y, h, Boundary::Replicate);
        plane[sy * w + sx]
    };
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let (xi, yi) = (x as isize, y as isize);
            out[y * w + x] = at(xi - 1, yi) + at(xi + 1, yi) + at(xi, yi - 1) + at(xi, yi + 1)
                - 4.0 * at(xi, yi);
        }
    }
    ImageBuffer::new(w, h, 1, out)
}

/// Gradient magnitude `sqrt(Gx^2 + Gy^2)` with 3x3 Sobel kernels and
/// replicate boundary.
pub fn sobel_magnitude(img: &ImageBuffer) -> Result<ImageBuffer> {
    img.expect_channels(1)?;
    let (w, h) = (img.width(), img.height());
    let plane = img.plane(0);
    let at = |x: isize, y: isize| -> f64 {
        let sx = resolve_index(x, w, Boundary::Replicate);
        let sy = resolve_index(y, h, Boundary::Replicate);
        plane[sy * w + sx]
    };
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let (xi, yi) = (x as isize, y as isize);
            let gx = at(xi + 1, yi - 1) - at(xi - 1, yi - 1)
                + 2.0 * (at(xi + 1, yi) - at(xi - 1, yi))
                + at(xi + 1, yi + 1) - at(xi - 1, yi + 1);
            let gy = at(xi - 1, yi + 1) - at(xi - 1, yi - 1)
                + 2.0 * (at(xi, yi + 1) - at(xi, yi - 1))
                + at(xi + 1, yi + 1) - at(xi + 1, yi - 1);
            out[y * w + x] = (gx * gx + gy * gy).sqrt();
        }
    }
    ImageBuffer::new(w, h, 1, out)
}

//! Quantile and full-reference quality metrics (PSNR, SSIM).

use super::{gaussian_kernel, to_grayscale, ImageBuffer};
use crate::error::{Error, Result};

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_C1: f64 = 0.01 * 0.01;
const SSIM_C2: f64 = 0.03 * 0.03;

/// Linear-interpolation quantile over all pixel values of a 1-channel image.
pub fn quantile(img: &ImageBuffer, q: f64) -> Result<f64> {
    img.expect_channels(1)?;
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid("q", format!("must be in [0, 1], got {q}")));
    }
    let mut values = img.plane(0).to_vec();
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = values.len();
    if n == 1 {
        return Ok(values[0]);
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = lo.min(n - 2) + 1;
    let frac = pos - lo as f64;
    Ok(values[lo] * (1.0 - frac) + values[hi] * frac)
}

/// Peak signal-to-noise ratio in dB for unit-range images. Identical inputs
/// return `f64::INFINITY`.
pub fn psnr(pred: &ImageBuffer, gt: &ImageBuffer) -> Result<f64> {
    pred.expect_same_shape(gt)?;
    let mse = pred
        .data()
        .iter()
        .zip(gt.data())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<f64>()
        / pred.data().len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-10.0 * mse.log10())
}

/// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), C1 = 0.01^2,
/// C2 = 0.03^2, computed over the valid (fully covered) window positions.
/// 3-channel inputs are converted to grayscale first.
pub fn ssim(pred: &ImageBuffer, gt: &ImageBuffer) -> Result<f64> {
    pred.expect_same_shape(gt)?;
    if pred.width() < SSIM_WINDOW || pred.height() < SSIM_WINDOW {
        return Err(Error::ImageTooSmall {
            width: pred.width(),
            height: pred.height(),
            min: SSIM_WINDOW,
        });
    }
    let (a, b) = if pred.channels() == 3 {
        (to_grayscale(pred)?, to_grayscale(gt)?)
    } else {
        (pred.clone(), gt.clone())
    };

    let window = gaussian_kernel(SSIM_SIGMA, SSIM_WINDOW / 2);
    let x = a.plane(0);
    let y = b.plane(0);
    let n = a.pixel_count();
    let mut xx = vec![0.0; n];
    let mut yy = vec![0.0; n];
    let mut xy = vec![0.0; n];
    for i in 0..n {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }

    let w = a.width();
    let h = a.height();
    let mx = weighted_valid(x, w, h, &window);
    let my = weighted_valid(y, w, h, &window);
    let mxx = weighted_valid(&xx, w, h, &window);
    let myy = weighted_valid(&yy, w, h, &window);
    let mxy = weighted_valid(&xy, w, h, &window);

    let mut sum = 0.0;
    for i in 0..mx.len() {
        let var_x = mxx[i] - mx[i] * mx[i];
        let var_y = myy[i] - my[i] * my[i];
        let cov = mxy[i] - mx[i] * my[i];
        let num = (2.0 * mx[i] * my[i] + SSIM_C1) * (2.0 * cov + SSIM_C2);
        let den = (mx[i] * mx[i] + my[i] * my[i] + SSIM_C1) * (var_x + var_y + SSIM_C2);
        sum += num / den;
    }
    Ok(sum / mx.len() as f64)
}

/// Separable weighted means over all fully covered window positions
/// (output size `(w - 2r) x (h - 2r)`).
fn weighted_valid(plane: &[f64], w: usize, h: usize, taps: &[f64]) -> Vec<f64> {
    let k = taps.len();
    let ow = w - k + 1;
    let oh = h - k + 1;
    let mut tmp = vec![0.0; ow * h];
    for y in 0..h {
        for x in 0..ow {
            let mut acc = 0.0;
            for (j, t) in taps.iter().enumerate() {
                acc += t * plane[y * w + x + j];
            }
            tmp[y * ow + x] = acc;
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            let mut acc = 0.0;
            for (j, t) in taps.iter().enumerate() {
                acc += t * tmp[(y + j) * ow + x];
            }
            out[y * ow + x] = acc;
        }
    }
    out
}

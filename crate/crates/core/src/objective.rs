//! The compound supervision objective: base photometric terms, correction-map
//! regularization, and the two mask-guided terms targeting edge-dominant and
//! bright regions.

use serde::Serialize;

use crate::chroma::CorrectionMaps;
use crate::error::{Error, Result};
use crate::image::{laplacian, quantile, sobel_magnitude, ssim, to_grayscale, to_ycbcr, ImageBuffer};

/// Guard in the gray-edge mask normalization.
pub const GRAY_MASK_EPS: f64 = 1e-8;

/// Term weights for the compound objective.
///
/// `gray` and `bright` carry the compound-level coefficients (1.0 and 0.8);
/// the remaining weights scale the base-loss terms. The perceptual `feat`
/// term is out of scope and permanently evaluates to zero, so its weight
/// only exists to keep the report shape complete.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LossWeights {
    pub rgb: f64,
    pub chroma: f64,
    pub ssim: f64,
    pub edge: f64,
    pub feat: f64,
    pub reg: f64,
    pub mse: f64,
    pub gray: f64,
    pub bright: f64,
    /// Smoothing constant of the Charbonnier penalty in the rgb term.
    pub charbonnier_eps: f64,
    /// Soft value range `[lo, hi]` enforced on the gain map by the reg term.
    pub mul_range: (f64, f64),
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            rgb: 1.0,
            chroma: 0.5,
            ssim: 0.2,
            edge: 0.1,
            feat: 0.0,
            reg: 0.01,
            mse: 0.0,
            gray: 1.0,
            bright: 0.8,
            charbonnier_eps: 1e-3,
            mul_range: (0.2, 5.0),
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rgb", self.rgb),
            ("chroma", self.chroma),
            ("ssim", self.ssim),
            ("edge", self.edge),
            ("feat", self.feat),
            ("reg", self.reg),
            ("mse", self.mse),
            ("gray", self.gray),
            ("bright", self.bright),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::invalid(
                    format!("loss.{name}"),
                    format!("weight must be >= 0, got {v}"),
                ));
            }
        }
        if self.charbonnier_eps <= 0.0 || !self.charbonnier_eps.is_finite() {
            return Err(Error::invalid(
                "loss.charbonnier_eps",
                format!("must be > 0, got {}", self.charbonnier_eps),
            ));
        }
        if self.mul_range.0 > self.mul_range.1 {
            return Err(Error::invalid(
                "loss.mul_range",
                format!("lo {} > hi {}", self.mul_range.0, self.mul_range.1),
            ));
        }
        Ok(())
    }
}

/// Per-term breakdown of the compound loss.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LossReport {
    pub rgb: f64,
    pub chroma: f64,
    #[serde(rename = "ssim_loss")]
    pub ssim: f64,
    pub edge: f64,
    /// Always zero: the perceptual term requires a pretrained network.
    pub feat: f64,
    pub feat_excluded: bool,
    pub reg: f64,
    pub mse: f64,
    pub gray: f64,
    pub bright: f64,
    pub total: f64,
}

/// Charbonnier penalty plus an l1 term:
/// `mean(sqrt(d^2 + eps^2) - eps) + mean(|d|)`.
///
/// The constant `eps` is subtracted so the term vanishes at `d = 0`.
pub fn loss_rgb(pred: &ImageBuffer, gt: &ImageBuffer, charbonnier_eps: f64) -> Result<f64> {
    pred.expect_same_shape(gt)?;
    let eps2 = charbonnier_eps * charbonnier_eps;
    let n = pred.data().len() as f64;
    let mut charb = 0.0;
    let mut l1 = 0.0;
    for (&a, &b) in pred.data().iter().zip(gt.data()) {
        let d = a - b;
        charb += (d * d + eps2).sqrt() - charbonnier_eps;
        l1 += d.abs();
    }
    Ok(charb / n + l1 / n)
}

/// YCbCr consistency: `mean|dCb| + mean|dCr| + 0.5 * mean|dY|`.
pub fn loss_chroma(pred: &ImageBuffer, gt: &ImageBuffer) -> Result<f64> {
    pred.expect_channels(3)?;
    gt.expect_channels(3)?;
    pred.expect_same_shape(gt)?;
    let a = to_ycbcr(pred)?;
    let b = to_ycbcr(gt)?;
    let n = a.pixel_count() as f64;
    let mad = |c: usize| -> f64 {
        a.plane(c)
            .iter()
            .zip(b.plane(c))
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>()
            / n
    };
    Ok(mad(1) + mad(2) + 0.5 * mad(0))
}

/// Structural dissimilarity `1 - ssim(pred, gt)`.
pub fn loss_ssim(pred: &ImageBuffer, gt: &ImageBuffer) -> Result<f64> {
    Ok(1.0 - ssim(pred, gt)?)
}

/// Mean absolute difference of Sobel gradient magnitudes of the grayscale
/// images. Invariant to constant offsets.
pub fn loss_edge(pred: &ImageBuffer, gt: &ImageBuffer) -> Result<f64> {
    pred.expect_same_shape(gt)?;
    let ep = sobel_magnitude(&grayish(pred)?)?;
    let eg = sobel_magnitude(&grayish(gt)?)?;
    let n = ep.data().len() as f64;
    Ok(ep
        .data()
        .iter()
        .zip(eg.data())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / n)
}

fn grayish(img: &ImageBuffer) -> Result<ImageBuffer> {
    if img.channels() == 3 {
        to_grayscale(img)
    } else {
        Ok(img.clone())
    }
}

/// Mean squared error, implemented for completeness but weighted zero by
/// default.
pub fn loss_mse(pred: &ImageBuffer, gt: &ImageBuffer) -> Result<f64> {
    pred.expect_same_shape(gt)?;
    let n = pred.data().len() as f64;
    Ok(pred
        .data()
        .iter()
        .zip(gt.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n)
}

/// Correction-map regularization: hinge penalty on gain values outside
/// `[lo, hi]` plus total variation of both maps.
///
/// TV is the mean of all absolute forward differences (x and y pooled), so a
/// unit-contrast checkerboard has TV exactly 1.
pub fn loss_reg(maps: &CorrectionMaps, range: (f64, f64)) -> Result<f64> {
    let (lo, hi) = range;
    if lo > hi {
        return Err(Error::invalid("range", format!("lo {lo} > hi {hi}")));
    }
    let mul = maps.mul();
    let n = mul.data().len() as f64;
    let range_penalty = mul
        .data()
        .iter()
        .map(|&v| (lo - v).max(0.0) + (v - hi).max(0.0))
        .sum::<f64>()
        / n;
    Ok(range_penalty + total_variation(mul) + total_variation(maps.add()))
}

fn total_variation(img: &ImageBuffer) -> f64 {
    let (w, h) = (img.width(), img.height());
    let mut sum = 0.0;
    let mut count = 0usize;
    for c in 0..img.channels() {
        let p = img.plane(c);
        for y in 0..h {
            for x in 0..w {
                if x + 1 < w {
                    sum += (p[y * w + x + 1] - p[y * w + x]).abs();
                    count += 1;
                }
                if y + 1 < h {
                    sum += (p[(y + 1) * w + x] - p[y * w + x]).abs();
                    count += 1;
                }
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Edge-weighted supervision mask from the ground truth:
/// `sqrt(|laplacian(gray)| / (max|laplacian(gray)| + eps))`.
///
/// Values lie in `[0, 1)`; a flat image yields the all-zero mask.
pub fn gray_edge_mask(gt: &ImageBuffer) -> Result<ImageBuffer> {
    gt.expect_channels(3)?;
    let lap = laplacian(&to_grayscale(gt)?)?;
    let max_abs = lap.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    lap.map(|v| (v.abs() / (max_abs + GRAY_MASK_EPS)).sqrt())
}

/// Gray-edge masked mean absolute error; the mask comes from the ground
/// truth and broadcasts across channels.
pub fn loss_gray(pred: &ImageBuffer, gt: &ImageBuffer) -> Result<f64> {
    pred.expect_same_shape(gt)?;
    let mask = gray_edge_mask(gt)?;
    Ok(masked_mad(pred, gt, &mask))
}

/// Bright-region indicator from the prediction: pixels whose grayscale is at
/// or above the 0.85 quantile. Returns the binary mask and the threshold.
pub fn bright_mask(pred: &ImageBuffer) -> Result<(ImageBuffer, f64)> {
    pred.expect_channels(3)?;
    let gray = to_grayscale(pred)?;
    let tau = quantile(&gray, 0.85)?;
    let mask = gray.map(|v| if v >= tau { 1.0 } else { 0.0 })?;
    Ok((mask, tau))
}

/// Bright-region masked mean absolute error; the mask comes from the
/// prediction and broadcasts across channels.
pub fn loss_bright(pred: &ImageBuffer, gt: &ImageBuffer) -> Result<f64> {
    pred.expect_same_shape(gt)?;
    let (mask, _) = bright_mask(pred)?;
    Ok(masked_mad(pred, gt, &mask))
}

fn masked_mad(pred: &ImageBuffer, gt: &ImageBuffer, mask: &ImageBuffer) -> f64 {
    let n = pred.pixel_count();
    let m = mask.plane(0);
    let mut sum = 0.0;
    for c in 0..pred.channels() {
        let a = pred.plane(c);
        let b = gt.plane(c);
        for i in 0..n {
            sum += m[i] * (a[i] - b[i]).abs();
        }
    }
    sum / pred.data().len() as f64
}

/// Evaluate every term and the weighted total:
/// `total = sum(w_i * base_i) + w_gray * gray + w_bright * bright`.
pub fn compound_loss(
    pred: &ImageBuffer,
    gt: &ImageBuffer,
    maps: &CorrectionMaps,
    weights: &LossWeights,
) -> Result<LossReport> {
    weights.validate()?;
    pred.expect_same_shape(gt)?;
    let rgb = loss_rgb(pred, gt, weights.charbonnier_eps)?;
    let chroma = loss_chroma(pred, gt)?;
    let ssim_term = loss_ssim(pred, gt)?;
    let edge = loss_edge(pred, gt)?;
    let reg = loss_reg(maps, weights.mul_range)?;
    let mse = loss_mse(pred, gt)?;
    let gray = loss_gray(pred, gt)?;
    let bright = loss_bright(pred, gt)?;
    let feat = 0.0;
    let total = weights.rgb * rgb
        + weights.chroma * chroma
        + weights.ssim * ssim_term
        + weights.edge * edge
        + weights.feat * feat
        + weights.reg * reg
        + weights.mse * mse
        + weights.gray * gray
        + weights.bright * bright;
    Ok(LossReport {
        rgb,
        chroma,
        ssim: ssim_term,
        edge,
        feat,
        feat_excluded: true,
        reg,
        mse,
        gray,
        bright,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chroma::identity_maps;
    use crate::rng::SplitMix64;

    fn random_image(w: usize, h: usize, seed: u64) -> ImageBuffer {
        let mut rng = SplitMix64::new(seed);
        let data = (0..w * h * 3).map(|_| rng.next_f64()).collect();
        ImageBuffer::new(w, h, 3, data).unwrap()
    }

    fn gray_image(w: usize, h: usize, v: f64) -> ImageBuffer {
        ImageBuffer::filled(w, h, 3, v).unwrap()
    }

    #[test]
    fn rgb_zero_at_identity_and_known_value() {
        let img = random_image(6, 6, 1);
        assert_eq!(loss_rgb(&img, &img, 1e-3).unwrap(), 0.0);

        // uniform d = 0.1: (sqrt(0.01 + 1e-6) - 1e-3) + 0.1
        let gt = gray_image(4, 4, 0.4);
        let pred = gray_image(4, 4, 0.5);
        let expected = (0.01f64 + 1e-6).sqrt() - 1e-3 + 0.1;
        assert!((loss_rgb(&pred, &gt, 1e-3).unwrap() - expected).abs() < 1e-12);
        // symmetric in the sign of d
        assert_eq!(
            loss_rgb(&pred, &gt, 1e-3).unwrap(),
            loss_rgb(&gt, &pred, 1e-3).unwrap()
        );
    }

    #[test]
    fn chroma_gray_offset_hits_only_luma() {
        let a = gray_image(5, 5, 0.3);
        let b = gray_image(5, 5, 0.5);
        assert!((loss_chroma(&a, &b).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(loss_chroma(&a, &b).unwrap(), loss_chroma(&b, &a).unwrap());
        assert_eq!(loss_chroma(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn ssim_loss_zero_at_identity_and_constant_form() {
        let img = random_image(12, 12, 2);
        assert_eq!(loss_ssim(&img, &img).unwrap(), 0.0);

        let (a, b) = (0.9, 0.2);
        let expected = 1.0 - (2.0 * a * b + 1e-4) / (a * a + b * b + 1e-4);
        let v = loss_ssim(&gray_image(11, 11, a), &gray_image(11, 11, b)).unwrap();
        assert!((v - expected).abs() < 1e-12);
        assert!((0.0..=2.0).contains(&v));
    }

    #[test]
    fn edge_loss_ignores_dc_offsets() {
        let img = random_image(9, 9, 3);
        let offset = img.map(|v| v + 0.25).unwrap();
        assert_eq!(loss_edge(&img, &img).unwrap(), 0.0);
        assert!(loss_edge(&offset, &img).unwrap() < 1e-12);
    }

    #[test]
    fn edge_loss_of_step_vs_flat_matches_oracle() {
        let (w, h) = (8, 6);
        let data: Vec<f64> = (0..3)
            .flat_map(|_| {
                (0..h).flat_map(move |_| (0..w).map(|x| if x >= 4 { 1.0 } else { 0.0 }))
            })
            .collect();
        let step = ImageBuffer::new(w, h, 3, data).unwrap();
        let flat = ImageBuffer::zeros(w, h, 3).unwrap();
        let expected = sobel_magnitude(&to_grayscale(&step).unwrap()).unwrap().mean();
        let got = loss_edge(&step, &flat).unwrap();
        assert!(got > 0.0);
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn reg_of_identity_maps_is_zero() {
        let maps = identity_maps(8, 8).unwrap();
        assert_eq!(loss_reg(&maps, (0.2, 5.0)).unwrap(), 0.0);
    }

    #[test]
    fn reg_range_penalty_arithmetic() {
        let maps = CorrectionMaps::new(
            ImageBuffer::filled(4, 4, 1, 6.0).unwrap(),
            ImageBuffer::zeros(4, 4, 3).unwrap(),
        )
        .unwrap();
        assert!((loss_reg(&maps, (0.2, 5.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!(loss_reg(&maps, (5.0, 0.2)).is_err());
    }

    #[test]
    fn reg_checkerboard_tv_is_one() {
        let mut mul = ImageBuffer::zeros(6, 6, 1).unwrap();
        for y in 0..6 {
            for x in 0..6 {
                mul.set(x, y, 0, if (x + y) % 2 == 0 { 0.5 } else { 1.5 });
            }
        }
        let maps = CorrectionMaps::new(mul, ImageBuffer::zeros(6, 6, 3).unwrap()).unwrap();
        assert!((loss_reg(&maps, (0.2, 5.0)).unwrap() - 1.0).abs() < 1e-12);
    }

    fn impulse_image(n: usize) -> ImageBuffer {
        let mut plane = vec![0.0; n * n];
        plane[(n / 2) * n + n / 2] = 1.0;
        let p = ImageBuffer::new(n, n, 1, plane).unwrap();
        ImageBuffer::from_planes([&p, &p, &p]).unwrap()
    }

    #[test]
    fn gray_mask_of_constant_is_zero() {
        let mask = gray_edge_mask(&gray_image(5, 5, 0.4)).unwrap();
        assert!(mask.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gray_mask_of_impulse_matches_hand_oracle() {
        // |laplacian| is 4 at the impulse (the max) and 1 at its 4-neighbors:
        // mask = sqrt(4/(4+eps)) ~ 1 at the impulse, sqrt(1/4) = 0.5 at the
        // neighbors, 0 elsewhere
        let mask = gray_edge_mask(&impulse_image(5)).unwrap();
        for y in 0..5usize {
            for x in 0..5usize {
                let d = x.abs_diff(2) + y.abs_diff(2);
                let expected = match d {
                    0 => 1.0,
                    1 => 0.5,
                    _ => 0.0,
                };
                assert!(
                    (mask.get(x, y, 0) - expected).abs() < 1e-6,
                    "mask({x},{y}) = {}",
                    mask.get(x, y, 0)
                );
            }
        }
    }

    #[test]
    fn gray_mask_monotone_in_laplacian_magnitude() {
        let img = random_image(7, 7, 4);
        let mask = gray_edge_mask(&img).unwrap();
        let lap = laplacian(&to_grayscale(&img).unwrap()).unwrap();
        let mut pairs: Vec<(f64, f64)> = lap
            .data()
            .iter()
            .map(|v| v.abs())
            .zip(mask.data().iter().cloned())
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in pairs.windows(2) {
            assert!(w[1].1 >= w[0].1);
        }
        assert!(mask.data().iter().all(|&v| (0.0..1.0).contains(&v)));
    }

    #[test]
    fn gray_loss_fixtures() {
        let gt = impulse_image(5);
        assert_eq!(loss_gray(&gt, &gt).unwrap(), 0.0);

        // constant gt: zero mask annihilates any error
        let flat = gray_image(5, 5, 0.2);
        let off = flat.map(|v| v + 0.3).unwrap();
        assert_eq!(loss_gray(&off, &flat).unwrap(), 0.0);

        // uniform error factors out of the masked mean
        let pred = gt.map(|v| v + 0.1).unwrap();
        let mask_mean = gray_edge_mask(&gt).unwrap().mean();
        assert!((loss_gray(&pred, &gt).unwrap() - 0.1 * mask_mean).abs() < 1e-12);
    }

    #[test]
    fn bright_mask_constant_covers_everything() {
        let (mask, tau) = bright_mask(&gray_image(4, 4, 0.6)).unwrap();
        assert!((tau - 0.6).abs() < 1e-15);
        assert!(mask.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn bright_mask_ramp_matches_quantile_oracle() {
        let n = 100;
        let plane: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let p = ImageBuffer::new(10, 10, 1, plane.clone()).unwrap();
        let img = ImageBuffer::from_planes([&p, &p, &p]).unwrap();
        let (mask, tau) = bright_mask(&img).unwrap();

        // independent sort-based oracle
        let mut sorted = plane.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pos = 0.85f64 * 99.0;
        let lo = pos.floor() as usize;
        let tau_oracle = sorted[lo] * (1.0 - (pos - lo as f64)) + sorted[lo + 1] * (pos - lo as f64);
        assert_eq!(tau, tau_oracle);

        let covered = mask.data().iter().filter(|&&v| v == 1.0).count();
        let expected = plane.iter().filter(|&&v| v >= tau_oracle).count();
        assert_eq!(covered, expected);
        assert_eq!(covered, 15);
        assert!(mask.data().iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn bright_mask_commutes_with_pixel_permutation() {
        let img = random_image(8, 8, 14);
        let n = img.pixel_count();
        // reverse the pixel order in every channel
        let mut data = Vec::with_capacity(3 * n);
        for c in 0..3 {
            data.extend(img.plane(c).iter().rev());
        }
        let reversed = ImageBuffer::new(8, 8, 3, data).unwrap();
        let (mask, tau) = bright_mask(&img).unwrap();
        let (mask_rev, tau_rev) = bright_mask(&reversed).unwrap();
        assert_eq!(tau, tau_rev);
        let expected: Vec<f64> = mask.plane(0).iter().rev().cloned().collect();
        assert_eq!(mask_rev.plane(0), expected.as_slice());
    }

    #[test]
    fn bright_mask_coverage_band_on_distinct_values() {
        let img = random_image(10, 10, 5);
        let (mask, _) = bright_mask(&img).unwrap();
        let frac = mask.mean();
        assert!((0.10..=0.20).contains(&frac), "coverage {frac}");
    }

    #[test]
    fn bright_loss_fixtures() {
        let gt = random_image(10, 10, 6);
        assert_eq!(loss_bright(&gt, &gt).unwrap(), 0.0);

        let pred = gt.map(|v| (v + 0.1).min(1.5)).unwrap();
        let (mask, _) = bright_mask(&pred).unwrap();
        let expected = 0.1 * mask.mean();
        assert!((loss_bright(&pred, &gt).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn bright_loss_ignores_dark_region_errors() {
        let pred = random_image(10, 10, 7);
        let (mask, _) = bright_mask(&pred).unwrap();
        let gt_a = pred.map(|v| v).unwrap();
        // corrupt gt only where the prediction mask is zero
        let mut data = gt_a.data().to_vec();
        let n = pred.pixel_count();
        for c in 0..3 {
            for i in 0..n {
                if mask.plane(0)[i] == 0.0 {
                    data[c * n + i] += 0.37;
                }
            }
        }
        let gt_b = ImageBuffer::new(10, 10, 3, data).unwrap();
        assert_eq!(
            loss_bright(&pred, &gt_a).unwrap(),
            loss_bright(&pred, &gt_b).unwrap()
        );
    }

    #[test]
    fn compound_zero_point() {
        let img = random_image(16, 16, 8);
        let maps = identity_maps(16, 16).unwrap();
        let report = compound_loss(&img, &img, &maps, &LossWeights::default()).unwrap();
        assert!(report.total.abs() < 1e-9);
        for term in [
            report.rgb,
            report.chroma,
            report.ssim,
            report.edge,
            report.feat,
            report.reg,
            report.mse,
            report.gray,
            report.bright,
        ] {
            assert_eq!(term, 0.0);
        }
        assert!(report.feat_excluded);
    }

    #[test]
    fn compound_total_is_linear_in_each_weight() {
        let pred = random_image(12, 12, 9);
        let gt = random_image(12, 12, 10);
        let maps = identity_maps(12, 12).unwrap();
        let w = LossWeights::default();
        let base = compound_loss(&pred, &gt, &maps, &w).unwrap();
        let mut doubled = w;
        doubled.rgb *= 2.0;
        let d = compound_loss(&pred, &gt, &maps, &doubled).unwrap();
        assert!((d.total - base.total - w.rgb * base.rgb).abs() < 1e-12);
        assert_eq!(d.rgb, base.rgb);
    }

    #[test]
    fn compound_matches_hand_sum_of_terms() {
        let pred = random_image(14, 14, 11);
        let gt = random_image(14, 14, 12);
        let maps = identity_maps(14, 14).unwrap();
        let w = LossWeights::default();
        let r = compound_loss(&pred, &gt, &maps, &w).unwrap();
        let hand = w.rgb * loss_rgb(&pred, &gt, w.charbonnier_eps).unwrap()
            + w.chroma * loss_chroma(&pred, &gt).unwrap()
            + w.ssim * loss_ssim(&pred, &gt).unwrap()
            + w.edge * loss_edge(&pred, &gt).unwrap()
            + w.reg * loss_reg(&maps, w.mul_range).unwrap()
            + w.mse * loss_mse(&pred, &gt).unwrap()
            + w.gray * loss_gray(&pred, &gt).unwrap()
            + w.bright * loss_bright(&pred, &gt).unwrap();
        assert!((r.total - hand).abs() < 1e-12);
        assert!(r.rgb >= 0.0 && r.chroma >= 0.0 && r.gray >= 0.0 && r.bright >= 0.0);
    }

    #[test]
    fn weights_validation() {
        let w = LossWeights {
            rgb: -1.0,
            ..LossWeights::default()
        };
        assert!(w.validate().is_err());
        let w = LossWeights {
            charbonnier_eps: 0.0,
            ..LossWeights::default()
        };
        assert!(w.validate().is_err());
        let w = LossWeights {
            mul_range: (5.0, 0.2),
            ..LossWeights::default()
        };
        assert!(w.validate().is_err());
    }

    #[test]
    fn report_serializes_with_pinned_key_names() {
        let img = random_image(12, 12, 13);
        let maps = identity_maps(12, 12).unwrap();
        let r = compound_loss(&img, &img, &maps, &LossWeights::default()).unwrap();
        let json = serde_json::to_value(r).unwrap();
        for key in [
            "rgb", "chroma", "ssim_loss", "edge", "feat", "feat_excluded", "reg", "mse", "gray",
            "bright", "total",
        ] {
            assert!(json.get(key).is_some(), "missing key {key}");
        }
    }
}

//! Frequency-decoupled correction: multiplicative/additive maps applied to
//! the low-frequency component of the enhanced image while the
//! high-frequency residual is re-added untouched.

mod fit;

pub use fit::{fit_correction, FitConfig};

use crate::error::{Error, Result};
use crate::image::{BlurParams, ImageBuffer};
use crate::naka::{frequency_decompose, FrequencyPair};

/// Per-pixel correction: a single-channel multiplicative gain and a
/// three-channel signed additive offset.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionMaps {
    mul: ImageBuffer,
    add: ImageBuffer,
}

impl CorrectionMaps {
    pub fn new(mul: ImageBuffer, add: ImageBuffer) -> Result<Self> {
        mul.expect_channels(1)?;
        add.expect_channels(3)?;
        if mul.width() != add.width() || mul.height() != add.height() {
            return Err(Error::invalid(
                "maps",
                format!(
                    "mul is {}x{} but add is {}x{}",
                    mul.width(),
                    mul.height(),
                    add.width(),
                    add.height()
                ),
            ));
        }
        if mul.data().iter().any(|&v| v < 0.0) {
            return Err(Error::invalid("maps.mul", "gain values must be >= 0"));
        }
        Ok(CorrectionMaps { mul, add })
    }

    pub fn mul(&self) -> &ImageBuffer {
        &self.mul
    }

    pub fn add(&self) -> &ImageBuffer {
        &self.add
    }

    pub fn width(&self) -> usize {
        self.mul.width()
    }

    pub fn height(&self) -> usize {
        self.mul.height()
    }

    /// Viewable gain map: `mul * 0.5`, clamped to `[0, 1]`.
    pub fn preview_mul(&self) -> ImageBuffer {
        self.mul
            .map(|v| (v * 0.5).clamp(0.0, 1.0))
            .expect("preview is finite")
    }

    /// Viewable offset map: `add + 0.5`, clamped to `[0, 1]`.
    pub fn preview_add(&self) -> ImageBuffer {
        self.add
            .map(|v| (v + 0.5).clamp(0.0, 1.0))
            .expect("preview is finite")
    }
}

/// Identity correction: unit gain, zero offset.
pub fn identity_maps(width: usize, height: usize) -> Result<CorrectionMaps> {
    CorrectionMaps::new(
        ImageBuffer::filled(width, height, 1, 1.0)?,
        ImageBuffer::zeros(width, height, 3)?,
    )
}

/// Bilinear upsampling of both maps to the target resolution
/// (align-corners; a 1-wide axis extends as a constant).
pub fn upsample_maps(coarse: &CorrectionMaps, width: usize, height: usize) -> Result<CorrectionMaps> {
    if width < coarse.width() || height < coarse.height() {
        return Err(Error::invalid(
            "target",
            format!(
                "target {}x{} smaller than coarse {}x{}",
                width,
                height,
                coarse.width(),
                coarse.height()
            ),
        ));
    }
    CorrectionMaps::new(
        bilinear_resize(&coarse.mul, width, height)?,
        bilinear_resize(&coarse.add, width, height)?,
    )
}

fn bilinear_resize(img: &ImageBuffer, width: usize, height: usize) -> Result<ImageBuffer> {
    let (cw, ch) = (img.width(), img.height());
    let scale = |t: usize, target: usize, source: usize| -> f64 {
        if target <= 1 || source <= 1 {
            0.0
        } else {
            t as f64 * (source - 1) as f64 / (target - 1) as f64
        }
    };
    let mut out = vec![0.0; width * height * img.channels()];
    let n = width * height;
    for c in 0..img.channels() {
        let plane = img.plane(c);
        for y in 0..height {
            let v = scale(y, height, ch);
            let y0 = v.floor() as usize;
            let y1 = (y0 + 1).min(ch - 1);
            let fy = v - y0 as f64;
            for x in 0..width {
                let u = scale(x, width, cw);
                let x0 = u.floor() as usize;
                let x1 = (x0 + 1).min(cw - 1);
                let fx = u - x0 as f64;
                let top = plane[y0 * cw + x0] * (1.0 - fx) + plane[y0 * cw + x1] * fx;
                let bottom = plane[y1 * cw + x0] * (1.0 - fx) + plane[y1 * cw + x1] * fx;
                out[c * n + y * width + x] = top * (1.0 - fy) + bottom * fy;
            }
        }
    }
    ImageBuffer::new(width, height, img.channels(), out)
}

/// Apply correction to the Naka-enhanced image: the low-frequency component
/// is modulated as `lf * mul + add`, the high-frequency residual is re-added
/// unmodified, and the result is clipped to `[0, 1]`.
pub fn apply_correction(
    naka: &ImageBuffer,
    maps: &CorrectionMaps,
    blur: &BlurParams,
) -> Result<ImageBuffer> {
    let freq = frequency_decompose(naka, blur)?;
    apply_to_frequency(&freq, maps)
}

/// Same as [`apply_correction`] but over an existing decomposition, so a
/// fitting loop can reuse one decomposition across many map evaluations.
pub fn apply_to_frequency(freq: &FrequencyPair, maps: &CorrectionMaps) -> Result<ImageBuffer> {
    let lf = &freq.low_freq;
    lf.expect_channels(3)?;
    if maps.width() != lf.width() || maps.height() != lf.height() {
        return Err(Error::ShapeMismatch {
            expected_width: lf.width(),
            expected_height: lf.height(),
            expected_channels: 3,
            width: maps.width(),
            height: maps.height(),
            channels: 3,
        });
    }
    let n = lf.pixel_count();
    let mul = maps.mul.plane(0);
    let mut out = vec![0.0; 3 * n];
    for c in 0..3 {
        let lf_p = lf.plane(c);
        let hf_p = freq.high_freq.plane(c);
        let add_p = maps.add.plane(c);
        let dst = &mut out[c * n..(c + 1) * n];
        for i in 0..n {
            dst[i] = (lf_p[i] * mul[i] + add_p[i] + hf_p[i]).clamp(0.0, 1.0);
        }
    }
    ImageBuffer::new(lf.width(), lf.height(), 3, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_image(w: usize, h: usize, lo: f64, hi: f64, seed: u64) -> ImageBuffer {
        let mut rng = SplitMix64::new(seed);
        let data = (0..w * h * 3)
            .map(|_| lo + (hi - lo) * rng.next_f64())
            .collect();
        ImageBuffer::new(w, h, 3, data).unwrap()
    }

    #[test]
    fn identity_maps_have_requested_shape() {
        let maps = identity_maps(4, 4).unwrap();
        assert_eq!((maps.width(), maps.height()), (4, 4));
        assert!(maps.mul().data().iter().all(|&v| v == 1.0));
        assert!(maps.add().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_correction_reproduces_in_range_input() {
        let naka = random_image(12, 10, 0.0, 1.0, 7);
        let maps = identity_maps(12, 10).unwrap();
        let out = apply_correction(&naka, &maps, &BlurParams::default()).unwrap();
        for (a, b) in out.data().iter().zip(naka.data()) {
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn zero_gain_leaves_clipped_high_frequency() {
        let naka = random_image(12, 10, 0.0, 1.0, 8);
        let blur = BlurParams::default();
        let freq = frequency_decompose(&naka, &blur).unwrap();
        let maps = CorrectionMaps::new(
            ImageBuffer::zeros(12, 10, 1).unwrap(),
            ImageBuffer::zeros(12, 10, 3).unwrap(),
        )
        .unwrap();
        let out = apply_correction(&naka, &maps, &blur).unwrap();
        for (o, hf) in out.data().iter().zip(freq.high_freq.data()) {
            assert!((o - hf.clamp(0.0, 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_image_doubled_then_offset_back() {
        // hf = 0 for constants, so clip(2c - c) = c
        let c = 0.3;
        let naka = ImageBuffer::filled(8, 8, 3, c).unwrap();
        let maps = CorrectionMaps::new(
            ImageBuffer::filled(8, 8, 1, 2.0).unwrap(),
            ImageBuffer::filled(8, 8, 3, -c).unwrap(),
        )
        .unwrap();
        let out = apply_correction(&naka, &maps, &BlurParams::default()).unwrap();
        for v in out.data() {
            assert!((v - c).abs() < 1e-12);
        }
    }

    #[test]
    fn output_is_always_clipped() {
        let naka = random_image(16, 16, 0.0, 1.0, 9);
        let maps = CorrectionMaps::new(
            ImageBuffer::filled(16, 16, 1, 5.0).unwrap(),
            ImageBuffer::filled(16, 16, 3, -0.4).unwrap(),
        )
        .unwrap();
        let out = apply_correction(&naka, &maps, &BlurParams::default()).unwrap();
        assert!(out.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn high_frequency_is_preserved_where_unclipped() {
        let naka = random_image(14, 14, 0.2, 0.8, 10);
        let blur = BlurParams::default();
        let freq = frequency_decompose(&naka, &blur).unwrap();
        let maps = CorrectionMaps::new(
            ImageBuffer::filled(14, 14, 1, 1.05).unwrap(),
            ImageBuffer::filled(14, 14, 3, 0.02).unwrap(),
        )
        .unwrap();
        let out = apply_correction(&naka, &maps, &blur).unwrap();
        let n = naka.pixel_count();
        for c in 0..3 {
            for i in 0..n {
                let base = freq.low_freq.plane(c)[i] * 1.05 + 0.02;
                let unclipped = base + freq.high_freq.plane(c)[i];
                if (0.0..=1.0).contains(&unclipped) {
                    // where no clipping occurs the output is exactly the
                    // base plus the untouched high-frequency residual
                    assert_eq!(out.plane(c)[i], unclipped);
                    assert!((out.plane(c)[i] - base - freq.high_freq.plane(c)[i]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn dc_offset_does_not_change_edges() {
        use crate::image::{sobel_magnitude, to_grayscale};
        let naka = random_image(16, 16, 0.2, 0.7, 11);
        let maps = CorrectionMaps::new(
            ImageBuffer::filled(16, 16, 1, 1.0).unwrap(),
            ImageBuffer::filled(16, 16, 3, 0.1).unwrap(),
        )
        .unwrap();
        let out = apply_correction(&naka, &maps, &BlurParams::default()).unwrap();
        let e_in = sobel_magnitude(&to_grayscale(&naka).unwrap()).unwrap();
        let e_out = sobel_magnitude(&to_grayscale(&out).unwrap()).unwrap();
        for (a, b) in e_in.data().iter().zip(e_out.data()) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn upsample_constant_and_identity() {
        let coarse = CorrectionMaps::new(
            ImageBuffer::filled(1, 1, 1, 1.3).unwrap(),
            ImageBuffer::zeros(1, 1, 3).unwrap(),
        )
        .unwrap();
        let up = upsample_maps(&coarse, 5, 4).unwrap();
        assert!(up.mul().data().iter().all(|&v| (v - 1.3).abs() < 1e-15));

        let maps = identity_maps(6, 3).unwrap();
        let same = upsample_maps(&maps, 6, 3).unwrap();
        assert_eq!(&same, &maps);
    }

    #[test]
    fn upsample_two_sample_row_interpolates() {
        let coarse = CorrectionMaps::new(
            ImageBuffer::new(2, 1, 1, vec![0.0, 1.0]).unwrap(),
            ImageBuffer::zeros(2, 1, 3).unwrap(),
        )
        .unwrap();
        let up = upsample_maps(&coarse, 3, 1).unwrap();
        assert_eq!(up.mul().plane(0), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn upsample_rejects_downscale() {
        let maps = identity_maps(4, 4).unwrap();
        assert!(upsample_maps(&maps, 3, 4).is_err());
    }

    #[test]
    fn maps_reject_negative_gain_and_shape_mismatch() {
        let bad_mul = ImageBuffer::filled(2, 2, 1, -0.1).unwrap();
        assert!(CorrectionMaps::new(bad_mul, ImageBuffer::zeros(2, 2, 3).unwrap()).is_err());
        let mul = ImageBuffer::filled(2, 2, 1, 1.0).unwrap();
        assert!(CorrectionMaps::new(mul, ImageBuffer::zeros(3, 2, 3).unwrap()).is_err());
    }

    #[test]
    fn apply_rejects_mismatched_maps() {
        let naka = random_image(8, 8, 0.0, 1.0, 12);
        let maps = identity_maps(4, 4).unwrap();
        assert!(apply_correction(&naka, &maps, &BlurParams::default()).is_err());
    }

    #[test]
    fn previews_are_scaled_into_range() {
        let maps = CorrectionMaps::new(
            ImageBuffer::filled(2, 2, 1, 1.5).unwrap(),
            ImageBuffer::filled(2, 2, 3, -0.2).unwrap(),
        )
        .unwrap();
        assert!(maps.preview_mul().data().iter().all(|&v| v == 0.75));
        assert!(maps
            .preview_add()
            .data()
            .iter()
            .all(|&v| (v - 0.3).abs() < 1e-15));
    }
}

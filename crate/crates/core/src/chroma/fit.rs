//! Coarse-grid correction fitting.
//!
//! Correction maps are parameterized on a small grid, upsampled bilinearly to
//! full resolution, and fitted by derivative-free descent on the compound
//! objective: each iteration probes a candidate move in both signs and keeps
//! it only if the loss decreases, so the loss trace is non-increasing by
//! construction. Probe directions come from the counter-based generator, so
//! a fixed seed reproduces the fit bit-for-bit.

use super::{apply_to_frequency, upsample_maps, CorrectionMaps};
use crate::error::{Error, Result};
use crate::image::{BlurParams, ImageBuffer};
use crate::naka::frequency_decompose;
use crate::objective::{compound_loss, LossWeights};
use crate::rng::counter_uniform;

#[derive(Debug, Clone, Copy)]
pub struct FitConfig {
    pub grid_w: usize,
    pub grid_h: usize,
    pub iterations: usize,
    pub step_size: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            grid_w: 16,
            grid_h: 16,
            iterations: 200,
            step_size: 0.05,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_w == 0 || self.grid_h == 0 {
            return Err(Error::invalid("fit.grid", "grid dims must be >= 1"));
        }
        if self.step_size <= 0.0 || !self.step_size.is_finite() {
            return Err(Error::invalid(
                "fit.step_size",
                format!("must be > 0, got {}", self.step_size),
            ));
        }
        Ok(())
    }
}

/// Failed probes shrink the step so late iterations refine.
const STEP_DECAY: f64 = 0.9;

struct CoarseParams {
    grid_w: usize,
    grid_h: usize,
    /// `grid_w * grid_h` gain values followed by `3 * grid_w * grid_h`
    /// offset values.
    values: Vec<f64>,
}

impl CoarseParams {
    fn identity(grid_w: usize, grid_h: usize) -> Self {
        let cells = grid_w * grid_h;
        let mut values = vec![1.0; cells];
        values.extend(std::iter::repeat_n(0.0, 3 * cells));
        CoarseParams {
            grid_w,
            grid_h,
            values,
        }
    }

    fn to_maps(&self) -> Result<CorrectionMaps> {
        let cells = self.grid_w * self.grid_h;
        CorrectionMaps::new(
            ImageBuffer::new(self.grid_w, self.grid_h, 1, self.values[..cells].to_vec())?,
            ImageBuffer::new(self.grid_w, self.grid_h, 3, self.values[cells..].to_vec())?,
        )
    }

    fn stepped(&self, direction: &[f64], step: f64) -> Self {
        let cells = self.grid_w * self.grid_h;
        let values = self
            .values
            .iter()
            .zip(direction)
            .enumerate()
            .map(|(i, (&v, &d))| {
                let moved = v + step * d;
                if i < cells {
                    moved.max(0.0) // gain stays non-negative
                } else {
                    moved
                }
            })
            .collect();
        CoarseParams {
            grid_w: self.grid_w,
            grid_h: self.grid_h,
            values,
        }
    }
}

/// Fit correction maps that minimize the compound objective against the
/// ground truth.
///
/// Returns the full-resolution maps used in the final loss evaluation and the
/// per-iteration loss trace (length `iterations + 1`, non-increasing). The
/// low-light image participates only as a shape check; the objective is
/// driven by the enhanced image and the ground truth.
pub fn fit_correction(
    low: &ImageBuffer,
    naka: &ImageBuffer,
    gt: &ImageBuffer,
    blur: &BlurParams,
    cfg: &FitConfig,
    weights: &LossWeights,
) -> Result<(CorrectionMaps, Vec<f64>)> {
    cfg.validate()?;
    weights.validate()?;
    low.expect_channels(3)?;
    naka.expect_same_shape(low)?;
    gt.expect_same_shape(low)?;
    let (w, h) = (naka.width(), naka.height());
    if cfg.grid_w > w || cfg.grid_h > h {
        return Err(Error::invalid(
            "fit.grid",
            format!(
                "grid {}x{} exceeds image {}x{}",
                cfg.grid_w, cfg.grid_h, w, h
            ),
        ));
    }

    let freq = frequency_decompose(naka, blur)?;
    let eval = |params: &CoarseParams| -> Result<(CorrectionMaps, f64)> {
        let full = if cfg.grid_w == w && cfg.grid_h == h {
            params.to_maps()?
        } else {
            upsample_maps(&params.to_maps()?, w, h)?
        };
        let pred = apply_to_frequency(&freq, &full)?;
        let report = compound_loss(&pred, gt, &full, weights)?;
        Ok((full, report.total))
    };

    let mut params = CoarseParams::identity(cfg.grid_w, cfg.grid_h);
    let (mut best_maps, mut best) = eval(&params)?;
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    trace.push(best);

    if cfg.iterations == 0 {
        return Ok((best_maps, trace));
    }

    let cells = cfg.grid_w * cfg.grid_h;
    let n_params = 4 * cells;
    let mut step = cfg.step_size;
    for t in 0..cfg.iterations {
        let direction = probe_direction(t, cells, n_params, cfg.seed);
        let mut accepted = false;
        for sign in [1.0, -1.0] {
            let candidate = params.stepped(&direction, sign * step);
            let (maps, loss) = eval(&candidate)?;
            if loss < best {
                params = candidate;
                best = loss;
                best_maps = maps;
                accepted = true;
                break;
            }
        }
        if !accepted {
            step *= STEP_DECAY;
        }
        trace.push(best);
    }
    Ok((best_maps, trace))
}

/// Probe schedule: global moves (whole gain plane, then each offset channel)
/// alternate with per-cell Rademacher directions. Global moves capture
/// exposure and color-cast errors quickly; random directions refine locally.
fn probe_direction(t: usize, cells: usize, n_params: usize, seed: u64) -> Vec<f64> {
    let mut dir = vec![0.0; n_params];
    match t % 8 {
        0 => dir[..cells].fill(1.0),
        1 => dir[cells..2 * cells].fill(1.0),
        2 => dir[2 * cells..3 * cells].fill(1.0),
        3 => dir[3 * cells..].fill(1.0),
        _ => {
            for (i, d) in dir.iter_mut().enumerate() {
                *d = if counter_uniform(seed, i as u64, t as u64) < 0.5 {
                    -1.0
                } else {
                    1.0
                };
            }
        }
    }
    dir
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chroma::apply_correction;
    use crate::naka::naka_transform;
    use crate::naka::NakaParams;
    use crate::rng::SplitMix64;

    fn random_image(w: usize, h: usize, seed: u64) -> ImageBuffer {
        let mut rng = SplitMix64::new(seed);
        let data = (0..w * h * 3).map(|_| rng.next_f64()).collect();
        ImageBuffer::new(w, h, 3, data).unwrap()
    }

    #[test]
    fn zero_iterations_returns_identity() {
        let low = random_image(16, 16, 1).map(|v| v * 0.1).unwrap();
        let naka = naka_transform(&low, &NakaParams::default()).unwrap();
        let cfg = FitConfig {
            iterations: 0,
            grid_w: 4,
            grid_h: 4,
            ..FitConfig::default()
        };
        let (maps, trace) = fit_correction(
            &low,
            &naka,
            &naka,
            &BlurParams::default(),
            &cfg,
            &LossWeights::default(),
        )
        .unwrap();
        assert_eq!(trace.len(), 1);
        assert!(maps.mul().data().iter().all(|&v| v == 1.0));
        assert!(maps.add().data().iter().all(|&v| v == 0.0));
        assert_eq!((maps.width(), maps.height()), (16, 16));
    }

    #[test]
    fn self_consistent_target_stays_near_identity() {
        let low = random_image(24, 24, 2).map(|v| v * 0.08).unwrap();
        let naka = naka_transform(&low, &NakaParams::default()).unwrap();
        let blur = BlurParams::default();
        // ground truth is exactly what identity maps produce
        let gt = apply_correction(&naka, &crate::chroma::identity_maps(24, 24).unwrap(), &blur)
            .unwrap();
        let cfg = FitConfig {
            grid_w: 4,
            grid_h: 4,
            iterations: 40,
            seed: 7,
            ..FitConfig::default()
        };
        let (maps, trace) =
            fit_correction(&low, &naka, &gt, &blur, &cfg, &LossWeights::default()).unwrap();
        assert!(trace.last().unwrap() <= trace.first().unwrap());
        let mean_dev = maps.mul().data().iter().map(|v| (v - 1.0).abs()).sum::<f64>()
            / maps.mul().data().len() as f64;
        assert!(mean_dev < 0.05, "mean |mul - 1| = {mean_dev}");
    }

    #[test]
    fn trace_is_monotone_non_increasing() {
        let low = random_image(20, 20, 3).map(|v| v * 0.1).unwrap();
        let naka = naka_transform(&low, &NakaParams::default()).unwrap();
        let gt = random_image(20, 20, 4);
        let cfg = FitConfig {
            grid_w: 3,
            grid_h: 3,
            iterations: 30,
            seed: 1,
            ..FitConfig::default()
        };
        let (_, trace) = fit_correction(
            &low,
            &naka,
            &gt,
            &BlurParams::default(),
            &cfg,
            &LossWeights::default(),
        )
        .unwrap();
        assert_eq!(trace.len(), 31);
        for w in trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn fit_is_deterministic_for_fixed_seed() {
        let low = random_image(18, 12, 5).map(|v| v * 0.1).unwrap();
        let naka = naka_transform(&low, &NakaParams::default()).unwrap();
        let gt = random_image(18, 12, 6);
        let cfg = FitConfig {
            grid_w: 3,
            grid_h: 2,
            iterations: 25,
            seed: 42,
            ..FitConfig::default()
        };
        let run = || {
            fit_correction(
                &low,
                &naka,
                &gt,
                &BlurParams::default(),
                &cfg,
                &LossWeights::default(),
            )
            .unwrap()
        };
        let (m1, t1) = run();
        let (m2, t2) = run();
        assert_eq!(m1.mul().data(), m2.mul().data());
        assert_eq!(m1.add().data(), m2.add().data());
        assert_eq!(t1, t2);
    }

    #[test]
    fn fit_reduces_loss_on_a_real_gap() {
        // gt is a brightened version of the enhanced image; the fit should
        // close a meaningful part of the gap
        let low = random_image(24, 24, 8).map(|v| v * 0.05).unwrap();
        let naka = naka_transform(&low, &NakaParams::default()).unwrap();
        let gt = naka.map(|v| (v * 0.7 + 0.2).clamp(0.0, 1.0)).unwrap();
        let cfg = FitConfig {
            grid_w: 4,
            grid_h: 4,
            iterations: 80,
            seed: 3,
            ..FitConfig::default()
        };
        let (_, trace) = fit_correction(
            &low,
            &naka,
            &gt,
            &BlurParams::default(),
            &cfg,
            &LossWeights::default(),
        )
        .unwrap();
        let first = trace.first().unwrap();
        let last = trace.last().unwrap();
        assert!(last < &(first * 0.7), "no descent: {first} -> {last}");
    }

    #[test]
    fn rejects_invalid_config() {
        let img = random_image(8, 8, 9);
        let bad = FitConfig {
            grid_w: 0,
            ..FitConfig::default()
        };
        assert!(fit_correction(
            &img,
            &img,
            &img,
            &BlurParams::default(),
            &bad,
            &LossWeights::default()
        )
        .is_err());
        let too_big = FitConfig {
            grid_w: 16,
            grid_h: 16,
            ..FitConfig::default()
        };
        assert!(matches!(
            fit_correction(
                &img,
                &img,
                &img,
                &BlurParams::default(),
                &too_big,
                &LossWeights::default()
            ),
            Err(Error::InvalidParam { .. })
        ));
    }
}

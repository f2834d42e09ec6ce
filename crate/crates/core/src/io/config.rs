//! Pipeline configuration JSON.
//!
//! Every key is optional and falls back to the documented default; unknown
//! keys are rejected with the offending key named. Flag precedence is
//! CLI flag > config file > built-in default, enforced by the CLI layer.

use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::chroma::FitConfig;
use crate::error::{Error, Result};
use crate::image::{Boundary, BlurParams};
use crate::naka::NakaParams;
use crate::objective::LossWeights;
use crate::ppm::{AlignMode, PruneConfig};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub naka: NakaSection,
    pub blur: BlurSection,
    pub loss: LossSection,
    pub fit: FitSection,
    pub prune: PruneSection,
    pub align: AlignSection,
    pub paths: PathsSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NakaSection {
    pub sigma: Option<f64>,
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlurSection {
    pub sigma: Option<f64>,
    pub radius: Option<usize>,
    pub boundary: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LossSection {
    pub rgb: Option<f64>,
    pub chroma: Option<f64>,
    pub ssim: Option<f64>,
    pub edge: Option<f64>,
    pub feat: Option<f64>,
    pub reg: Option<f64>,
    pub mse: Option<f64>,
    pub gray: Option<f64>,
    pub bright: Option<f64>,
    pub charbonnier_eps: Option<f64>,
    pub mul_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    pub grid_w: Option<usize>,
    pub grid_h: Option<usize>,
    pub iterations: Option<usize>,
    pub step_size: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PruneSection {
    pub tau0: Option<f64>,
    pub beta: Option<f64>,
    pub epsilon: Option<f64>,
    pub iterations: Option<usize>,
    pub min_keep_fraction: Option<f64>,
    pub seed: Option<u64>,
    pub voxel_size: Option<f64>,
    pub recompute_nn: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlignSection {
    pub mode: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsSection {
    pub input: Option<String>,
    pub output: Option<String>,
    pub src_cameras: Option<String>,
    pub dst_cameras: Option<String>,
    pub report: Option<String>,
}

impl PipelineConfig {
    pub fn naka_params(&self) -> Result<NakaParams> {
        let d = NakaParams::default();
        let p = NakaParams {
            sigma: self.naka.sigma.unwrap_or(d.sigma),
            exponent: self.naka.exponent.unwrap_or(d.exponent),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn blur_params(&self) -> Result<BlurParams> {
        let sigma = self.blur.sigma.unwrap_or(2.0);
        if sigma <= 0.0 || !sigma.is_finite() {
            return Err(Error::Config(format!(
                "blur.sigma: must be > 0, got {sigma}"
            )));
        }
        let mut p = BlurParams::new(sigma).map_err(reprefix("blur.sigma"))?;
        if let Some(radius) = self.blur.radius {
            p = p.with_radius(radius).map_err(reprefix("blur.radius"))?;
        }
        if let Some(b) = &self.blur.boundary {
            p = p.with_boundary(Boundary::from_str(b).map_err(reprefix("blur.boundary"))?);
        }
        Ok(p)
    }

    pub fn loss_weights(&self) -> Result<LossWeights> {
        let d = LossWeights::default();
        let w = LossWeights {
            rgb: self.loss.rgb.unwrap_or(d.rgb),
            chroma: self.loss.chroma.unwrap_or(d.chroma),
            ssim: self.loss.ssim.unwrap_or(d.ssim),
            edge: self.loss.edge.unwrap_or(d.edge),
            feat: self.loss.feat.unwrap_or(d.feat),
            reg: self.loss.reg.unwrap_or(d.reg),
            mse: self.loss.mse.unwrap_or(d.mse),
            gray: self.loss.gray.unwrap_or(d.gray),
            bright: self.loss.bright.unwrap_or(d.bright),
            charbonnier_eps: self.loss.charbonnier_eps.unwrap_or(d.charbonnier_eps),
            mul_range: self
                .loss
                .mul_range
                .map(|[lo, hi]| (lo, hi))
                .unwrap_or(d.mul_range),
        };
        w.validate()?;
        Ok(w)
    }

    pub fn fit_config(&self) -> Result<FitConfig> {
        let d = FitConfig::default();
        let cfg = FitConfig {
            grid_w: self.fit.grid_w.unwrap_or(d.grid_w),
            grid_h: self.fit.grid_h.unwrap_or(d.grid_h),
            iterations: self.fit.iterations.unwrap_or(d.iterations),
            step_size: self.fit.step_size.unwrap_or(d.step_size),
            seed: self.fit.seed.unwrap_or(d.seed),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn prune_config(&self) -> Result<PruneConfig> {
        let d = PruneConfig::default();
        let cfg = PruneConfig {
            tau0: self.prune.tau0.unwrap_or(d.tau0),
            beta: self.prune.beta.unwrap_or(d.beta),
            epsilon: self.prune.epsilon.unwrap_or(d.epsilon),
            iterations: self.prune.iterations.unwrap_or(d.iterations),
            min_keep_fraction: self.prune.min_keep_fraction.unwrap_or(d.min_keep_fraction),
            seed: self.prune.seed.unwrap_or(d.seed),
            voxel_size: self.prune.voxel_size.unwrap_or(d.voxel_size),
            recompute_nn: self.prune.recompute_nn.unwrap_or(d.recompute_nn),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn align_mode(&self) -> Result<AlignMode> {
        match &self.align.mode {
            None => Ok(AlignMode::Sim3),
            Some(s) => AlignMode::from_str(s).map_err(reprefix("align.mode")),
        }
    }

    /// Validate every section so config errors surface on load rather than
    /// at first use.
    pub fn validate(&self) -> Result<()> {
        self.naka_params()?;
        self.blur_params()?;
        self.loss_weights()?;
        self.fit_config()?;
        self.prune_config()?;
        self.align_mode()?;
        Ok(())
    }
}

/// Rewrap validation errors so they carry the config key path.
fn reprefix(key: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::InvalidParam { reason, .. } => Error::Config(format!("{key}: {reason}")),
        other => other,
    }
}

pub fn read_config(path: impl AsRef<Path>) -> Result<PipelineConfig> {
    let text = std::fs::read_to_string(&path)?;
    let config: PipelineConfig = serde_json::from_str(&text)?;
    config.validate()?;
    Ok(config)
}

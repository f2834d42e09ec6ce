//! Point Preprocessing Module: coordinate alignment, voxel pooling, and
//! distance-adaptive progressive pruning of dense point-cloud priors.

mod align;
mod nn;
mod prune;
mod voxel;

pub use align::{apply_transform, estimate_alignment, normalize_scene};
pub use nn::nearest_neighbor_distances;
pub use prune::{keep_probability, progressive_prune, threshold_update};
pub use voxel::voxel_pool;

use serde::Serialize;

use crate::error::{Error, Result};

/// Positions with optional per-point colors and unit normals.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    positions: Vec<[f64; 3]>,
    colors: Option<Vec<[f64; 3]>>,
    normals: Option<Vec<[f64; 3]>>,
}

impl PointCloud {
    pub fn new(
        positions: Vec<[f64; 3]>,
        colors: Option<Vec<[f64; 3]>>,
        normals: Option<Vec<[f64; 3]>>,
    ) -> Result<Self> {
        let n = positions.len();
        if positions.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("positions", "non-finite coordinate"));
        }
        if let Some(c) = &colors {
            if c.len() != n {
                return Err(Error::invalid(
                    "colors",
                    format!("{} colors for {n} points", c.len()),
                ));
            }
        }
        if let Some(m) = &normals {
            if m.len() != n {
                return Err(Error::invalid(
                    "normals",
                    format!("{} normals for {n} points", m.len()),
                ));
            }
            for v in m {
                let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if !len.is_finite() || (len - 1.0).abs() > 1e-4 {
                    return Err(Error::invalid(
                        "normals",
                        format!("normal length {len} is not unit"),
                    ));
                }
            }
        }
        Ok(PointCloud {
            positions,
            colors,
            normals,
        })
    }

    pub fn from_positions(positions: Vec<[f64; 3]>) -> Result<Self> {
        PointCloud::new(positions, None, None)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn colors(&self) -> Option<&[[f64; 3]]> {
        self.colors.as_deref()
    }

    pub fn normals(&self) -> Option<&[[f64; 3]]> {
        self.normals.as_deref()
    }

    /// Subset of points by index, preserving attribute presence.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        PointCloud {
            positions: indices.iter().map(|&i| self.positions[i]).collect(),
            colors: self
                .colors
                .as_ref()
                .map(|c| indices.iter().map(|&i| c[i]).collect()),
            normals: self
                .normals
                .as_ref()
                .map(|m| indices.iter().map(|&i| m[i]).collect()),
        }
    }

    /// Axis-aligned bounding box as `(min, max)`; `None` for empty clouds.
    pub fn bounding_box(&self) -> Option<([f64; 3], [f64; 3])> {
        let first = self.positions.first()?;
        let mut lo = *first;
        let mut hi = *first;
        for p in &self.positions {
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        Some((lo, hi))
    }
}

/// Labelled camera optical centers used for alignment.
#[derive(Debug, Clone)]
pub struct CameraSet {
    ids: Vec<String>,
    centers: Vec<[f64; 3]>,
}

impl CameraSet {
    pub fn new(ids: Vec<String>, centers: Vec<[f64; 3]>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::invalid("cameras", "at least one camera required"));
        }
        if ids.len() != centers.len() {
            return Err(Error::invalid(
                "cameras",
                format!("{} ids for {} centers", ids.len(), centers.len()),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::invalid("cameras", format!("duplicate id `{id}`")));
            }
        }
        if centers.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("cameras", "non-finite center coordinate"));
        }
        Ok(CameraSet { ids, centers })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn centers(&self) -> &[[f64; 3]] {
        &self.centers
    }
}

/// 3D similarity transform `p -> scale * R * p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform {
    pub scale: f64,
    /// Row-major orthonormal rotation with determinant +1.
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

impl Transform {
    pub fn identity() -> Self {
        Transform {
            scale: 1.0,
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: [0.0, 0.0, 0.0],
        }
    }

    #[inline]
    pub fn apply_point(&self, p: [f64; 3]) -> [f64; 3] {
        let r = &self.rotation;
        [
            self.scale * (r[0][0] * p[0] + r[0][1] * p[1] + r[0][2] * p[2]) + self.translation[0],
            self.scale * (r[1][0] * p[0] + r[1][1] * p[1] + r[1][2] * p[2]) + self.translation[1],
            self.scale * (r[2][0] * p[0] + r[2][1] * p[1] + r[2][2] * p[2]) + self.translation[2],
        ]
    }

    #[inline]
    pub fn rotate_vector(&self, v: [f64; 3]) -> [f64; 3] {
        let r = &self.rotation;
        [
            r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
            r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
            r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2],
        ]
    }
}

/// Alignment mode for [`estimate_alignment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignMode {
    /// 7-DoF similarity: scale, rotation, translation.
    Sim3,
    /// 6-DoF: scale fixed to 1.
    Rigid,
    /// Identity transform, no estimation.
    None,
}

impl std::str::FromStr for AlignMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sim3" => Ok(AlignMode::Sim3),
            "rigid" => Ok(AlignMode::Rigid),
            "none" => Ok(AlignMode::None),
            other => Err(Error::invalid(
                "mode",
                format!("expected `sim3`, `rigid`, or `none`, got `{other}`"),
            )),
        }
    }
}

impl std::fmt::Display for AlignMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AlignMode::Sim3 => "sim3",
            AlignMode::Rigid => "rigid",
            AlignMode::None => "none",
        })
    }
}

/// Parameters of the progressive pruning schedule.
#[derive(Debug, Clone, Copy)]
pub struct PruneConfig {
    /// Initial pruning threshold in world units.
    pub tau0: f64,
    /// Threshold update rate; the threshold multiplies by
    /// `exp(beta * M_t / M_0)` after each iteration.
    pub beta: f64,
    /// Denominator guard in the keep probability.
    pub epsilon: f64,
    /// Number of pruning iterations.
    pub iterations: usize,
    /// Retention floor as a fraction of the initial candidate count.
    pub min_keep_fraction: f64,
    pub seed: u64,
    /// Edge length of the pooling voxels (used by the pipeline stage).
    pub voxel_size: f64,
    /// Recompute nearest-neighbor distances on the surviving set each
    /// iteration; when false, distances from the initial set are reused.
    pub recompute_nn: bool,
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig {
            tau0: 0.005,
            beta: 0.01,
            epsilon: 1e-8,
            iterations: 6,
            min_keep_fraction: 0.3,
            seed: 0,
            voxel_size: 0.01,
            recompute_nn: true,
        }
    }
}

impl PruneConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tau0 <= 0.0 || !self.tau0.is_finite() {
            return Err(Error::invalid(
                "prune.tau0",
                format!("must be > 0, got {}", self.tau0),
            ));
        }
        if !self.beta.is_finite() {
            return Err(Error::invalid("prune.beta", "must be finite"));
        }
        if self.epsilon < 0.0 || !self.epsilon.is_finite() {
            return Err(Error::invalid(
                "prune.epsilon",
                format!("must be >= 0, got {}", self.epsilon),
            ));
        }
        if !self.min_keep_fraction.is_finite()
            || self.min_keep_fraction <= 0.0
            || self.min_keep_fraction > 1.0
        {
            return Err(Error::invalid(
                "prune.min_keep_fraction",
                format!("must be in (0, 1], got {}", self.min_keep_fraction),
            ));
        }
        if self.voxel_size <= 0.0 || !self.voxel_size.is_finite() {
            return Err(Error::invalid(
                "prune.voxel_size",
                format!("must be > 0, got {}", self.voxel_size),
            ));
        }
        Ok(())
    }
}

/// One pruning iteration as it was actually applied.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PruneIteration {
    pub tau_applied: f64,
    pub points_before: usize,
    pub points_after: usize,
    pub rolled_back: bool,
}

/// Record of a pruning run.
#[derive(Debug, Clone, Serialize)]
pub struct PruneReport {
    pub initial_count: usize,
    pub final_count: usize,
    pub iterations: Vec<PruneIteration>,
}

/// Full geometric preprocessing: alignment (unless mode is `none`), voxel
/// pooling, then progressive pruning, in exactly that order.
///
/// The report's `initial_count` is the post-pooling candidate count.
pub fn run_ppm(
    cloud: &PointCloud,
    src_cams: Option<&CameraSet>,
    dst_cams: Option<&CameraSet>,
    mode: AlignMode,
    cfg: &PruneConfig,
) -> Result<(PointCloud, PruneReport)> {
    cfg.validate()?;
    let transform = match mode {
        AlignMode::None => Transform::identity(),
        _ => {
            let (src, dst) = match (src_cams, dst_cams) {
                (Some(s), Some(d)) => (s, d),
                _ => {
                    return Err(Error::invalid(
                        "cameras",
                        format!("mode `{mode}` requires source and target camera sets"),
                    ))
                }
            };
            estimate_alignment(src, dst, mode)?
        }
    };
    let aligned = apply_transform(cloud, &transform);
    let pooled = voxel_pool(&aligned, cfg.voxel_size)?;
    progressive_prune(&pooled, cfg)
}
